#pragma once

// Shared fixtures and test doubles for the unit and acceptance suites.

#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "hope/corpus.hpp"
#include "hope/embedding.hpp"
#include "hope/llm.hpp"

namespace hope::test {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        auto base = std::filesystem::temp_directory_path();
        std::random_device rd;
        path_ = base / ("hope-" + tag + "-" + std::to_string(rd()) + "-" +
                        std::to_string(::getpid()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline corpus::Document make_document(std::string id, std::string text) {
    corpus::Document doc;
    doc.id = std::move(id);
    doc.text = std::move(text);
    doc.sentences = corpus::split_sentences(doc.text);
    return doc;
}

// Independent reimplementation of the sampling LCG; the ten-line oracle the
// corpus tests check against.
class LcgOracle {
public:
    explicit LcgOracle(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
        return state_;
    }
    std::uint64_t draw(std::uint64_t range) { return (next() >> 33) % range; }

private:
    std::uint64_t state_;
};

// Embedder returning pre-registered vectors for exact strings.
class FakeEmbedder : public embedding::Embedder {
public:
    void set(std::string text, embedding::EmbeddingVector vector) {
        vectors_[std::move(text)] = std::move(vector);
    }

    embedding::EmbeddingVector embed(std::string_view text) override {
        ++calls_;
        auto it = vectors_.find(std::string(text));
        if (it == vectors_.end()) {
            throw provider_error("FakeEmbedder: no vector registered for '" + std::string(text) +
                                 "'");
        }
        return it->second;
    }
    std::string id() const override { return "fake:embedder"; }
    std::size_t calls() const { return calls_; }

private:
    std::map<std::string, embedding::EmbeddingVector> vectors_;
    std::size_t calls_ = 0;
};

// LLM double driven by a scripted response sequence per task.
class ScriptedLlm : public llm::LlmProvider {
public:
    void push(llm::Task task, std::string response) {
        scripts_[task].push_back(std::move(response));
    }

    std::string generate(const llm::GenerationRequest& request) override {
        ++calls_;
        auto& queue = scripts_[request.task];
        if (queue.empty()) {
            throw provider_error("ScriptedLlm: no scripted response for task " +
                                 std::string(llm::task_name(request.task)));
        }
        std::string response = queue.front();
        queue.erase(queue.begin());
        return response;
    }
    std::string id() const override { return "scripted:llm"; }
    std::size_t calls() const { return calls_; }

private:
    std::map<llm::Task, std::vector<std::string>> scripts_;
    std::size_t calls_ = 0;
};

} // namespace hope::test
