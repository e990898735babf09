#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "hope/embedding.hpp"
#include "hope/llm.hpp"

namespace hope::llm {

/// Content-addressed response cache backed by an append-only JSON-lines
/// file ({key, task, value} per line). Values are deterministic per key, so
/// concurrent writers colliding on a key are benign.
class ResponseCache {
public:
    /// Opens (and replays) the cache file, creating parent directories.
    explicit ResponseCache(std::filesystem::path file);

    std::optional<std::string> lookup(const std::string& key) const;
    void store(const std::string& key, std::string_view task, std::string_view value);

    static std::string make_key(std::string_view provider_id, std::string_view task,
                                const std::vector<std::pair<std::string, std::string>>& parts,
                                double temperature, int sample_index);

    std::size_t size() const;

private:
    std::filesystem::path file_;
    mutable std::mutex mutex_;
    std::map<std::string, std::string> entries_;
};

/// Cache-through wrapper; only misses reach the wrapped provider.
class CachingLlmProvider : public LlmProvider {
public:
    CachingLlmProvider(LlmProvider& inner, ResponseCache* cache)
        : inner_(inner), cache_(cache) {}

    std::string generate(const GenerationRequest& request) override;
    std::string id() const override { return inner_.id(); }

private:
    LlmProvider& inner_;
    ResponseCache* cache_; // may be null (caching disabled)
};

/// Same idea for embeddings; vectors are stored as JSON arrays under the
/// "embed" task.
class CachingEmbedder : public embedding::Embedder {
public:
    CachingEmbedder(embedding::Embedder& inner, ResponseCache* cache)
        : inner_(inner), cache_(cache) {}

    embedding::EmbeddingVector embed(std::string_view text) override;
    std::string id() const override { return inner_.id(); }

private:
    embedding::Embedder& inner_;
    ResponseCache* cache_;
};

} // namespace hope::llm
