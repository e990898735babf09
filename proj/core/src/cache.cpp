#include "hope/cache.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "hope/hashing.hpp"

namespace hope::llm {

using nlohmann::json;

ResponseCache::ResponseCache(std::filesystem::path file) : file_(std::move(file)) {
    if (file_.has_parent_path()) {
        std::filesystem::create_directories(file_.parent_path());
    }
    std::ifstream in(file_, std::ios::binary);
    if (!in) return; // fresh cache
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json record = json::parse(line, nullptr, false);
        if (record.is_discarded() || !record.contains("key") || !record.contains("value")) {
            continue; // torn write from an interrupted run; later lines may still be fine
        }
        entries_[record["key"].get<std::string>()] = record["value"].get<std::string>();
    }
}

std::optional<std::string> ResponseCache::lookup(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::store(const std::string& key, std::string_view task, std::string_view value) {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = entries_.insert_or_assign(key, std::string(value));
    (void)it;
    json record{{"key", key}, {"task", std::string(task)}, {"value", std::string(value)}};
    std::ofstream out(file_, std::ios::binary | std::ios::app);
    out << record.dump() << '\n';
}

std::string ResponseCache::make_key(std::string_view provider_id, std::string_view task,
                                    const std::vector<std::pair<std::string, std::string>>& parts,
                                    double temperature, int sample_index) {
    json canonical;
    canonical["provider"] = std::string(provider_id);
    canonical["task"] = std::string(task);
    json part_list = json::array();
    for (const auto& [name, value] : parts) {
        part_list.push_back(json::array({name, value}));
    }
    canonical["parts"] = std::move(part_list);
    canonical["temperature"] = temperature;
    canonical["sample_index"] = sample_index;
    return to_hex(fnv1a64(canonical.dump()));
}

std::size_t ResponseCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::string CachingLlmProvider::generate(const GenerationRequest& request) {
    if (cache_ == nullptr) return inner_.generate(request);
    const std::string key = ResponseCache::make_key(inner_.id(), task_name(request.task),
                                                    request.prompt_parts, request.temperature,
                                                    request.sample_index);
    if (auto hit = cache_->lookup(key)) return *hit;
    std::string response = inner_.generate(request);
    cache_->store(key, task_name(request.task), response);
    return response;
}

embedding::EmbeddingVector CachingEmbedder::embed(std::string_view text) {
    if (cache_ == nullptr) return inner_.embed(text);
    const std::string key =
        ResponseCache::make_key(inner_.id(), "embed", {{"input", std::string(text)}}, 0.0, 0);
    if (auto hit = cache_->lookup(key)) {
        json array = json::parse(*hit);
        return array.get<embedding::EmbeddingVector>();
    }
    embedding::EmbeddingVector vector = inner_.embed(text);
    cache_->store(key, "embed", json(vector).dump());
    return vector;
}

} // namespace hope::llm
