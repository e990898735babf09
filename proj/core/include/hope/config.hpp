#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hope/chunkers.hpp"
#include "hope/metrics.hpp"

namespace hope::run {

struct ProviderConfig {
    std::string kind = "mock"; // "mock" or "http"
    std::string endpoint;
    std::string model;
    double temperature = 0.7; // llm only; must be > 0 (generation tasks)
};

struct RunConfig {
    std::filesystem::path corpus_dir;
    std::vector<chunkers::ChunkerConfig> chunkers;
    ProviderConfig llm;
    ProviderConfig embedder;
    metrics::MetricParams metrics;
    std::uint64_t seed = 0;
    int concurrency = 4; // max in-flight provider calls
    std::filesystem::path cache_dir;
    std::filesystem::path output_dir;
    std::filesystem::path prompt_dir; // optional template overrides
    std::string note;                 // free text carried into the manifest

    /// Parses JSON, filling defaults and validating. Unknown or invalid
    /// fields raise a usage error naming the field path.
    static RunConfig from_json_text(const std::string& text);
    static RunConfig from_file(const std::filesystem::path& path);

    /// Canonical (sorted-key, compact) JSON of the effective config.
    std::string to_canonical_json() const;

    /// FNV-1a hash of the canonical form; changes iff a field changes.
    std::string hash() const;

    void validate() const;
};

} // namespace hope::run
