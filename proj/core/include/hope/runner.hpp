#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "hope/config.hpp"
#include "hope/report.hpp"

namespace hope::run {

struct EvaluateStats {
    std::filesystem::path bundle_dir;
    std::size_t cells = 0;
    std::size_t llm_provider_calls = 0;   // cache misses that reached the provider
    std::size_t embed_provider_calls = 0;
    std::size_t warnings = 0;
};

/// Full evaluation: corpus -> chunkers -> indexes -> metrics -> bundle.
/// Deterministic under mock providers for a fixed (config, seed); resumable
/// through the response cache.
EvaluateStats run_evaluate(const RunConfig& config);

struct CompareOptions {
    std::filesystem::path bundle_dir;
    std::filesystem::path indicators_csv;
    std::string group_by = "all"; // "all", "doc", or "chunker"
    std::size_t bins = 10;
    std::filesystem::path output_json; // optional
};

/// Correlates bundle metrics (hope, zeta_*, bleu) against external
/// indicators and emits the binned zeta_sem series with relative gains.
void run_compare(const CompareOptions& options, std::ostream& out);

struct InspectOptions {
    std::filesystem::path bundle_dir;
    std::string document_id;
    std::string chunker_id;
    bool as_json = false;
};

/// Human-readable (or JSON) audit report for one (document, chunker) cell.
void run_inspect(const InspectOptions& options, std::ostream& out);

} // namespace hope::run
