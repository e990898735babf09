#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hope/errors.hpp"
#include "hope/metrics.hpp"

namespace hope::run {

/// One (document, chunker) cell of an evaluation run.
struct CellResult {
    metrics::CorpusScore score;
    double bleu = 0.0;
    std::vector<metrics::PassageScore> passage_scores;
    std::string artifact_json; // serialized audit record for inspect
};

/// On-disk layout of a report bundle:
///   manifest.json, scores.json, passages.csv, baseline.csv, warnings.jsonl,
///   artifacts/<doc_id>/<chunker_id>.json
/// plus an INCOMPLETE marker that exists from run start until the bundle is
/// fully written.
struct BundlePaths {
    std::filesystem::path root;

    std::filesystem::path manifest() const { return root / "manifest.json"; }
    std::filesystem::path scores() const { return root / "scores.json"; }
    std::filesystem::path passages_csv() const { return root / "passages.csv"; }
    std::filesystem::path baseline_csv() const { return root / "baseline.csv"; }
    std::filesystem::path warnings() const { return root / "warnings.jsonl"; }
    std::filesystem::path incomplete_marker() const { return root / "INCOMPLETE"; }
    std::filesystem::path artifacts_dir() const { return root / "artifacts"; }
    std::filesystem::path artifact(const std::string& document_id,
                                   const std::string& chunker_id) const;
};

struct Manifest {
    std::string config_hash;
    std::string llm_provider;
    std::string embedder_provider;
    std::uint64_t seed = 0;
    std::string note;
    std::string started_at;  // ISO-8601 UTC; provenance only
    std::string finished_at;
    bool complete = false;
};

/// Writes a file atomically (temp name in the same directory, then rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Serializes and writes the bundle. Cell results are keyed
/// (document_id, chunker_id) and must be unique.
void write_bundle(const BundlePaths& paths, const Manifest& manifest,
                  const std::map<std::pair<std::string, std::string>, CellResult>& cells,
                  const WarningLog& warnings);

/// Loaded view of a bundle for compare/inspect.
struct LoadedBundle {
    Manifest manifest;
    // row: document_id, chunker_id -> named metric values
    std::map<std::pair<std::string, std::string>, std::map<std::string, double>> scores;
    BundlePaths paths;

    std::vector<std::string> chunker_ids() const;
};

LoadedBundle load_bundle(const std::filesystem::path& root);

} // namespace hope::run
