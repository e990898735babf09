#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hope/chunkers.hpp"

namespace hope::stats {

/// Standard BLEU with clipped n-gram precisions up to
/// min(max_n, |candidate tokens|), geometric mean, and brevity penalty
/// exp(1 - r/c) when the candidate is shorter than the reference. Tokens are
/// whitespace-split after lowercasing and punctuation stripping. No
/// smoothing: zero matches at any used order scores 0.
double bleu(std::string_view reference, std::string_view candidate, std::size_t max_n = 4);

/// Passage texts joined in ordinal order with single spaces.
std::string concat_passages(const chunkers::PassageSet& passages);

struct PearsonResult {
    double rho = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// Sample Pearson correlation with a two-tailed p-value from the exact
/// Student-t distribution (via the regularized incomplete beta function).
/// Requires equal lengths >= 3 and non-zero variance on both sides.
PearsonResult pearson(std::span<const double> xs, std::span<const double> ys);

/// 100 * (last - first) / first over an ordered series. The first element
/// must be positive.
double relative_gain(std::span<const double> series);

/// Externally computed RAG indicators (e.g. AC/FC/CR/RR), keyed by
/// (document_id, chunker_id). Loaded from CSV with header
/// document_id,chunker_id,<metric...>; duplicate keys and non-finite values
/// are data errors.
struct IndicatorTable {
    std::vector<std::string> metric_names;
    std::map<std::pair<std::string, std::string>, std::vector<double>> rows;

    static IndicatorTable load_csv(const std::filesystem::path& file);
};

struct CorrelationEntry {
    std::string metric_a; // HOPE-side metric
    std::string metric_b; // indicator
    double rho = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

struct CorrelationReport {
    std::string group; // "all", or a document/chunker id
    std::vector<CorrelationEntry> entries;
};

struct Bin {
    double x_mean = 0.0;                 // mean of the binning metric
    std::map<std::string, double> means; // per-indicator means
    std::size_t count = 0;
};

/// Splits (x, row) pairs into up to `bins` equal-count bins ordered by x.
/// Used to reproduce binned scatter reporting and relative gains between the
/// lowest and highest bins.
std::vector<Bin> equal_count_bins(std::vector<std::pair<double, std::map<std::string, double>>> rows,
                                  std::size_t bins);

} // namespace hope::stats
