#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hope/chunkers.hpp"
#include "hope/errors.hpp"

namespace hope::embedding {

using EmbeddingVector = std::vector<double>;

/// Text-to-vector provider. Implementations must be deterministic per
/// (provider id, text) and safe for concurrent calls.
class Embedder {
public:
    virtual ~Embedder() = default;

    /// Embeds non-empty text. Empty input is an input error; vectors are
    /// finite with non-zero norm.
    virtual EmbeddingVector embed(std::string_view text) = 0;

    virtual std::string id() const = 0;
};

/// Dependency-free embedder: lowercased alphanumeric tokens are hashed with
/// FNV-1a into 8 buckets, counted, and L2-normalized. Shared tokens mean
/// higher cosine, which is all the mock pipeline needs. Text with no
/// alphanumeric characters maps to bucket 0 so the norm stays non-zero.
class MockEmbedder : public Embedder {
public:
    static constexpr std::size_t kDimension = 8;

    EmbeddingVector embed(std::string_view text) override;
    std::string id() const override { return "mock:bag8"; }

    std::size_t calls() const { return calls_.load(); }

private:
    std::atomic<std::size_t> calls_{0};
};

/// cos angle = dot(a,b) / (|a| |b|), clamped to [-1, 1] against rounding
/// drift. Element-wise equal vectors compare as exactly 1. Dimension
/// mismatch and zero-norm inputs are errors.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

/// Flat (exhaustive) index over a passage set; immutable after build.
struct VectorIndex {
    std::string provider_id;
    std::vector<std::pair<std::string, EmbeddingVector>> entries; // ordinal order
};

/// One entry per passage, order preserved. Provider failures are rethrown
/// with the offending passage id attached.
VectorIndex build_index(const chunkers::PassageSet& passages, Embedder& embedder);

/// Passage ids by descending cosine to the query; ties break toward the
/// lower ordinal. `exclude` (the focus passage) is filtered before ranking.
/// Returns min(k, available) ids.
std::vector<std::string> top_k(const VectorIndex& index, const EmbeddingVector& query,
                               std::size_t k,
                               const std::optional<std::string>& exclude = std::nullopt);

} // namespace hope::embedding
