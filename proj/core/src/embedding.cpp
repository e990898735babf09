#include "hope/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hope/hashing.hpp"

namespace hope::embedding {

EmbeddingVector MockEmbedder::embed(std::string_view text) {
    if (text.empty()) throw data_error("embed: text must be non-empty");
    calls_.fetch_add(1);

    EmbeddingVector counts(kDimension, 0.0);
    std::string token;
    bool any = false;
    auto flush = [&] {
        if (token.empty()) return;
        counts[fnv1a64(token) % kDimension] += 1.0;
        token.clear();
        any = true;
    };
    for (char c : text) {
        if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) {
            token += c;
        } else if (c >= 'A' && c <= 'Z') {
            token += static_cast<char>(c - 'A' + 'a');
        } else {
            flush();
        }
    }
    flush();
    if (!any) counts[0] = 1.0; // keep the norm non-zero for symbol-only text

    double norm = std::sqrt(std::inner_product(counts.begin(), counts.end(), counts.begin(), 0.0));
    for (double& value : counts) value /= norm;
    return counts;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size()) {
        throw data_error("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw data_error("cosine: empty vectors");
    if (a == b) {
        // Identical vectors are exactly parallel; do not let rounding say 0.9999...
        double norm_sq = std::inner_product(a.begin(), a.end(), a.begin(), 0.0);
        if (norm_sq == 0.0) throw data_error("cosine: zero-norm vector");
        return 1.0;
    }

    double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        norm_a += a[i] * a[i];
        norm_b += b[i] * b[i];
    }
    if (norm_a == 0.0 || norm_b == 0.0) throw data_error("cosine: zero-norm vector");
    double value = dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
    return std::clamp(value, -1.0, 1.0);
}

VectorIndex build_index(const chunkers::PassageSet& passages, Embedder& embedder) {
    if (passages.passages.empty()) throw data_error("build_index: empty passage set");
    VectorIndex index;
    index.provider_id = embedder.id();
    index.entries.reserve(passages.passages.size());
    for (const auto& passage : passages.passages) {
        try {
            index.entries.emplace_back(passage.id, embedder.embed(passage.text));
        } catch (const Error& e) {
            throw Error(e.kind(),
                        "embedding failed for passage '" + passage.id + "': " + e.what());
        }
    }
    return index;
}

std::vector<std::string> top_k(const VectorIndex& index, const EmbeddingVector& query,
                               std::size_t k, const std::optional<std::string>& exclude) {
    if (k < 1) throw usage_error("top_k: k must be >= 1");

    // ordinal carried through a stable sort gives the tie-break for free
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(index.entries.size());
    for (std::size_t i = 0; i < index.entries.size(); ++i) {
        if (exclude && index.entries[i].first == *exclude) continue;
        scored.emplace_back(cosine(index.entries[i].second, query), i);
    }
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& lhs, const auto& rhs) { return lhs.first > rhs.first; });

    std::vector<std::string> ids;
    ids.reserve(std::min(k, scored.size()));
    for (std::size_t i = 0; i < scored.size() && i < k; ++i) {
        ids.push_back(index.entries[scored[i].second].first);
    }
    return ids;
}

} // namespace hope::embedding
