#include "hope/chunkers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hope/embedding.hpp"

namespace hope::chunkers {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Trims [begin, end) against the enclosing text; nullopt when nothing is left.
std::optional<CharSpan> trimmed(std::string_view text, std::size_t begin, std::size_t end) {
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    if (begin >= end) return std::nullopt;
    return CharSpan{begin, end};
}

std::size_t trimmed_length(std::string_view text, std::size_t begin, std::size_t end) {
    auto span = trimmed(text, begin, end);
    return span ? span->end - span->begin : 0;
}

PassageSet finalize(const corpus::Document& doc, std::string chunker_id,
                    const std::vector<CharSpan>& raw_spans) {
    PassageSet set;
    set.document_id = doc.id;
    set.chunker_id = std::move(chunker_id);
    for (const CharSpan& raw : raw_spans) {
        auto content = trimmed(doc.text, raw.begin, raw.end);
        if (!content) continue; // nothing but whitespace
        Passage passage;
        passage.document_id = doc.id;
        passage.id = doc.id + "#" + std::to_string(set.passages.size());
        passage.text = doc.text.substr(content->begin, content->end - content->begin);
        passage.char_span = raw;
        set.passages.push_back(std::move(passage));
    }
    if (set.passages.empty()) {
        throw data_error("chunking produced no passages for document '" + doc.id + "'");
    }
    return set;
}

void require_content(const corpus::Document& doc) {
    if (trimmed_length(doc.text, 0, doc.text.size()) == 0) {
        throw data_error("cannot chunk empty document '" + doc.id + "'");
    }
}

// Recursive splitter core, shared by chunk_recursive and the semantic
// overflow path. Splits [begin, end) until every piece's trimmed text fits
// max_size, trying delimiters in priority order and hard-cutting when none
// applies.
void split_piece(std::string_view text, std::size_t begin, std::size_t end, std::size_t max_size,
                 const std::vector<std::string>& delimiters, std::size_t level,
                 std::vector<CharSpan>& out) {
    if (trimmed_length(text, begin, end) <= max_size) {
        out.push_back({begin, end});
        return;
    }
    if (level >= delimiters.size()) {
        auto content = trimmed(text, begin, end);
        std::size_t cursor = content->begin;
        while (cursor < content->end) {
            std::size_t cut = std::min(cursor + max_size, content->end);
            out.push_back({cursor, cut});
            cursor = cut;
        }
        return;
    }

    const std::string& delimiter = delimiters[level];
    std::string_view slice = text.substr(begin, end - begin);
    if (slice.find(delimiter) == std::string_view::npos) {
        split_piece(text, begin, end, max_size, delimiters, level + 1, out);
        return;
    }

    std::size_t cursor = 0;
    while (cursor < slice.size()) {
        std::size_t hit = slice.find(delimiter, cursor);
        std::size_t stop = hit == std::string_view::npos ? slice.size() : hit + delimiter.size();
        split_piece(text, begin + cursor, begin + stop, max_size, delimiters, level + 1, out);
        cursor = stop;
    }
}

// Greedy in-order re-merge: extend the current piece while the merged
// trimmed text still fits.
std::vector<CharSpan> merge_adjacent(std::string_view text, const std::vector<CharSpan>& pieces,
                                     std::size_t max_size) {
    std::vector<CharSpan> merged;
    for (const CharSpan& piece : pieces) {
        if (!merged.empty() &&
            trimmed_length(text, merged.back().begin, piece.end) <= max_size) {
            merged.back().end = piece.end;
        } else {
            merged.push_back(piece);
        }
    }
    return merged;
}

std::string format_percentile(double p) {
    double rounded = std::round(p);
    if (std::abs(p - rounded) < 1e-9) return std::to_string(static_cast<long long>(rounded));
    std::ostringstream out;
    out << p;
    return out.str();
}

// Linear-interpolation percentile over the raw values.
double percentile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    if (values.size() == 1) return values.front();
    double rank = (p / 100.0) * static_cast<double>(values.size() - 1);
    auto low = static_cast<std::size_t>(rank);
    if (low + 1 >= values.size()) return values.back();
    double fraction = rank - static_cast<double>(low);
    return values[low] + fraction * (values[low + 1] - values[low]);
}

} // namespace

std::string ChunkerConfig::id() const {
    switch (kind) {
        case ChunkerKind::Fixed:
            return "fixed_s" + std::to_string(passage_size) + "_o" + std::to_string(overlap_size);
        case ChunkerKind::Recursive:
            return "recursive_s" + std::to_string(max_size);
        case ChunkerKind::Semantic:
            return "semantic_p" + format_percentile(breakpoint_percentile);
    }
    return "unknown";
}

void ChunkerConfig::validate() const {
    switch (kind) {
        case ChunkerKind::Fixed:
            if (passage_size < 1) throw usage_error("chunkers[].passage_size must be >= 1");
            if (overlap_size >= passage_size)
                throw usage_error("chunkers[].overlap_size must be < passage_size");
            break;
        case ChunkerKind::Recursive:
            if (max_size < 1) throw usage_error("chunkers[].max_size must be >= 1");
            break;
        case ChunkerKind::Semantic:
            if (max_size < 1) throw usage_error("chunkers[].max_size must be >= 1");
            if (!(breakpoint_percentile > 0.0 && breakpoint_percentile < 100.0))
                throw usage_error("chunkers[].breakpoint_percentile must be in (0, 100)");
            break;
    }
}

PassageSet chunk_fixed(const corpus::Document& doc, std::size_t passage_size,
                       std::size_t overlap_size) {
    if (passage_size < 1) throw usage_error("chunk_fixed: passage_size must be >= 1");
    if (overlap_size >= passage_size)
        throw usage_error("chunk_fixed: overlap_size must be < passage_size");
    require_content(doc);

    const std::size_t length = doc.text.size();
    const std::size_t stride = passage_size - overlap_size;

    std::vector<CharSpan> windows;
    for (std::size_t start = 0; start < length; start += stride) {
        std::size_t end = std::min(start + passage_size, length);
        windows.push_back({start, end});
        // Any further window would be contained in this one.
        if (end == length) break;
    }

    ChunkerConfig config{.kind = ChunkerKind::Fixed,
                         .passage_size = passage_size,
                         .overlap_size = overlap_size};
    return finalize(doc, config.id(), windows);
}

PassageSet chunk_recursive(const corpus::Document& doc, std::size_t max_size,
                           const std::vector<std::string>& delimiters) {
    if (max_size < 1) throw usage_error("chunk_recursive: max_size must be >= 1");
    require_content(doc);

    std::vector<CharSpan> pieces;
    split_piece(doc.text, 0, doc.text.size(), max_size, delimiters, 0, pieces);
    pieces = merge_adjacent(doc.text, pieces, max_size);

    ChunkerConfig config{.kind = ChunkerKind::Recursive, .max_size = max_size};
    return finalize(doc, config.id(), pieces);
}

PassageSet chunk_semantic(const corpus::Document& doc, embedding::Embedder& embedder,
                          double breakpoint_percentile, std::size_t max_size) {
    if (max_size < 1) throw usage_error("chunk_semantic: max_size must be >= 1");
    if (!(breakpoint_percentile > 0.0 && breakpoint_percentile < 100.0))
        throw usage_error("chunk_semantic: breakpoint_percentile must be in (0, 100)");
    require_content(doc);
    if (doc.sentences.empty())
        throw data_error("chunk_semantic: document '" + doc.id + "' has no sentences");

    const auto& sentences = doc.sentences;

    std::vector<embedding::EmbeddingVector> vectors;
    vectors.reserve(sentences.size());
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        vectors.push_back(embedder.embed(doc.sentence(i)));
    }

    // Cosine distance between consecutive sentences; a gap whose distance
    // exceeds the percentile of all gaps becomes a breakpoint.
    std::vector<double> distances;
    distances.reserve(sentences.size() > 0 ? sentences.size() - 1 : 0);
    for (std::size_t i = 0; i + 1 < sentences.size(); ++i) {
        distances.push_back(1.0 - embedding::cosine(vectors[i], vectors[i + 1]));
    }

    std::vector<CharSpan> groups;
    if (distances.empty()) {
        groups.push_back({sentences.front().begin, sentences.front().end});
    } else {
        double threshold = percentile(distances, breakpoint_percentile);
        std::size_t group_start = 0;
        for (std::size_t i = 0; i < distances.size(); ++i) {
            if (distances[i] > threshold) {
                groups.push_back({sentences[group_start].begin, sentences[i].end});
                group_start = i + 1;
            }
        }
        groups.push_back({sentences[group_start].begin, sentences.back().end});
    }

    // Oversize groups fall back to the recursive splitting rules.
    std::vector<CharSpan> pieces;
    for (const CharSpan& group : groups) {
        if (trimmed_length(doc.text, group.begin, group.end) <= max_size) {
            pieces.push_back(group);
            continue;
        }
        std::vector<CharSpan> split;
        split_piece(doc.text, group.begin, group.end, max_size, kRecursiveDelimiters, 0, split);
        split = merge_adjacent(doc.text, split, max_size);
        pieces.insert(pieces.end(), split.begin(), split.end());
    }

    ChunkerConfig config{.kind = ChunkerKind::Semantic,
                         .max_size = max_size,
                         .breakpoint_percentile = breakpoint_percentile};
    return finalize(doc, config.id(), pieces);
}

PassageSet chunk(const corpus::Document& doc, const ChunkerConfig& config,
                 embedding::Embedder* embedder) {
    config.validate();
    switch (config.kind) {
        case ChunkerKind::Fixed:
            return chunk_fixed(doc, config.passage_size, config.overlap_size);
        case ChunkerKind::Recursive:
            return chunk_recursive(doc, config.max_size);
        case ChunkerKind::Semantic:
            if (embedder == nullptr)
                throw usage_error("semantic chunking requires an embedding provider");
            return chunk_semantic(doc, *embedder, config.breakpoint_percentile, config.max_size);
    }
    throw usage_error("unknown chunker kind");
}

} // namespace hope::chunkers
