#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hope/corpus.hpp"

namespace hope::embedding {
class Embedder;
}

namespace hope::chunkers {

struct CharSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const CharSpan&) const = default;
};

/// One retrieval unit produced by a chunking transformation.
/// text is non-empty and whitespace-trimmed. char_span, when present,
/// covers the raw region of the source the passage was cut from (it may be
/// wider than the trimmed text).
struct Passage {
    std::string id; // "<doc_id>#<ordinal>"
    std::string document_id;
    std::string text;
    std::optional<CharSpan> char_span;
};

struct PassageSet {
    std::string document_id;
    std::string chunker_id;
    std::vector<Passage> passages;
};

enum class ChunkerKind { Fixed, Recursive, Semantic };

struct ChunkerConfig {
    ChunkerKind kind = ChunkerKind::Fixed;
    std::size_t passage_size = 2000;      // fixed only
    std::size_t overlap_size = 0;         // fixed only, < passage_size
    std::size_t max_size = 2000;          // recursive / semantic
    double breakpoint_percentile = 95.0;  // semantic only, in (0, 100)

    /// "fixed_s2000_o500", "recursive_s500", "semantic_p95".
    std::string id() const;

    /// Throws a usage error naming the offending field.
    void validate() const;
};

/// Character windows of passage_size at stride passage_size - overlap_size.
/// The final window is truncated at the document end; a trailing window that
/// adds no new characters is dropped.
PassageSet chunk_fixed(const corpus::Document& doc, std::size_t passage_size,
                       std::size_t overlap_size);

inline const std::vector<std::string> kRecursiveDelimiters = {"\n\n", "\n", ". ", " "};

/// Splits on delimiters in priority order (paragraphs, lines, sentences,
/// words), hard-cutting pieces with no applicable delimiter, then greedily
/// re-merges adjacent pieces while the merged text stays within max_size.
PassageSet chunk_recursive(const corpus::Document& doc, std::size_t max_size,
                           const std::vector<std::string>& delimiters = kRecursiveDelimiters);

/// Embeds each sentence, places breakpoints where the cosine distance
/// between consecutive sentences exceeds the given percentile of all
/// consecutive distances, merges between breakpoints, and recursively
/// splits any passage over max_size.
PassageSet chunk_semantic(const corpus::Document& doc, embedding::Embedder& embedder,
                          double breakpoint_percentile, std::size_t max_size);

/// Dispatch on config.kind; embedder is required for semantic chunking.
PassageSet chunk(const corpus::Document& doc, const ChunkerConfig& config,
                 embedding::Embedder* embedder = nullptr);

} // namespace hope::chunkers
