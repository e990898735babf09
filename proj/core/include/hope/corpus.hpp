#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hope/errors.hpp"
#include "hope/rng.hpp"

namespace hope::corpus {

/// Half-open character range [begin, end) into a document's text.
struct SentenceSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool operator==(const SentenceSpan&) const = default;
};

struct Document {
    std::string id;   // forward-slash path relative to the corpus root
    std::string text; // full UTF-8 content
    std::vector<SentenceSpan> sentences;

    std::string_view sentence(std::size_t index) const {
        const auto& span = sentences.at(index);
        return std::string_view(text).substr(span.begin, span.end - span.begin);
    }
};

/// A window of (normally three) consecutive sentences, the sampling unit
/// for information preservation.
struct Segment {
    std::string document_id;
    std::vector<std::size_t> sentence_indices;
    std::string text;

    /// Stable identifier, e.g. "doc.txt:2-4".
    std::string id() const;
};

/// Splits text into sentence spans.
///
/// A boundary is placed after '.', '!' or '?' when followed by whitespace
/// and then an ASCII uppercase letter, a digit, or end of text. A blank
/// line ("\n\n") always ends a sentence. No break happens when the token
/// before a period is a single uppercase letter or one of
/// {Mr, Mrs, Dr, Prof, Fig, Eq, et al, e.g, i.e}. Trailing text without a
/// terminator forms a final sentence. Spans are trimmed of surrounding
/// whitespace; the gaps between them are whitespace only.
std::vector<SentenceSpan> split_sentences(std::string_view text);

/// Loads every .txt/.md file under root (recursively) as a Document, ordered
/// lexicographically by id. Unreadable or non-UTF-8 files are skipped with a
/// warning; an unreadable root is fatal.
std::vector<Document> load_corpus(const std::filesystem::path& root, WarningLog& warnings);

/// Draws `count` three-sentence segments (with replacement) whose start
/// index is uniform over [0, |sentences| - 3]. Documents with fewer than
/// three sentences degrade to whole-document segments plus a warning.
std::vector<Segment> sample_segments(const Document& doc, std::size_t count, SeededRng& rng,
                                     WarningLog* warnings = nullptr);

/// Child seed for per-document work: seed XOR fnv1a64(doc id).
std::uint64_t document_seed(std::uint64_t run_seed, std::string_view document_id);

} // namespace hope::corpus
