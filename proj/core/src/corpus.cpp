#include "hope/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <sstream>

#include "hope/hashing.hpp"

namespace hope::corpus {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_upper(char c) {
    return c >= 'A' && c <= 'Z';
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

bool is_word_char(char c) {
    return is_upper(c) || is_digit(c) || (c >= 'a' && c <= 'z');
}

// True when the text before a period ends in something that should not
// terminate a sentence: a single uppercase initial ("J. Smith") or a known
// abbreviation.
bool guarded_abbreviation(std::string_view before) {
    static constexpr std::array<std::string_view, 9> kGuards = {
        "Mr", "Mrs", "Dr", "Prof", "Fig", "Eq", "et al", "e.g", "i.e"};

    for (std::string_view guard : kGuards) {
        if (before.size() < guard.size()) continue;
        if (before.substr(before.size() - guard.size()) != guard) continue;
        std::size_t at = before.size() - guard.size();
        if (at == 0 || !is_word_char(before[at - 1])) return true;
    }
    if (!before.empty() && is_upper(before.back())) {
        if (before.size() == 1 || !is_word_char(before[before.size() - 2])) return true;
    }
    return false;
}

std::optional<SentenceSpan> trimmed_span(std::string_view text, std::size_t begin,
                                         std::size_t end) {
    while (begin < end && is_space(text[begin])) ++begin;
    while (end > begin && is_space(text[end - 1])) --end;
    if (begin >= end) return std::nullopt;
    return SentenceSpan{begin, end};
}

bool valid_utf8(std::string_view bytes) {
    std::size_t i = 0;
    while (i < bytes.size()) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        std::size_t extra;
        unsigned minimum;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            extra = 1;
            minimum = 0x80;
        } else if ((c & 0xf0) == 0xe0) {
            extra = 2;
            minimum = 0x800;
        } else if ((c & 0xf8) == 0xf0) {
            extra = 3;
            minimum = 0x10000;
        } else {
            return false;
        }
        if (i + extra >= bytes.size()) return false;
        unsigned code = c & (0x3f >> extra);
        for (std::size_t k = 1; k <= extra; ++k) {
            unsigned char cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xc0) != 0x80) return false;
            code = (code << 6) | (cc & 0x3f);
        }
        if (code < minimum || code > 0x10ffff || (code >= 0xd800 && code <= 0xdfff)) return false;
        i += extra + 1;
    }
    return true;
}

bool whitespace_only(std::string_view text) {
    return std::all_of(text.begin(), text.end(), [](char c) { return is_space(c); });
}

} // namespace

std::string Segment::id() const {
    std::string out = document_id;
    out += ':';
    out += std::to_string(sentence_indices.front());
    out += '-';
    out += std::to_string(sentence_indices.back());
    return out;
}

std::vector<SentenceSpan> split_sentences(std::string_view text) {
    std::vector<SentenceSpan> spans;
    const std::size_t n = text.size();
    std::size_t segment_start = 0;

    auto cut = [&](std::size_t begin, std::size_t end) {
        if (auto span = trimmed_span(text, begin, end)) spans.push_back(*span);
    };

    for (std::size_t i = 0; i < n; ++i) {
        char c = text[i];

        // A blank line always ends the sentence, terminator or not.
        if (c == '\n' && i + 1 < n && text[i + 1] == '\n') {
            cut(segment_start, i);
            std::size_t j = i;
            while (j < n && is_space(text[j])) ++j;
            segment_start = j;
            i = j == 0 ? 0 : j - 1;
            continue;
        }

        if (c != '.' && c != '!' && c != '?') continue;
        if (c == '.' && guarded_abbreviation(text.substr(segment_start, i - segment_start)))
            continue;
        if (i + 1 >= n) break; // final segment handles the tail
        if (!is_space(text[i + 1])) continue;

        std::size_t j = i + 1;
        while (j < n && is_space(text[j])) ++j;
        if (j < n && !is_upper(text[j]) && !is_digit(text[j])) continue;

        cut(segment_start, i + 1);
        segment_start = j;
        i = j == 0 ? 0 : j - 1;
    }

    if (segment_start < n) cut(segment_start, n);
    return spans;
}

std::vector<Document> load_corpus(const std::filesystem::path& root, WarningLog& warnings) {
    namespace fs = std::filesystem;

    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw io_error("corpus root is not a readable directory: " + root.string());
    }

    std::vector<std::pair<std::string, fs::path>> files;
    fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
    if (ec) throw io_error("cannot iterate corpus root " + root.string() + ": " + ec.message());
    for (const auto& entry : it) {
        if (!entry.is_regular_file(ec)) continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (ext != ".txt" && ext != ".md") continue;
        files.emplace_back(fs::relative(entry.path(), root).generic_string(), entry.path());
    }
    std::sort(files.begin(), files.end());

    if (files.empty()) {
        warnings.push_back({"empty_corpus", "", "", "no .txt/.md files under " + root.string()});
        return {};
    }

    std::vector<Document> documents;
    documents.reserve(files.size());
    for (const auto& [id, path] : files) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            warnings.push_back({"unreadable_file", id, "", "cannot open " + path.string()});
            continue;
        }
        std::ostringstream buffer;
        buffer << in.rdbuf();
        if (in.bad()) {
            warnings.push_back({"unreadable_file", id, "", "read failure on " + path.string()});
            continue;
        }
        std::string text = std::move(buffer).str();
        if (!valid_utf8(text)) {
            warnings.push_back({"invalid_utf8", id, "", "file is not valid UTF-8, skipped"});
            continue;
        }
        if (text.empty() || whitespace_only(text)) {
            warnings.push_back({"empty_document", id, "", "file has no content, skipped"});
            continue;
        }
        Document doc;
        doc.id = id;
        doc.text = std::move(text);
        doc.sentences = split_sentences(doc.text);
        documents.push_back(std::move(doc));
    }
    return documents;
}

std::vector<Segment> sample_segments(const Document& doc, std::size_t count, SeededRng& rng,
                                     WarningLog* warnings) {
    if (count == 0) throw usage_error("sample_segments: count must be >= 1");
    if (doc.sentences.empty())
        throw data_error("sample_segments: document '" + doc.id + "' has no sentences");

    const std::size_t total = doc.sentences.size();

    auto make_segment = [&](std::size_t first, std::size_t last) {
        Segment segment;
        segment.document_id = doc.id;
        for (std::size_t k = first; k <= last; ++k) segment.sentence_indices.push_back(k);
        std::size_t begin = doc.sentences[first].begin;
        std::size_t end = doc.sentences[last].end;
        segment.text = doc.text.substr(begin, end - begin);
        return segment;
    };

    std::vector<Segment> segments;
    segments.reserve(count);

    if (total < 3) {
        if (warnings)
            warnings->push_back({"short_document", doc.id, "",
                                 "document has " + std::to_string(total) +
                                     " sentences; segments cover the whole document"});
        for (std::size_t i = 0; i < count; ++i) segments.push_back(make_segment(0, total - 1));
        return segments;
    }

    const std::uint64_t range = total - 2; // legal starts: [0, total - 3]
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t start = static_cast<std::size_t>(rng.draw(range));
        segments.push_back(make_segment(start, start + 2));
    }
    return segments;
}

std::uint64_t document_seed(std::uint64_t run_seed, std::string_view document_id) {
    return run_seed ^ fnv1a64(document_id);
}

} // namespace hope::corpus
