#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hope/chunkers.hpp"
#include "hope/corpus.hpp"
#include "hope/errors.hpp"
#include "hope/prompts.hpp"

namespace hope::llm {

/// One provider call. prompt_parts are ordered named text fields; HTTP
/// providers render them through the task's template, the mock provider
/// consumes them structurally. sample_index distinguishes repeated draws of
/// the same prompt in the cache.
struct GenerationRequest {
    Task task = Task::Statements;
    std::vector<std::pair<std::string, std::string>> prompt_parts;
    double temperature = 0.0;
    int sample_index = 0;
    std::optional<std::uint64_t> seed; // mock only
};

class LlmProvider {
public:
    virtual ~LlmProvider() = default;

    /// Returns raw response text; throws a provider error on failure.
    virtual std::string generate(const GenerationRequest& request) = 0;

    virtual std::string id() const = 0;
};

/// One verifiable-true statement plus three plausible-but-false mutations,
/// derived from a document segment. All four are non-empty and pairwise
/// distinct.
struct Quadruple {
    std::string true_statement;
    std::array<std::string, 3> false_statements;
    std::string segment_id;
};

// ---------------------------------------------------------------------------
// Response parsers (shared by mock and live providers)
// ---------------------------------------------------------------------------

/// Parses a numbered or bulleted list, dropping numbering, empty lines, and
/// lines shorter than three characters. Never yields empty strings.
std::vector<std::string> parse_numbered_list(std::string_view response);

/// Parses TRUE:/FALSE1:/FALSE2:/FALSE3: labeled sections. Returns nullopt
/// when a section is missing, empty, or the four statements are not
/// pairwise distinct.
std::optional<Quadruple> parse_quadruple(std::string_view response, std::string segment_id);

/// Extracts a single A-D answer letter (case-insensitive, ignoring
/// punctuation such as "C." or "(c)"). Returns the 0-3 index.
std::optional<int> parse_option_letter(std::string_view response);

// ---------------------------------------------------------------------------
// Prompt tasks
// ---------------------------------------------------------------------------

/// Generates n standalone statements about the passage at non-zero
/// temperature. If the first response parses short, one regeneration tops it
/// up; fewer than two parseable statements is an error.
std::vector<std::string> generate_statements(LlmProvider& llm, const chunkers::Passage& passage,
                                             std::size_t n, double temperature);

/// As generate_statements, but interrogative outputs.
std::vector<std::string> generate_questions(LlmProvider& llm, const chunkers::Passage& passage,
                                            std::size_t n, double temperature);

/// Answer from the focus passage alone, at temperature 0.
std::string answer_closed(LlmProvider& llm, std::string_view question,
                          const chunkers::Passage& focus);

/// Answer from focus plus retrieved context (focus first, context in
/// retrieval order), at temperature 0. An empty context behaves as
/// answer_closed.
std::string answer_rag(LlmProvider& llm, std::string_view question,
                       const chunkers::Passage& focus,
                       const std::vector<const chunkers::Passage*>& context);

/// Builds the true/false quadruple for a segment. Parse failures retry once
/// with a fresh sample; persistent failure returns nullopt and records a
/// warning so the segment can be skipped.
std::optional<Quadruple> generate_quadruple(LlmProvider& llm, const corpus::Segment& segment,
                                            double temperature, WarningLog* warnings = nullptr);

struct DiscriminationResult {
    std::optional<int> choice; // nullopt: unparseable even after retry
    bool parse_flagged = false;
};

/// Asks which of four (already shuffled) statements is supported by the
/// context. An unresolved parse counts as incorrect upstream.
DiscriminationResult discriminate(LlmProvider& llm, const std::array<std::string, 4>& options,
                                  const std::vector<const chunkers::Passage*>& context);

// ---------------------------------------------------------------------------
// Mock provider
// ---------------------------------------------------------------------------

/// Deterministic provider for offline runs and tests. Its per-task contract:
///  - statements: the passage's first n sentences, cycling when fewer.
///  - questions:  "According to the document, is it true that: <sentence i>?"
///  - answer_closed: the focus sentence with maximal token overlap with the
///    question (ties toward the earliest; zero overlap falls back to the
///    first sentence).
///  - answer_rag: the focus answer, unless a context sentence has strictly
///    larger token overlap with the question, in which case that sentence.
///  - quadruple: the segment's middle sentence verbatim as TRUE; FALSE
///    statements are a negation prefix, a number increment (or a
///    "Reportedly, it is false that" prefix when no number exists), and a
///    swap of the first two words (or an "In contrast," prefix when that
///    would not change the text).
///  - discriminate: the option appearing verbatim in the context wins;
///    otherwise the option with the largest fraction of its tokens present
///    in the context. Ties pick the lowest index.
/// Responses are emitted in the same wire shapes live providers use, so the
/// shared parsers stay exercised.
class MockLlmProvider : public LlmProvider {
public:
    std::string generate(const GenerationRequest& request) override;
    std::string id() const override { return "mock:llm"; }

    std::size_t calls() const { return calls_.load(); }

private:
    std::atomic<std::size_t> calls_{0};
};

} // namespace hope::llm
