#include <doctest.h>

#include <array>
#include <set>

#include "hope/cache.hpp"
#include "hope/llm.hpp"
#include "hope/prompts.hpp"
#include "hope/rng.hpp"
#include "support.hpp"

using namespace hope;
using namespace hope::llm;
using hope::test::make_document;
using hope::test::ScriptedLlm;
using hope::test::TempDir;

namespace {

chunkers::Passage passage_of(std::string id, std::string text) {
    chunkers::Passage passage;
    passage.id = std::move(id);
    passage.document_id = "d";
    passage.text = std::move(text);
    return passage;
}

} // namespace

// ---------------------------------------------------------------------------
// parsers
// ---------------------------------------------------------------------------

TEST_CASE("parse_numbered_list strips numbering") {
    CHECK(parse_numbered_list("1. A\n2. B") == std::vector<std::string>{"A", "B"});
    CHECK(parse_numbered_list("1) First item\n2) Second item") ==
          std::vector<std::string>{"First item", "Second item"});
    CHECK(parse_numbered_list("- bullet one\n* bullet two") ==
          std::vector<std::string>{"bullet one", "bullet two"});
    CHECK(parse_numbered_list("1. Who is Joe?") == std::vector<std::string>{"Who is Joe?"});
}

TEST_CASE("parse_numbered_list drops content-free lines") {
    auto items = parse_numbered_list("1. Real statement\n\n2.\n3. ...\n!!!\n4. Another one");
    CHECK(items == std::vector<std::string>{"Real statement", "Another one"});
}

TEST_CASE("parse_numbered_list never yields empty strings") {
    const char* responses[] = {"", "\n\n\n", "junk\n1.\n2. x\n- \n*", "no numbering at all"};
    for (const char* response : responses) {
        for (const auto& item : parse_numbered_list(response)) {
            CHECK(!item.empty());
        }
    }
}

TEST_CASE("parse_quadruple reads labeled sections") {
    auto quadruple = parse_quadruple(
        "TRUE: The sky is blue.\nFALSE1: The sky is green.\nFALSE2: The sky is red.\n"
        "FALSE3: The sky is plaid.",
        "seg:0-2");
    REQUIRE(quadruple.has_value());
    CHECK(quadruple->true_statement == "The sky is blue.");
    CHECK(quadruple->false_statements[0] == "The sky is green.");
    CHECK(quadruple->false_statements[2] == "The sky is plaid.");
    CHECK(quadruple->segment_id == "seg:0-2");
}

TEST_CASE("parse_quadruple rejects missing, empty, or duplicate sections") {
    CHECK(!parse_quadruple("TRUE: a\nFALSE1: b\nFALSE2: c", "s").has_value());
    CHECK(!parse_quadruple("TRUE: \nFALSE1: b\nFALSE2: c\nFALSE3: d", "s").has_value());
    CHECK(!parse_quadruple("TRUE: a\nFALSE1: a\nFALSE2: c\nFALSE3: d", "s").has_value());
}

TEST_CASE("parse_option_letter fixtures") {
    CHECK(parse_option_letter("C") == 2);
    CHECK(parse_option_letter("c.") == 2);
    CHECK(parse_option_letter("(b)") == 1);
    CHECK(parse_option_letter("Answer: D") == 3);
    CHECK(parse_option_letter("A") == 0);
    CHECK(!parse_option_letter("").has_value());
    CHECK(!parse_option_letter("ACE").has_value());
    CHECK(!parse_option_letter("no letter here").has_value());
}

// ---------------------------------------------------------------------------
// mock provider contracts
// ---------------------------------------------------------------------------

TEST_CASE("mock statements return the first n sentences, cycling") {
    MockLlmProvider mock;
    auto focus = passage_of("d#0", "First fact. Second fact. Third fact.");
    auto statements = generate_statements(mock, focus, 2, 0.7);
    CHECK(statements == std::vector<std::string>{"First fact.", "Second fact."});

    auto one = passage_of("d#1", "Only sentence.");
    auto cycled = generate_statements(mock, one, 3, 0.7);
    CHECK(cycled ==
          std::vector<std::string>{"Only sentence.", "Only sentence.", "Only sentence."});
}

TEST_CASE("mock questions wrap sentences interrogatively") {
    MockLlmProvider mock;
    auto focus = passage_of("d#0", "Cats purr.");
    auto questions = generate_questions(mock, focus, 2, 0.7);
    REQUIRE(questions.size() == 2);
    CHECK(questions[0] == "According to the document, is it true that: Cats purr.?");
}

TEST_CASE("statement generation rejects bad counts and temperature") {
    MockLlmProvider mock;
    auto focus = passage_of("d#0", "Cats purr.");
    CHECK_THROWS_AS(generate_statements(mock, focus, 0, 0.7), Error);
    CHECK_THROWS_AS(generate_statements(mock, focus, 1, 0.7), Error);
    CHECK_THROWS_AS(generate_questions(mock, focus, 0, 0.7), Error);
    CHECK_THROWS_AS(generate_statements(mock, focus, 2, 0.0), Error);
}

TEST_CASE("mock answer_closed picks the max-overlap sentence") {
    MockLlmProvider mock;
    auto focus = passage_of("d#0", "Falcons migrate far. Ravens hoard objects. Herons wade.");
    CHECK(answer_closed(mock, "Do ravens hoard objects?", focus) == "Ravens hoard objects.");
    // nothing matches: fall back to the first sentence
    CHECK(answer_closed(mock, "completely unrelated query", focus) == "Falcons migrate far.");
}

TEST_CASE("mock answer_rag prefers strictly longer context overlap") {
    MockLlmProvider mock;
    auto focus = passage_of("d#0", "Ravens hoard objects.");
    auto sibling = passage_of("d#1", "Shiny ravens hoard many stolen objects at night.");

    // context sentence shares more question tokens than the focus sentence
    std::string question = "Do shiny ravens hoard many stolen objects at night?";
    CHECK(answer_rag(mock, question, focus, {&sibling}) ==
          "Shiny ravens hoard many stolen objects at night.");

    // empty context behaves as answer_closed
    CHECK(answer_rag(mock, question, focus, {}) == answer_closed(mock, question, focus));

    // ties stay with the focus
    auto twin = passage_of("d#2", "Ravens hoard objects.");
    CHECK(answer_rag(mock, "Do ravens hoard objects?", focus, {&twin}) ==
          "Ravens hoard objects.");
}

TEST_CASE("mock quadruple mutates the middle sentence") {
    MockLlmProvider mock;
    corpus::Segment segment;
    segment.document_id = "d";
    segment.sentence_indices = {0, 1, 2};
    segment.text = "Falcons migrate. The tower is 310 meters tall. Herons wade.";

    auto quadruple = generate_quadruple(mock, segment, 0.7);
    REQUIRE(quadruple.has_value());
    CHECK(quadruple->true_statement == "The tower is 310 meters tall.");
    CHECK(quadruple->false_statements[0] ==
          "It is not the case that The tower is 310 meters tall.");
    CHECK(quadruple->false_statements[1] == "The tower is 311 meters tall.");
    CHECK(quadruple->false_statements[2] == "tower The is 310 meters tall.");

    std::set<std::string> all{quadruple->true_statement, quadruple->false_statements[0],
                              quadruple->false_statements[1], quadruple->false_statements[2]};
    CHECK(all.size() == 4);
}

TEST_CASE("mock quadruple covers degenerate segments") {
    MockLlmProvider mock;
    corpus::Segment segment;
    segment.document_id = "d";
    segment.sentence_indices = {0};
    segment.text = "Only sentence without numbers.";

    auto quadruple = generate_quadruple(mock, segment, 0.7);
    REQUIRE(quadruple.has_value());
    CHECK(quadruple->true_statement == "Only sentence without numbers.");
    // no digits: the number mutation falls back to a prefix
    CHECK(quadruple->false_statements[1] ==
          "Reportedly, it is false that Only sentence without numbers.");
}

TEST_CASE("mock discriminate favors verbatim matches, then overlap, ties low") {
    MockLlmProvider mock;
    auto p0 = passage_of("d#0", "Ravens hoard shiny objects. The weather is mild.");
    std::array<std::string, 4> options = {
        "It is not the case that Ravens hoard shiny objects.",
        "Ravens hoard shiny objects.",
        "hoard Ravens shiny objects.",
        "Reportedly, it is false that Ravens hoard shiny objects.",
    };
    auto result = discriminate(mock, options, {&p0});
    REQUIRE(result.choice.has_value());
    CHECK(*result.choice == 1);
    CHECK(!result.parse_flagged);
}

TEST_CASE("scripted discriminate parses letters and retries once") {
    ScriptedLlm scripted;
    scripted.push(Task::Discriminate, "C");
    auto p0 = passage_of("d#0", "context");
    std::array<std::string, 4> options = {"one", "two", "three", "four"};
    auto result = discriminate(scripted, options, {&p0});
    CHECK(result.choice == 2);

    // first response unparseable, retry resolves
    scripted.push(Task::Discriminate, "mumble");
    scripted.push(Task::Discriminate, "the answer is (b)");
    result = discriminate(scripted, options, {&p0});
    CHECK(result.choice == 1);
    CHECK(result.parse_flagged);

    // both attempts unparseable: flagged, no choice
    scripted.push(Task::Discriminate, "???");
    scripted.push(Task::Discriminate, "still nothing");
    result = discriminate(scripted, options, {&p0});
    CHECK(!result.choice.has_value());
    CHECK(result.parse_flagged);
}

TEST_CASE("generate_statements tops up a short first response") {
    ScriptedLlm scripted;
    scripted.push(Task::Statements, "1. Alpha fact\n2.\n3. ...");
    scripted.push(Task::Statements, "1. Beta fact\n2. Gamma fact");
    auto focus = passage_of("d#0", "irrelevant");
    auto statements = generate_statements(scripted, focus, 3, 0.7);
    CHECK(statements == std::vector<std::string>{"Alpha fact", "Beta fact", "Gamma fact"});

    // still too short after the retry: error
    scripted.push(Task::Statements, "...");
    scripted.push(Task::Statements, "???");
    CHECK_THROWS_AS(generate_statements(scripted, focus, 3, 0.7), Error);
}

TEST_CASE("generate_quadruple skips segments after a failed retry") {
    ScriptedLlm scripted;
    scripted.push(Task::Quadruple, "no labels at all");
    scripted.push(Task::Quadruple, "still no labels");
    corpus::Segment segment;
    segment.document_id = "d";
    segment.sentence_indices = {0};
    segment.text = "Some text.";

    WarningLog warnings;
    auto quadruple = generate_quadruple(scripted, segment, 0.7, &warnings);
    CHECK(!quadruple.has_value());
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].code == "segment_skipped");
}

// ---------------------------------------------------------------------------
// prompt library
// ---------------------------------------------------------------------------

TEST_CASE("prompt templates render their placeholders") {
    auto prompts = PromptLibrary::defaults();
    auto rendered = prompts.render(Task::AnswerClosed,
                                   {{"question", "Why?"}, {"passage", "Because."}});
    CHECK(rendered.find("Why?") != std::string::npos);
    CHECK(rendered.find("Because.") != std::string::npos);
    CHECK(rendered.find("{question}") == std::string::npos);
    CHECK(rendered.find("{passage}") == std::string::npos);
}

TEST_CASE("prompt overrides must keep mandatory placeholders") {
    TempDir dir("prompts");
    test::write_file(dir.path() / "statements.txt", "write {count} things about {passage}");
    auto prompts = PromptLibrary::defaults();
    prompts.load_overrides(dir.path());
    CHECK(prompts.template_for(Task::Statements) == "write {count} things about {passage}");

    test::write_file(dir.path() / "questions.txt", "no placeholders here");
    CHECK_THROWS_AS(prompts.load_overrides(dir.path()), Error);
}

// ---------------------------------------------------------------------------
// cache
// ---------------------------------------------------------------------------

TEST_CASE("cache round-trip stops provider calls and is byte-identical") {
    TempDir dir("cache");
    ResponseCache cache(dir.path() / "cache.jsonl");
    MockLlmProvider mock;
    CachingLlmProvider cached(mock, &cache);

    auto focus = passage_of("d#0", "First fact. Second fact.");
    auto first = generate_statements(cached, focus, 2, 0.7);
    auto calls_after_first = mock.calls();
    CHECK(calls_after_first > 0);

    auto second = generate_statements(cached, focus, 2, 0.7);
    CHECK(second == first);
    CHECK(mock.calls() == calls_after_first); // all hits

    // reopening replays the JSONL file
    ResponseCache reopened(dir.path() / "cache.jsonl");
    CHECK(reopened.size() == cache.size());
    CachingLlmProvider cached_again(mock, &reopened);
    auto third = generate_statements(cached_again, focus, 2, 0.7);
    CHECK(third == first);
    CHECK(mock.calls() == calls_after_first);
}

TEST_CASE("cache keys distinguish task, parts, temperature, and sample") {
    auto base = ResponseCache::make_key("p", "statements", {{"passage", "x"}}, 0.7, 0);
    CHECK(base == ResponseCache::make_key("p", "statements", {{"passage", "x"}}, 0.7, 0));
    CHECK(base != ResponseCache::make_key("q", "statements", {{"passage", "x"}}, 0.7, 0));
    CHECK(base != ResponseCache::make_key("p", "questions", {{"passage", "x"}}, 0.7, 0));
    CHECK(base != ResponseCache::make_key("p", "statements", {{"passage", "y"}}, 0.7, 0));
    CHECK(base != ResponseCache::make_key("p", "statements", {{"passage", "x"}}, 0.0, 0));
    CHECK(base != ResponseCache::make_key("p", "statements", {{"passage", "x"}}, 0.7, 1));
}

TEST_CASE("embedding cache returns identical vectors without provider calls") {
    TempDir dir("embed-cache");
    ResponseCache cache(dir.path() / "cache.jsonl");
    embedding::MockEmbedder mock;
    CachingEmbedder cached(mock, &cache);

    auto first = cached.embed("ravens hoard objects");
    CHECK(mock.calls() == 1);
    auto second = cached.embed("ravens hoard objects");
    CHECK(mock.calls() == 1);
    CHECK(first == second);
}

// ---------------------------------------------------------------------------
// shuffle fairness
// ---------------------------------------------------------------------------

TEST_CASE("option shuffling holds the true statement at each position fairly") {
    // 1000 shuffles with per-round child seeds; the true statement should
    // land on each of the four positions between 20% and 30% of the time
    SeededRng meta(12345);
    std::array<std::size_t, 4> positions{};
    for (int round = 0; round < 1000; ++round) {
        SeededRng rng(meta.next());
        std::array<std::size_t, 4> order{0, 1, 2, 3};
        rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t slot = 0; slot < 4; ++slot) {
            if (order[slot] == 0) ++positions[slot];
        }
    }
    for (std::size_t count : positions) {
        CHECK(count >= 200);
        CHECK(count <= 300);
    }
}
