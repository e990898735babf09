#include <doctest.h>

#include "hope/config.hpp"
#include "support.hpp"

using namespace hope;
using namespace hope::run;
using hope::test::TempDir;

namespace {

std::string minimal_config() {
    return R"({
        "corpus_dir": "corpus",
        "output_dir": "out",
        "chunkers": [{"kind": "fixed", "passage_size": 100, "overlap_size": 10}]
    })";
}

} // namespace

TEST_CASE("config parses with defaults filled") {
    auto config = RunConfig::from_json_text(minimal_config());
    CHECK(config.corpus_dir == "corpus");
    CHECK(config.llm.kind == "mock");
    CHECK(config.llm.temperature == 0.7);
    CHECK(config.embedder.kind == "mock");
    CHECK(config.metrics.statements_per_passage == 5);
    CHECK(config.metrics.questions_per_passage == 5);
    CHECK(config.metrics.segments_per_document == 20);
    CHECK(config.metrics.retrieval_k == 3);
    CHECK(config.seed == 0);
    CHECK(config.concurrency == 4);
}

TEST_CASE("config rejects unknown fields with the field path") {
    auto bad = R"({
        "corpus_dir": "c", "output_dir": "o",
        "chunkers": [{"kind": "fixed"}],
        "providers": {"llm": {"kind": "mock", "tempratuer": 1}}
    })";
    try {
        RunConfig::from_json_text(bad);
        FAIL("expected a usage error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Usage);
        CHECK(std::string(e.what()).find("providers.llm.tempratuer") != std::string::npos);
    }
}

TEST_CASE("config rejects structural mistakes") {
    CHECK_THROWS_AS(RunConfig::from_json_text("not json"), Error);
    CHECK_THROWS_AS(RunConfig::from_json_text("[]"), Error);
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"corpus_dir":"c","output_dir":"o"})"), Error);
    CHECK_THROWS_AS(RunConfig::from_json_text(
                        R"({"corpus_dir":"c","output_dir":"o","chunkers":[]})"),
                    Error);
    CHECK_THROWS_AS(
        RunConfig::from_json_text(
            R"({"corpus_dir":"c","output_dir":"o","chunkers":[{"kind":"sideways"}]})"),
        Error);
    // overlap >= passage size violates the chunker invariant
    CHECK_THROWS_AS(
        RunConfig::from_json_text(
            R"({"corpus_dir":"c","output_dir":"o",
                "chunkers":[{"kind":"fixed","passage_size":500,"overlap_size":500}]})"),
        Error);
    // generation temperature must be non-zero
    CHECK_THROWS_AS(
        RunConfig::from_json_text(
            R"({"corpus_dir":"c","output_dir":"o","chunkers":[{"kind":"fixed"}],
                "providers":{"llm":{"kind":"mock","temperature":0.0}}})"),
        Error);
    // http providers need endpoints
    CHECK_THROWS_AS(
        RunConfig::from_json_text(
            R"({"corpus_dir":"c","output_dir":"o","chunkers":[{"kind":"fixed"}],
                "providers":{"llm":{"kind":"http"}}})"),
        Error);
}

TEST_CASE("config hash changes iff a field changes") {
    auto base = RunConfig::from_json_text(minimal_config());
    auto same = RunConfig::from_json_text(minimal_config());
    CHECK(base.hash() == same.hash());

    // spelling out a default leaves the effective config unchanged
    auto explicit_default = RunConfig::from_json_text(R"({
        "corpus_dir": "corpus",
        "output_dir": "out",
        "seed": 0,
        "chunkers": [{"kind": "fixed", "passage_size": 100, "overlap_size": 10}]
    })");
    CHECK(explicit_default.hash() == base.hash());

    auto changed_seed = base;
    changed_seed.seed = 1;
    CHECK(changed_seed.hash() != base.hash());

    auto changed_chunker = base;
    changed_chunker.chunkers[0].passage_size = 101;
    CHECK(changed_chunker.hash() != base.hash());

    auto changed_metrics = base;
    changed_metrics.metrics.retrieval_k = 4;
    CHECK(changed_metrics.hash() != base.hash());

    auto changed_note = base;
    changed_note.note = "note text";
    CHECK(changed_note.hash() != base.hash());
}

TEST_CASE("config loads from a file") {
    TempDir dir("config");
    test::write_file(dir.path() / "run.json", minimal_config());
    auto config = RunConfig::from_file(dir.path() / "run.json");
    CHECK(config.corpus_dir == "corpus");
    CHECK_THROWS_AS(RunConfig::from_file(dir.path() / "absent.json"), Error);
}

TEST_CASE("the shipped default config carries the eight-configuration grid") {
    auto config = RunConfig::from_file(std::filesystem::path(HOPE_SOURCE_DIR) / "configs" /
                                       "default.json");
    REQUIRE(config.chunkers.size() == 8);

    std::vector<std::string> ids;
    for (const auto& chunker : config.chunkers) ids.push_back(chunker.id());
    CHECK(ids == std::vector<std::string>{"fixed_s2000_o500", "fixed_s2000_o125",
                                          "fixed_s500_o125", "fixed_s500_o0", "recursive_s2000",
                                          "recursive_s500", "semantic_p95", "semantic_p90"});
    CHECK(!config.note.empty()); // the grid adaptation is recorded in the manifest note
    CHECK(config.metrics.segments_per_document == 20);
}
