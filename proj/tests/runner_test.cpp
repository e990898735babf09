#include <doctest.h>

#include <sstream>

#include "hope/runner.hpp"
#include "support.hpp"

using namespace hope;
using namespace hope::run;
using hope::test::read_file;
using hope::test::TempDir;
using hope::test::write_file;

namespace {

// small, wholly mock-driven corpus
void write_fixture_corpus(const std::filesystem::path& dir) {
    write_file(dir / "alpha.txt",
               "Quartz lattices refract amber light. Basalt columns fracture hexagonally. "
               "Gypsum crystals dissolve slowly. Obsidian shards gleam darkly.");
    write_file(dir / "bravo.txt",
               "Falcons migrate across deserts. Ravens hoard shiny pebbles. "
               "Herons wade through marshes. Sparrows nest under eaves.");
}

RunConfig fixture_config(const std::filesystem::path& base) {
    RunConfig config;
    config.corpus_dir = base / "corpus";
    config.output_dir = base / "out";
    config.cache_dir = base / "cache";
    config.seed = 7;
    config.concurrency = 2;
    config.llm.kind = "mock";
    config.embedder.kind = "mock";
    config.metrics.statements_per_passage = 3;
    config.metrics.questions_per_passage = 3;
    config.metrics.segments_per_document = 5;
    chunkers::ChunkerConfig recursive{.kind = chunkers::ChunkerKind::Recursive, .max_size = 80};
    chunkers::ChunkerConfig fixed{
        .kind = chunkers::ChunkerKind::Fixed, .passage_size = 90, .overlap_size = 10};
    config.chunkers = {recursive, fixed};
    return config;
}

} // namespace

TEST_CASE("run_evaluate writes a complete bundle with every cell exactly once") {
    TempDir dir("runner");
    write_fixture_corpus(dir.path() / "corpus");
    auto config = fixture_config(dir.path());

    auto stats = run_evaluate(config);
    CHECK(stats.cells == 4); // 2 documents x 2 chunkers
    CHECK(stats.llm_provider_calls > 0);
    CHECK(stats.embed_provider_calls > 0);

    BundlePaths paths{config.output_dir};
    CHECK(std::filesystem::exists(paths.manifest()));
    CHECK(std::filesystem::exists(paths.scores()));
    CHECK(std::filesystem::exists(paths.passages_csv()));
    CHECK(std::filesystem::exists(paths.baseline_csv()));
    CHECK(std::filesystem::exists(paths.warnings()));
    CHECK(!std::filesystem::exists(paths.incomplete_marker()));
    CHECK(std::filesystem::exists(paths.artifact("alpha.txt", "recursive_s80")));
    CHECK(std::filesystem::exists(paths.artifact("bravo.txt", "fixed_s90_o10")));

    auto bundle = load_bundle(config.output_dir);
    CHECK(bundle.scores.size() == 4);
    CHECK(bundle.manifest.complete);
    CHECK(bundle.manifest.config_hash == config.hash());
    for (const auto& [key, row] : bundle.scores) {
        CHECK(row.at("hope") ==
              doctest::Approx((row.at("zeta_con") + row.at("zeta_sem") + row.at("zeta_inf")) / 3.0)
                  .epsilon(1e-12));
        CHECK(row.at("bleu") >= 0.0);
        CHECK(row.at("bleu") <= 1.0);
    }
}

TEST_CASE("run_evaluate is deterministic and the cache eliminates provider calls") {
    TempDir dir("determinism");
    write_fixture_corpus(dir.path() / "corpus");

    auto config_a = fixture_config(dir.path());
    config_a.output_dir = dir.path() / "out-a";
    config_a.cache_dir = dir.path() / "cache-a";
    auto stats_a = run_evaluate(config_a);
    CHECK(stats_a.llm_provider_calls > 0);

    auto config_b = fixture_config(dir.path());
    config_b.output_dir = dir.path() / "out-b";
    config_b.cache_dir = dir.path() / "cache-b"; // fresh cache, fresh providers
    run_evaluate(config_b);

    for (const char* name : {"scores.json", "passages.csv", "baseline.csv", "warnings.jsonl"}) {
        CHECK(read_file(config_a.output_dir / name) == read_file(config_b.output_dir / name));
    }

    // warm rerun over cache-a: zero provider calls, identical artifacts
    auto config_c = fixture_config(dir.path());
    config_c.output_dir = dir.path() / "out-c";
    config_c.cache_dir = dir.path() / "cache-a";
    auto stats_c = run_evaluate(config_c);
    CHECK(stats_c.llm_provider_calls == 0);
    CHECK(stats_c.embed_provider_calls == 0);
    CHECK(read_file(config_a.output_dir / "scores.json") ==
          read_file(config_c.output_dir / "scores.json"));
}

TEST_CASE("run_evaluate aborts with an incomplete bundle when the provider is down") {
    TempDir dir("outage");
    // one small document and one chunker keep the retry backoff short
    write_file(dir.path() / "corpus" / "solo.txt", "Lone sentence stands here.");
    auto config = fixture_config(dir.path());
    config.chunkers = {chunkers::ChunkerConfig{.kind = chunkers::ChunkerKind::Recursive,
                                               .max_size = 200}};
    config.llm.kind = "http";
    config.llm.endpoint = "http://127.0.0.1:9"; // discard port: nothing listens
    config.llm.model = "unreachable";

    try {
        run_evaluate(config);
        FAIL("expected a provider error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Provider);
    }
    BundlePaths paths{config.output_dir};
    CHECK(std::filesystem::exists(paths.incomplete_marker()));
    CHECK_THROWS_AS(load_bundle(config.output_dir), Error); // refuses incomplete bundles
}

TEST_CASE("run_evaluate rejects an empty corpus") {
    TempDir dir("empty-corpus");
    std::filesystem::create_directories(dir.path() / "corpus");
    auto config = fixture_config(dir.path());
    CHECK_THROWS_AS(run_evaluate(config), Error);
}

TEST_CASE("run_compare joins on keys and reports self-correlation 1") {
    TempDir dir("compare");
    write_fixture_corpus(dir.path() / "corpus");
    auto config = fixture_config(dir.path());
    run_evaluate(config);
    auto bundle = load_bundle(config.output_dir);

    // indicators = the bundle's own hope column, rows deliberately shuffled
    std::vector<std::string> lines;
    for (const auto& [key, row] : bundle.scores) {
        lines.push_back(key.first + "," + key.second + "," + std::to_string(row.at("hope")) +
                        ",0.25");
    }
    std::rotate(lines.begin(), lines.begin() + 1, lines.end());
    std::string csv = "document_id,chunker_id,SELF,CONST\n";
    for (const auto& line : lines) csv += line + "\n";
    write_file(dir.path() / "indicators.csv", csv);

    CompareOptions options;
    options.bundle_dir = config.output_dir;
    options.indicators_csv = dir.path() / "indicators.csv";
    options.output_json = dir.path() / "compare.json";
    std::ostringstream out;
    run_compare(options, out);

    auto text = out.str();
    CHECK(text.find("correlations [group all, n=4]") != std::string::npos);
    CHECK(text.find("hope") != std::string::npos);
    // hope vs SELF is a perfect correlation
    CHECK(text.find("1.0000") != std::string::npos);
    CHECK(std::filesystem::exists(dir.path() / "compare.json"));

    // row order in the CSV does not matter: the join is key-based
    std::string csv2 = "document_id,chunker_id,SELF,CONST\n";
    auto lines2 = lines;
    std::rotate(lines2.begin(), lines2.begin() + 2, lines2.end());
    for (const auto& line : lines2) csv2 += line + "\n";
    write_file(dir.path() / "indicators2.csv", csv2);
    CompareOptions options2 = options;
    options2.indicators_csv = dir.path() / "indicators2.csv";
    options2.output_json.clear();
    std::ostringstream out2;
    run_compare(options2, out2);
    CHECK(out2.str() == text);

    // group-by flag accepts doc and chunker
    CompareOptions by_chunker = options2;
    by_chunker.group_by = "chunker";
    std::ostringstream out3;
    run_compare(by_chunker, out3);
    CHECK(out3.str().find("group recursive_s80") != std::string::npos);

    CompareOptions bad = options2;
    bad.group_by = "sideways";
    CHECK_THROWS_AS(run_compare(bad, out3), Error);
}

TEST_CASE("run_compare fails on an empty join, listing unmatched keys") {
    TempDir dir("compare-miss");
    write_fixture_corpus(dir.path() / "corpus");
    auto config = fixture_config(dir.path());
    run_evaluate(config);

    write_file(dir.path() / "indicators.csv",
               "document_id,chunker_id,AC\nother.txt,fixed_s1_o0,0.5\n");
    CompareOptions options;
    options.bundle_dir = config.output_dir;
    options.indicators_csv = dir.path() / "indicators.csv";
    std::ostringstream out;
    try {
        run_compare(options, out);
        FAIL("expected a data error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Data);
        CHECK(std::string(e.what()).find("alpha.txt") != std::string::npos);
    }
}

TEST_CASE("run_inspect renders text and JSON audits") {
    TempDir dir("inspect");
    write_fixture_corpus(dir.path() / "corpus");
    auto config = fixture_config(dir.path());
    run_evaluate(config);

    InspectOptions options;
    options.bundle_dir = config.output_dir;
    options.document_id = "bravo.txt";
    options.chunker_id = "recursive_s80";

    std::ostringstream out;
    run_inspect(options, out);
    auto text = out.str();
    CHECK(text.find("document: bravo.txt") != std::string::npos);
    CHECK(text.find("passages:") != std::string::npos);
    CHECK(text.find("zeta_con_bar") != std::string::npos);
    CHECK(text.find("quadruples:") != std::string::npos);

    options.as_json = true;
    std::ostringstream json_out;
    run_inspect(options, json_out);
    CHECK(json_out.str().find("\"document_id\": \"bravo.txt\"") != std::string::npos);

    // unknown chunker id names the available ones
    InspectOptions unknown = options;
    unknown.chunker_id = "nope";
    try {
        run_inspect(unknown, json_out);
        FAIL("expected a data error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("recursive_s80") != std::string::npos);
    }

    InspectOptions unknown_doc = options;
    unknown_doc.document_id = "missing.txt";
    CHECK_THROWS_AS(run_inspect(unknown_doc, json_out), Error);
}
