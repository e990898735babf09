#include "hope/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "hope/cache.hpp"
#include "hope/http_providers.hpp"
#include "hope/stats.hpp"

namespace hope::run {

using nlohmann::json;

namespace {

std::string now_iso8601() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buffer;
}

class CountingLlm : public llm::LlmProvider {
public:
    CountingLlm(llm::LlmProvider& inner, std::atomic<std::size_t>& counter)
        : inner_(inner), counter_(counter) {}

    std::string generate(const llm::GenerationRequest& request) override {
        counter_.fetch_add(1);
        return inner_.generate(request);
    }
    std::string id() const override { return inner_.id(); }

private:
    llm::LlmProvider& inner_;
    std::atomic<std::size_t>& counter_;
};

class CountingEmbedder : public embedding::Embedder {
public:
    CountingEmbedder(embedding::Embedder& inner, std::atomic<std::size_t>& counter)
        : inner_(inner), counter_(counter) {}

    embedding::EmbeddingVector embed(std::string_view text) override {
        counter_.fetch_add(1);
        return inner_.embed(text);
    }
    std::string id() const override { return inner_.id(); }

private:
    embedding::Embedder& inner_;
    std::atomic<std::size_t>& counter_;
};

llm::HttpOptions http_options(const ProviderConfig& provider, int concurrency) {
    llm::HttpOptions options;
    options.endpoint = provider.endpoint;
    options.model = provider.model;
    options.max_in_flight = concurrency;
    return options;
}

json artifact_json(const std::string& document_id, const std::string& chunker_id,
                   const chunkers::PassageSet& passages,
                   const std::vector<metrics::PassageScore>& per_passage,
                   const std::vector<metrics::ConceptUnityArtifact>& con,
                   const std::vector<metrics::SemanticIndependenceArtifact>& sem,
                   const metrics::InformationPreservationResult& info) {
    std::map<std::string, const metrics::ConceptUnityArtifact*> con_by_id;
    for (const auto& artifact : con) con_by_id[artifact.passage_id] = &artifact;
    std::map<std::string, const metrics::SemanticIndependenceArtifact*> sem_by_id;
    for (const auto& artifact : sem) sem_by_id[artifact.passage_id] = &artifact;

    json passage_rows = json::array();
    for (std::size_t i = 0; i < passages.passages.size(); ++i) {
        const auto& passage = passages.passages[i];
        json row;
        row["id"] = passage.id;
        row["text"] = passage.text;
        if (i < per_passage.size()) {
            if (per_passage[i].zeta_con_bar) row["zeta_con_bar"] = *per_passage[i].zeta_con_bar;
            if (per_passage[i].zeta_sem_bar) row["zeta_sem_bar"] = *per_passage[i].zeta_sem_bar;
        }
        if (auto it = con_by_id.find(passage.id); it != con_by_id.end()) {
            row["statements"] = it->second->statements;
            row["statement_similarity"] = it->second->similarity;
        }
        if (auto it = sem_by_id.find(passage.id); it != sem_by_id.end()) {
            row["questions"] = it->second->questions;
            row["answers_closed"] = it->second->answers_closed;
            row["answers_rag"] = it->second->answers_rag;
            row["retrieved"] = it->second->retrieved;
            row["pair_similarity"] = it->second->pair_similarity;
        }
        passage_rows.push_back(std::move(row));
    }

    json quadruple_rows = json::array();
    for (const auto& artifact : info.artifacts) {
        json row;
        row["segment_id"] = artifact.segment_id;
        row["skipped"] = artifact.skipped;
        if (!artifact.skipped) {
            row["true_statement"] = artifact.quadruple.true_statement;
            row["false_statements"] = artifact.quadruple.false_statements;
            row["options"] = artifact.options;
            row["true_position"] = artifact.true_position;
            row["retrieved"] = artifact.retrieved;
            if (artifact.chosen) {
                row["chosen"] = *artifact.chosen;
            } else {
                row["chosen"] = nullptr;
            }
            row["correct"] = artifact.correct;
            row["parse_flagged"] = artifact.parse_flagged;
        }
        quadruple_rows.push_back(std::move(row));
    }

    json root;
    root["document_id"] = document_id;
    root["chunker_id"] = chunker_id;
    root["passages"] = std::move(passage_rows);
    root["quadruples"] = std::move(quadruple_rows);
    return root;
}

struct CellTask {
    const corpus::Document* document = nullptr;
    const chunkers::ChunkerConfig* chunker = nullptr;
    std::string chunker_id;
};

} // namespace

EvaluateStats run_evaluate(const RunConfig& config) {
    config.validate();

    llm::PromptLibrary prompts = llm::PromptLibrary::defaults();
    if (!config.prompt_dir.empty()) prompts.load_overrides(config.prompt_dir);

    // provider stack: cache -> counting -> provider
    std::unique_ptr<llm::LlmProvider> llm_provider;
    if (config.llm.kind == "http") {
        llm_provider = std::make_unique<llm::HttpLlmProvider>(
            http_options(config.llm, config.concurrency), prompts);
    } else {
        llm_provider = std::make_unique<llm::MockLlmProvider>();
    }
    std::unique_ptr<embedding::Embedder> embed_provider;
    if (config.embedder.kind == "http") {
        embed_provider = std::make_unique<llm::HttpEmbedder>(
            http_options(config.embedder, config.concurrency));
    } else {
        embed_provider = std::make_unique<embedding::MockEmbedder>();
    }

    std::atomic<std::size_t> llm_calls{0}, embed_calls{0};
    CountingLlm counted_llm(*llm_provider, llm_calls);
    CountingEmbedder counted_embedder(*embed_provider, embed_calls);

    std::optional<llm::ResponseCache> cache;
    if (!config.cache_dir.empty()) cache.emplace(config.cache_dir / "cache.jsonl");
    llm::CachingLlmProvider cached_llm(counted_llm, cache ? &*cache : nullptr);
    llm::CachingEmbedder cached_embedder(counted_embedder, cache ? &*cache : nullptr);

    WarningLog corpus_warnings;
    auto documents = corpus::load_corpus(config.corpus_dir, corpus_warnings);
    if (documents.empty()) {
        throw data_error("corpus at " + config.corpus_dir.string() + " has no usable documents");
    }

    BundlePaths paths{config.output_dir};
    std::filesystem::create_directories(paths.root);
    write_file_atomic(paths.incomplete_marker(), "run in progress\n");

    Manifest manifest;
    manifest.config_hash = config.hash();
    manifest.llm_provider = cached_llm.id();
    manifest.embedder_provider = cached_embedder.id();
    manifest.seed = config.seed;
    manifest.note = config.note;
    manifest.started_at = now_iso8601();

    std::vector<CellTask> tasks;
    for (const auto& document : documents) {
        for (const auto& chunker : config.chunkers) {
            tasks.push_back({&document, &chunker, chunker.id()});
        }
    }

    std::vector<std::optional<CellResult>> results(tasks.size());
    std::vector<WarningLog> cell_warnings(tasks.size());
    std::vector<std::exception_ptr> failures(tasks.size());

    auto evaluate_cell = [&](const CellTask& task, WarningLog& warnings) {
        metrics::MetricParams params = config.metrics;
        params.generation_temperature = config.llm.temperature;
        metrics::ScoringContext ctx{cached_llm, cached_embedder, params, &warnings};

        auto passage_set = chunkers::chunk(*task.document, *task.chunker, &cached_embedder);
        auto index = embedding::build_index(passage_set, cached_embedder);

        std::vector<metrics::PassageScore> per_passage;
        std::vector<metrics::ConceptUnityArtifact> con_artifacts;
        std::vector<metrics::SemanticIndependenceArtifact> sem_artifacts;

        double zeta_con = metrics::concept_unity(ctx, passage_set, &con_artifacts, &per_passage);
        double zeta_sem =
            metrics::semantic_independence(ctx, passage_set, index, &sem_artifacts, &per_passage);

        SeededRng rng(corpus::document_seed(config.seed, task.document->id));
        auto info = metrics::information_preservation(ctx, *task.document, passage_set, index,
                                                      params.segments_per_document, rng);

        CellResult cell;
        cell.score.document_id = task.document->id;
        cell.score.chunker_id = task.chunker_id;
        cell.score.zeta_con = zeta_con;
        cell.score.zeta_sem = zeta_sem;
        cell.score.zeta_inf = info.zeta_inf;
        cell.score.hope = metrics::hope_score(zeta_con, zeta_sem, info.zeta_inf);
        cell.score.counts.passages = passage_set.passages.size();
        for (const auto& artifact : sem_artifacts) {
            cell.score.counts.questions += artifact.questions.size();
        }
        cell.score.counts.quadruples = info.scored;
        cell.score.counts.segments_skipped = info.skipped;
        cell.score.counts.discrimination_failures = info.discrimination_failures;
        cell.bleu = stats::bleu(task.document->text, stats::concat_passages(passage_set));
        cell.passage_scores = std::move(per_passage);
        cell.artifact_json = artifact_json(task.document->id, task.chunker_id, passage_set,
                                           cell.passage_scores, con_artifacts, sem_artifacts, info)
                                 .dump(2) +
                             "\n";
        return cell;
    };

    const std::size_t worker_count = std::min<std::size_t>(
        tasks.size(), static_cast<std::size_t>(std::max(config.concurrency, 1)));
    std::atomic<std::size_t> next_task{0};
    auto worker = [&] {
        while (true) {
            std::size_t at = next_task.fetch_add(1);
            if (at >= tasks.size()) break;
            try {
                results[at] = evaluate_cell(tasks[at], cell_warnings[at]);
            } catch (...) {
                failures[at] = std::current_exception();
            }
        }
    };
    if (worker_count <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(worker_count);
        for (std::size_t i = 0; i < worker_count; ++i) threads.emplace_back(worker);
        for (auto& thread : threads) thread.join();
    }

    WarningLog warnings = corpus_warnings;
    std::map<std::pair<std::string, std::string>, CellResult> cells;
    std::exception_ptr first_failure;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        for (auto& warning : cell_warnings[i]) {
            warning.chunker_id = tasks[i].chunker_id;
            warnings.push_back(std::move(warning));
        }
        if (failures[i] && !first_failure) first_failure = failures[i];
        if (results[i]) {
            cells.emplace(std::make_pair(tasks[i].document->id, tasks[i].chunker_id),
                          std::move(*results[i]));
        }
    }

    manifest.finished_at = now_iso8601();
    manifest.complete = !first_failure;
    write_bundle(paths, manifest, cells, warnings);
    if (first_failure) std::rethrow_exception(first_failure);

    EvaluateStats stats;
    stats.bundle_dir = paths.root;
    stats.cells = cells.size();
    stats.llm_provider_calls = llm_calls.load();
    stats.embed_provider_calls = embed_calls.load();
    stats.warnings = warnings.size();
    return stats;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::string>& hope_side_metrics() {
    static const std::vector<std::string> names = {"hope", "zeta_con", "zeta_sem", "zeta_inf",
                                                   "bleu"};
    return names;
}

struct JoinedRow {
    std::string document_id;
    std::string chunker_id;
    const std::map<std::string, double>* bundle_row;
    const std::vector<double>* indicator_row;
};

} // namespace

void run_compare(const CompareOptions& options, std::ostream& out) {
    if (options.group_by != "all" && options.group_by != "doc" && options.group_by != "chunker") {
        throw usage_error("--group-by must be one of doc|chunker|all");
    }

    LoadedBundle bundle = load_bundle(options.bundle_dir);
    stats::IndicatorTable indicators = stats::IndicatorTable::load_csv(options.indicators_csv);

    std::vector<JoinedRow> joined;
    std::vector<std::string> unmatched;
    for (const auto& [key, row] : bundle.scores) {
        auto it = indicators.rows.find(key);
        if (it == indicators.rows.end()) {
            unmatched.push_back(key.first + "/" + key.second);
            continue;
        }
        joined.push_back({key.first, key.second, &row, &it->second});
    }
    if (joined.size() < 3) {
        std::string detail = "join produced " + std::to_string(joined.size()) +
                             " rows (need >= 3)";
        if (!unmatched.empty()) {
            detail += "; unmatched bundle keys:";
            for (std::size_t i = 0; i < unmatched.size() && i < 8; ++i)
                detail += " " + unmatched[i];
        }
        throw data_error(detail);
    }

    std::map<std::string, std::vector<const JoinedRow*>> groups;
    if (options.group_by == "all") {
        for (const auto& row : joined) groups["all"].push_back(&row);
    } else if (options.group_by == "doc") {
        for (const auto& row : joined) groups[row.document_id].push_back(&row);
    } else {
        for (const auto& row : joined) groups[row.chunker_id].push_back(&row);
    }

    json report_json;
    report_json["groups"] = json::array();

    for (const auto& [group, rows] : groups) {
        out << "correlations [group " << group << ", n=" << rows.size() << "]\n";
        if (rows.size() < 3) {
            out << "  skipped: fewer than 3 joined rows\n\n";
            continue;
        }
        json group_json;
        group_json["group"] = group;
        group_json["n"] = rows.size();
        group_json["entries"] = json::array();

        out << "  " << std::left << std::setw(10) << "metric" << std::setw(12) << "indicator"
            << std::setw(12) << "rho" << std::setw(12) << "p" << "\n";
        for (const auto& metric : hope_side_metrics()) {
            for (std::size_t column = 0; column < indicators.metric_names.size(); ++column) {
                std::vector<double> xs, ys;
                xs.reserve(rows.size());
                ys.reserve(rows.size());
                for (const auto* row : rows) {
                    auto it = row->bundle_row->find(metric);
                    if (it == row->bundle_row->end()) break;
                    xs.push_back(it->second);
                    ys.push_back((*row->indicator_row)[column]);
                }
                if (xs.size() != rows.size()) continue; // metric absent (e.g. bleu not written)
                out << "  " << std::left << std::setw(10) << metric << std::setw(12)
                    << indicators.metric_names[column];
                try {
                    auto result = stats::pearson(xs, ys);
                    out << std::setw(12) << std::setprecision(4) << std::fixed << result.rho
                        << std::setw(12) << std::setprecision(6) << result.p_value
                        << (result.p_value < 0.05 ? " *" : "") << "\n";
                    out.unsetf(std::ios::fixed);
                    group_json["entries"].push_back({{"metric", metric},
                                                     {"indicator", indicators.metric_names[column]},
                                                     {"rho", result.rho},
                                                     {"p_value", result.p_value},
                                                     {"n", result.n}});
                } catch (const Error& e) {
                    out << "undefined (" << e.what() << ")\n";
                }
            }
        }
        out << "\n";
        report_json["groups"].push_back(std::move(group_json));
    }

    // binned view over pooled rows: zeta_sem against each indicator
    std::vector<std::pair<double, std::map<std::string, double>>> binned_rows;
    for (const auto& row : joined) {
        auto it = row.bundle_row->find("zeta_sem");
        if (it == row.bundle_row->end()) continue;
        std::map<std::string, double> values;
        for (std::size_t column = 0; column < indicators.metric_names.size(); ++column) {
            values[indicators.metric_names[column]] = (*row.indicator_row)[column];
        }
        binned_rows.emplace_back(it->second, std::move(values));
    }
    auto bins = stats::equal_count_bins(std::move(binned_rows), options.bins);

    out << "zeta_sem bins (" << bins.size() << ")\n";
    out << "  " << std::left << std::setw(6) << "bin" << std::setw(12) << "zeta_sem";
    for (const auto& name : indicators.metric_names) out << std::setw(12) << name;
    out << "\n";
    json bins_json = json::array();
    for (std::size_t b = 0; b < bins.size(); ++b) {
        out << "  " << std::left << std::setw(6) << (b + 1) << std::setw(12)
            << std::setprecision(4) << std::fixed << bins[b].x_mean;
        json bin_json{{"zeta_sem", bins[b].x_mean}, {"count", bins[b].count}};
        for (const auto& name : indicators.metric_names) {
            out << std::setw(12) << bins[b].means.at(name);
            bin_json[name] = bins[b].means.at(name);
        }
        out.unsetf(std::ios::fixed);
        out << "\n";
        bins_json.push_back(std::move(bin_json));
    }
    report_json["bins"] = std::move(bins_json);

    out << "\nrelative gain, lowest to highest zeta_sem bin\n";
    json gains_json;
    for (const auto& name : indicators.metric_names) {
        std::vector<double> series;
        series.reserve(bins.size());
        for (const auto& bin : bins) series.push_back(bin.means.at(name));
        out << "  " << std::left << std::setw(12) << name;
        try {
            double gain = stats::relative_gain(series);
            out << std::showpos << std::setprecision(1) << std::fixed << gain << "%"
                << std::noshowpos << "\n";
            out.unsetf(std::ios::fixed);
            gains_json[name] = gain;
        } catch (const Error& e) {
            out << "undefined (" << e.what() << ")\n";
        }
    }
    report_json["relative_gain"] = std::move(gains_json);

    if (!options.output_json.empty()) {
        write_file_atomic(options.output_json, report_json.dump(2) + "\n");
    }
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

void run_inspect(const InspectOptions& options, std::ostream& out) {
    BundlePaths paths{options.bundle_dir};
    auto file = paths.artifact(options.document_id, options.chunker_id);
    if (!std::filesystem::exists(file)) {
        std::string available;
        auto doc_dir = paths.artifacts_dir() / options.document_id;
        if (std::filesystem::is_directory(doc_dir)) {
            for (const auto& entry : std::filesystem::directory_iterator(doc_dir)) {
                if (entry.path().extension() == ".json") {
                    if (!available.empty()) available += ", ";
                    available += entry.path().stem().string();
                }
            }
            throw data_error("no artifact for chunker '" + options.chunker_id +
                             "'; available: " + (available.empty() ? "(none)" : available));
        }
        throw data_error("no artifacts for document '" + options.document_id + "' in bundle " +
                         options.bundle_dir.string());
    }

    std::ifstream in(file, std::ios::binary);
    json artifact = json::parse(in, nullptr, false);
    if (artifact.is_discarded()) throw data_error("unparseable artifact " + file.string());

    if (options.as_json) {
        out << artifact.dump(2) << "\n";
        return;
    }

    out << "document: " << options.document_id << "\n";
    out << "chunker:  " << options.chunker_id << "\n";
    const auto& passages = artifact["passages"];
    out << "passages: " << passages.size() << "\n\n";

    for (const auto& row : passages) {
        out << "[" << row.value("id", "") << "]";
        if (row.contains("zeta_con_bar"))
            out << "  zeta_con_bar=" << row["zeta_con_bar"].get<double>();
        if (row.contains("zeta_sem_bar"))
            out << "  zeta_sem_bar=" << row["zeta_sem_bar"].get<double>();
        out << "\n";
        if (row.contains("statements")) {
            out << "  statements:\n";
            for (const auto& statement : row["statements"])
                out << "    - " << statement.get<std::string>() << "\n";
        }
        if (row.contains("questions")) {
            out << "  questions:\n";
            const auto& questions = row["questions"];
            for (std::size_t i = 0; i < questions.size(); ++i) {
                out << "    - " << questions[i].get<std::string>() << "\n";
                if (row.contains("answers_closed") && i < row["answers_closed"].size()) {
                    out << "      closed: " << row["answers_closed"][i].get<std::string>() << "\n";
                }
                if (row.contains("answers_rag") && i < row["answers_rag"].size()) {
                    out << "      rag:    " << row["answers_rag"][i].get<std::string>() << "\n";
                }
            }
        }
        out << "\n";
    }

    const auto& quadruples = artifact["quadruples"];
    out << "quadruples: " << quadruples.size() << "\n";
    for (const auto& row : quadruples) {
        out << "  [" << row.value("segment_id", "") << "] ";
        if (row.value("skipped", false)) {
            out << "skipped\n";
            continue;
        }
        bool correct = row.value("correct", false);
        out << (correct ? "correct" : "incorrect");
        if (row.contains("chosen") && row["chosen"].is_null()) out << " (unparseable response)";
        out << "\n";
        const auto& opts = row["options"];
        int true_position = row.value("true_position", -1);
        for (std::size_t i = 0; i < opts.size(); ++i) {
            char letter = static_cast<char>('A' + i);
            out << "    " << letter << ". " << opts[i].get<std::string>();
            if (static_cast<int>(i) == true_position) out << "  [true]";
            if (row.contains("chosen") && !row["chosen"].is_null() &&
                row["chosen"].get<int>() == static_cast<int>(i))
                out << "  [chosen]";
            out << "\n";
        }
    }
}

} // namespace hope::run
