#include "hope/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "internal/csv.hpp"

namespace hope::run {

using nlohmann::json;

namespace {

std::string format_double(double value) {
    char buffer[32];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

} // namespace

std::filesystem::path BundlePaths::artifact(const std::string& document_id,
                                            const std::string& chunker_id) const {
    return artifacts_dir() / document_id / (chunker_id + ".json");
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    auto temp = path;
    temp += ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot write " + temp.string());
        out << content;
        if (!out) throw io_error("short write on " + temp.string());
    }
    std::filesystem::rename(temp, path);
}

void write_bundle(const BundlePaths& paths,const Manifest& manifest,
                  const std::map<std::pair<std::string, std::string>, CellResult>& cells,
                  const WarningLog& warnings) {
    std::filesystem::create_directories(paths.root);

    // scores.json
    json score_rows = json::array();
    for (const auto& [key, cell] : cells) {
        const auto& score = cell.score;
        json row;
        row["document_id"] = score.document_id;
        row["chunker_id"] = score.chunker_id;
        row["zeta_con"] = score.zeta_con;
        row["zeta_sem"] = score.zeta_sem;
        row["zeta_inf"] = score.zeta_inf;
        row["hope"] = score.hope;
        row["counts"] = {{"passages", score.counts.passages},
                         {"questions", score.counts.questions},
                         {"quadruples", score.counts.quadruples},
                         {"segments_skipped", score.counts.segments_skipped},
                         {"discrimination_failures", score.counts.discrimination_failures}};
        score_rows.push_back(std::move(row));
    }
    write_file_atomic(paths.scores(), json{{"scores", std::move(score_rows)}}.dump(2) + "\n");

    // passages.csv
    {
        std::string csv = "doc_id,chunker_id,passage_id,zeta_con_bar,zeta_sem_bar\n";
        for (const auto& [key, cell] : cells) {
            for (const auto& row : cell.passage_scores) {
                csv += internal::csv_quote(key.first) + ',' + internal::csv_quote(key.second) +
                       ',' + internal::csv_quote(row.passage_id) + ',';
                if (row.zeta_con_bar) csv += format_double(*row.zeta_con_bar);
                csv += ',';
                if (row.zeta_sem_bar) csv += format_double(*row.zeta_sem_bar);
                csv += '\n';
            }
        }
        write_file_atomic(paths.passages_csv(), csv);
    }

    // baseline.csv
    {
        std::string csv = "doc_id,chunker_id,bleu\n";
        for (const auto& [key, cell] : cells) {
            csv += internal::csv_quote(key.first) + ',' + internal::csv_quote(key.second) + ',' +
                   format_double(cell.bleu) + '\n';
        }
        write_file_atomic(paths.baseline_csv(), csv);
    }

    // warnings.jsonl
    {
        std::string lines;
        for (const auto& warning : warnings) {
            json record{{"code", warning.code},
                        {"document_id", warning.document_id},
                        {"chunker_id", warning.chunker_id},
                        {"detail", warning.detail}};
            lines += record.dump() + "\n";
        }
        write_file_atomic(paths.warnings(), lines);
    }

    // per-cell audit artifacts
    for (const auto& [key, cell] : cells) {
        if (cell.artifact_json.empty()) continue;
        write_file_atomic(paths.artifact(key.first, key.second), cell.artifact_json);
    }

    // manifest last; the INCOMPLETE marker outlives any partial write
    json manifest_json;
    manifest_json["config_hash"] = manifest.config_hash;
    manifest_json["providers"] = {{"llm", manifest.llm_provider},
                                  {"embedder", manifest.embedder_provider}};
    manifest_json["seed"] = manifest.seed;
    manifest_json["note"] = manifest.note;
    manifest_json["started_at"] = manifest.started_at;
    manifest_json["finished_at"] = manifest.finished_at;
    manifest_json["complete"] = manifest.complete;
    manifest_json["schema"] = 1;
    write_file_atomic(paths.manifest(), manifest_json.dump(2) + "\n");

    if (manifest.complete) {
        std::filesystem::remove(paths.incomplete_marker());
    }
}

std::vector<std::string> LoadedBundle::chunker_ids() const {
    std::vector<std::string> ids;
    for (const auto& [key, row] : scores) {
        if (ids.empty() || ids.back() != key.second) {
            if (std::find(ids.begin(), ids.end(), key.second) == ids.end()) {
                ids.push_back(key.second);
            }
        }
    }
    return ids;
}

LoadedBundle load_bundle(const std::filesystem::path& root) {
    LoadedBundle bundle;
    bundle.paths.root = root;

    if (!std::filesystem::is_directory(root)) {
        throw io_error("bundle directory does not exist: " + root.string());
    }
    if (std::filesystem::exists(bundle.paths.incomplete_marker())) {
        throw data_error("bundle is marked incomplete: " + root.string());
    }

    json manifest = json::parse(read_file(bundle.paths.manifest()), nullptr, false);
    if (manifest.is_discarded()) throw data_error("unparseable manifest.json");
    bundle.manifest.config_hash = manifest.value("config_hash", "");
    bundle.manifest.seed = manifest.value("seed", 0ull);
    bundle.manifest.note = manifest.value("note", "");
    bundle.manifest.complete = manifest.value("complete", false);
    if (manifest.contains("providers")) {
        bundle.manifest.llm_provider = manifest["providers"].value("llm", "");
        bundle.manifest.embedder_provider = manifest["providers"].value("embedder", "");
    }

    json scores = json::parse(read_file(bundle.paths.scores()), nullptr, false);
    if (scores.is_discarded() || !scores.contains("scores")) {
        throw data_error("unparseable scores.json");
    }
    for (const auto& row : scores["scores"]) {
        std::pair<std::string, std::string> key{row.at("document_id").get<std::string>(),
                                                row.at("chunker_id").get<std::string>()};
        std::map<std::string, double> values;
        values["zeta_con"] = row.at("zeta_con").get<double>();
        values["zeta_sem"] = row.at("zeta_sem").get<double>();
        values["zeta_inf"] = row.at("zeta_inf").get<double>();
        values["hope"] = row.at("hope").get<double>();
        bundle.scores.emplace(std::move(key), std::move(values));
    }

    // merge the BLEU baseline into the same rows
    std::ifstream baseline(bundle.paths.baseline_csv(), std::ios::binary);
    if (baseline) {
        std::string line;
        bool header = true;
        while (std::getline(baseline, line)) {
            if (header) {
                header = false;
                continue;
            }
            if (line.empty()) continue;
            auto fields = internal::parse_csv_line(line);
            if (fields.size() != 3) continue;
            auto it = bundle.scores.find({fields[0], fields[1]});
            if (it != bundle.scores.end()) it->second["bleu"] = std::stod(fields[2]);
        }
    }
    return bundle;
}

} // namespace hope::run
