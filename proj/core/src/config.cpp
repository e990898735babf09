#include "hope/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hope/hashing.hpp"

namespace hope::run {

using nlohmann::json;

namespace {

void reject_unknown(const json& object, const std::string& path,
                    const std::set<std::string>& allowed) {
    for (const auto& [key, value] : object.items()) {
        if (!allowed.count(key)) {
            throw usage_error("unknown config field: " + (path.empty() ? key : path + "." + key));
        }
    }
}

template <typename T>
T field_or(const json& object, const std::string& path, const char* name, T fallback) {
    if (!object.contains(name)) return fallback;
    try {
        return object.at(name).get<T>();
    } catch (const json::exception&) {
        throw usage_error("config field has the wrong type: " + path + "." + name);
    }
}

chunkers::ChunkerConfig parse_chunker(const json& object, const std::string& path) {
    if (!object.is_object()) throw usage_error(path + " must be an object");
    reject_unknown(object, path,
                   {"kind", "passage_size", "overlap_size", "max_size", "breakpoint_percentile"});

    chunkers::ChunkerConfig config;
    std::string kind = field_or<std::string>(object, path, "kind", "");
    if (kind == "fixed") {
        config.kind = chunkers::ChunkerKind::Fixed;
    } else if (kind == "recursive") {
        config.kind = chunkers::ChunkerKind::Recursive;
    } else if (kind == "semantic") {
        config.kind = chunkers::ChunkerKind::Semantic;
    } else {
        throw usage_error(path + ".kind must be one of fixed|recursive|semantic");
    }
    config.passage_size = field_or<std::size_t>(object, path, "passage_size", 2000);
    config.overlap_size = field_or<std::size_t>(object, path, "overlap_size", 0);
    config.max_size = field_or<std::size_t>(object, path, "max_size", 2000);
    config.breakpoint_percentile =
        field_or<double>(object, path, "breakpoint_percentile", 95.0);
    return config;
}

ProviderConfig parse_provider(const json& object, const std::string& path, double default_temp) {
    if (!object.is_object()) throw usage_error(path + " must be an object");
    reject_unknown(object, path, {"kind", "endpoint", "model", "temperature"});

    ProviderConfig config;
    config.kind = field_or<std::string>(object, path, "kind", "mock");
    if (config.kind != "mock" && config.kind != "http") {
        throw usage_error(path + ".kind must be mock or http");
    }
    config.endpoint = field_or<std::string>(object, path, "endpoint", "");
    config.model = field_or<std::string>(object, path, "model", "");
    config.temperature = field_or<double>(object, path, "temperature", default_temp);
    return config;
}

json chunker_to_json(const chunkers::ChunkerConfig& config) {
    json object;
    switch (config.kind) {
        case chunkers::ChunkerKind::Fixed:
            object["kind"] = "fixed";
            object["passage_size"] = config.passage_size;
            object["overlap_size"] = config.overlap_size;
            break;
        case chunkers::ChunkerKind::Recursive:
            object["kind"] = "recursive";
            object["max_size"] = config.max_size;
            break;
        case chunkers::ChunkerKind::Semantic:
            object["kind"] = "semantic";
            object["max_size"] = config.max_size;
            object["breakpoint_percentile"] = config.breakpoint_percentile;
            break;
    }
    return object;
}

} // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
    json root = json::parse(text, nullptr, false);
    if (root.is_discarded()) throw usage_error("config is not valid JSON");
    if (!root.is_object()) throw usage_error("config must be a JSON object");

    reject_unknown(root, "",
                   {"corpus_dir", "chunkers", "providers", "metrics", "seed", "concurrency",
                    "cache_dir", "output_dir", "prompt_dir", "note"});

    RunConfig config;
    config.corpus_dir = field_or<std::string>(root, "", "corpus_dir", "");

    if (!root.contains("chunkers") || !root["chunkers"].is_array()) {
        throw usage_error("config field chunkers must be a non-empty array");
    }
    std::size_t index = 0;
    for (const auto& entry : root["chunkers"]) {
        config.chunkers.push_back(
            parse_chunker(entry, "chunkers[" + std::to_string(index++) + "]"));
    }

    if (root.contains("providers")) {
        const json& providers = root["providers"];
        if (!providers.is_object()) throw usage_error("providers must be an object");
        reject_unknown(providers, "providers", {"llm", "embedder"});
        if (providers.contains("llm")) {
            config.llm = parse_provider(providers["llm"], "providers.llm", 0.7);
        }
        if (providers.contains("embedder")) {
            config.embedder = parse_provider(providers["embedder"], "providers.embedder", 0.0);
        }
    }

    if (root.contains("metrics")) {
        const json& metrics = root["metrics"];
        if (!metrics.is_object()) throw usage_error("metrics must be an object");
        reject_unknown(metrics, "metrics",
                       {"statements_per_passage", "questions_per_passage",
                        "segments_per_document", "retrieval_k"});
        config.metrics.statements_per_passage =
            field_or<std::size_t>(metrics, "metrics", "statements_per_passage", 5);
        config.metrics.questions_per_passage =
            field_or<std::size_t>(metrics, "metrics", "questions_per_passage", 5);
        config.metrics.segments_per_document =
            field_or<std::size_t>(metrics, "metrics", "segments_per_document", 20);
        config.metrics.retrieval_k = field_or<std::size_t>(metrics, "metrics", "retrieval_k", 3);
    }

    config.seed = field_or<std::uint64_t>(root, "", "seed", 0);
    config.concurrency = field_or<int>(root, "", "concurrency", 4);
    config.cache_dir = field_or<std::string>(root, "", "cache_dir", "");
    config.output_dir = field_or<std::string>(root, "", "output_dir", "");
    config.prompt_dir = field_or<std::string>(root, "", "prompt_dir", "");
    config.note = field_or<std::string>(root, "", "note", "");

    config.metrics.generation_temperature = config.llm.temperature;
    config.validate();
    return config;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open config file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_json_text(buffer.str());
}

std::string RunConfig::to_canonical_json() const {
    json root;
    root["corpus_dir"] = corpus_dir.generic_string();
    json chunker_list = json::array();
    for (const auto& chunker : chunkers) chunker_list.push_back(chunker_to_json(chunker));
    root["chunkers"] = std::move(chunker_list);
    root["providers"]["llm"] = {{"kind", llm.kind},
                                {"endpoint", llm.endpoint},
                                {"model", llm.model},
                                {"temperature", llm.temperature}};
    root["providers"]["embedder"] = {
        {"kind", embedder.kind}, {"endpoint", embedder.endpoint}, {"model", embedder.model}};
    root["metrics"] = {{"statements_per_passage", metrics.statements_per_passage},
                       {"questions_per_passage", metrics.questions_per_passage},
                       {"segments_per_document", metrics.segments_per_document},
                       {"retrieval_k", metrics.retrieval_k}};
    root["seed"] = seed;
    root["concurrency"] = concurrency;
    root["cache_dir"] = cache_dir.generic_string();
    root["output_dir"] = output_dir.generic_string();
    root["prompt_dir"] = prompt_dir.generic_string();
    root["note"] = note;
    return root.dump();
}

std::string RunConfig::hash() const {
    return to_hex(fnv1a64(to_canonical_json()));
}

void RunConfig::validate() const {
    if (corpus_dir.empty()) throw usage_error("config field corpus_dir is required");
    if (output_dir.empty()) throw usage_error("config field output_dir is required");
    if (chunkers.empty()) throw usage_error("config field chunkers must be non-empty");
    for (const auto& chunker : chunkers) chunker.validate();
    if (metrics.retrieval_k < 1) throw usage_error("metrics.retrieval_k must be >= 1");
    if (metrics.statements_per_passage < 2)
        throw usage_error("metrics.statements_per_passage must be >= 2");
    if (metrics.questions_per_passage < 2)
        throw usage_error("metrics.questions_per_passage must be >= 2");
    if (metrics.segments_per_document < 1)
        throw usage_error("metrics.segments_per_document must be >= 1");
    if (concurrency < 1) throw usage_error("config field concurrency must be >= 1");
    if (!(llm.temperature > 0.0))
        throw usage_error("providers.llm.temperature must be > 0 for generation tasks");
    if (llm.kind == "http" && llm.endpoint.empty())
        throw usage_error("providers.llm.endpoint is required for kind http");
    if (embedder.kind == "http" && embedder.endpoint.empty())
        throw usage_error("providers.embedder.endpoint is required for kind http");
}

} // namespace hope::run
