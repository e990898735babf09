// hope: score document chunking quality for RAG corpora.
//
// Subcommands:
//   evaluate --config run.json [--seed N] [--output DIR]
//   compare  --bundle DIR --indicators FILE [--group-by doc|chunker|all]
//   inspect  --bundle DIR --doc ID --chunker ID [--json]

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hope/runner.hpp"

namespace {

int exit_code_for(hope::ErrorKind kind) {
    switch (kind) {
        case hope::ErrorKind::Usage:
            return 1;
        case hope::ErrorKind::Provider:
            return 2;
        case hope::ErrorKind::Data:
        case hope::ErrorKind::Io:
            return 3;
    }
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"HOPE chunking-quality evaluation"};
    app.require_subcommand(1);

    // evaluate
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::string output_override;
    auto* evaluate = app.add_subcommand("evaluate", "run the metric over a corpus");
    evaluate->add_option("--config", config_path, "run config JSON")->required();
    evaluate->add_option("--seed", seed_override, "override the config seed");
    evaluate->add_option("--output", output_override, "override the output directory");

    // compare
    hope::run::CompareOptions compare_options;
    std::string compare_bundle, compare_indicators, compare_output;
    auto* compare = app.add_subcommand("compare", "correlate a bundle against indicator CSVs");
    compare->add_option("--bundle", compare_bundle, "report bundle directory")->required();
    compare->add_option("--indicators", compare_indicators, "indicator CSV")->required();
    compare->add_option("--group-by", compare_options.group_by, "doc|chunker|all");
    compare->add_option("--bins", compare_options.bins, "bin count for the zeta_sem view");
    compare->add_option("--output", compare_output, "also write the report as JSON");

    // inspect
    hope::run::InspectOptions inspect_options;
    std::string inspect_bundle;
    auto* inspect = app.add_subcommand("inspect", "audit one (document, chunker) cell");
    inspect->add_option("--bundle", inspect_bundle, "report bundle directory")->required();
    inspect->add_option("--doc", inspect_options.document_id, "document id")->required();
    inspect->add_option("--chunker", inspect_options.chunker_id, "chunker id")->required();
    inspect->add_flag("--json", inspect_options.as_json, "machine-readable output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (evaluate->parsed()) {
            auto config = hope::run::RunConfig::from_file(config_path);
            if (seed_override) config.seed = *seed_override;
            if (!output_override.empty()) config.output_dir = output_override;
            config.validate();

            auto stats = hope::run::run_evaluate(config);
            std::cout << "bundle:    " << stats.bundle_dir.string() << "\n"
                      << "cells:     " << stats.cells << "\n"
                      << "llm calls: " << stats.llm_provider_calls << "\n"
                      << "embed calls: " << stats.embed_provider_calls << "\n"
                      << "warnings:  " << stats.warnings << "\n";
        } else if (compare->parsed()) {
            compare_options.bundle_dir = compare_bundle;
            compare_options.indicators_csv = compare_indicators;
            compare_options.output_json = compare_output;
            hope::run::run_compare(compare_options, std::cout);
        } else if (inspect->parsed()) {
            inspect_options.bundle_dir = inspect_bundle;
            hope::run::run_inspect(inspect_options, std::cout);
        }
    } catch (const hope::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
