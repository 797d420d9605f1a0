#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "raglab/config.hpp"
#include "raglab/errors.hpp"
#include "raglab/pipeline.hpp"

namespace {

void print_stage_summary(const raglab::PipelineConfig& cfg, const std::string& stage) {
    raglab::ArtifactPaths paths{cfg.workdir};
    raglab::RunManifest manifest = raglab::RunManifest::load_or_empty(paths.manifest());
    std::string line = stage + " done";
    auto docs = manifest.counts.find("documents");
    auto chunks = manifest.counts.find("chunks");
    auto questions = manifest.counts.find("questions");
    if (stage == "index" && docs != manifest.counts.end() && chunks != manifest.counts.end()) {
        line += ": " + std::to_string(docs->second) + " documents, " +
                std::to_string(chunks->second) + " chunks";
    } else if (questions != manifest.counts.end()) {
        line += ": " + std::to_string(questions->second) + " questions";
    }
    line += " (workdir " + cfg.workdir.string() + ", preset " + cfg.preset + ")";
    std::cout << line << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid retrieval, answer generation and evaluation pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string preset;
    std::uint64_t seed = 0;
    std::size_t parallelism = 0;
    bool fail_fast = false;
    std::string format = "md";

    app.add_option("--config", config_path, "Path to the pipeline config file")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--preset", preset,
                   "Preset to run (sparse, dense, hybrid, hybrid-rerank, doc2query, or a "
                   "preset defined in the config)");
    auto* seed_opt = app.add_option("--seed", seed, "Override the config's random seed");
    auto* par_opt =
        app.add_option("--parallelism", parallelism, "Override the config's parallelism")
            ->check(CLI::PositiveNumber);
    app.add_flag("--fail-fast", fail_fast,
                 "Abort generation on the first client failure instead of flagging the row");
    app.add_option("--format", format, "Table output format for evaluate/report")
        ->check(CLI::IsMember({"json", "md", "csv"}));

    CLI::App* cmd_index = app.add_subcommand("index", "Chunk the corpus and build all indexes");
    CLI::App* cmd_retrieve =
        app.add_subcommand("retrieve", "Rank chunks per question for the active preset");
    CLI::App* cmd_generate =
        app.add_subcommand("generate", "Generate answers from the preset's rankings");
    CLI::App* cmd_evaluate =
        app.add_subcommand("evaluate", "Score the preset's run and write reports");
    CLI::App* cmd_report =
        app.add_subcommand("report", "Combine evaluated presets into one comparison table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        raglab::PipelineConfig cfg = raglab::load_config(config_path, preset);
        if (seed_opt->count() > 0) {
            cfg.seed = seed;
        }
        if (par_opt->count() > 0) {
            cfg.parallelism = parallelism;
        }
        if (fail_fast) {
            cfg.fail_fast = true;
        }

        if (cmd_index->parsed()) {
            raglab::cmd_index(cfg);
            print_stage_summary(cfg, "index");
        } else if (cmd_retrieve->parsed()) {
            raglab::cmd_retrieve(cfg);
            print_stage_summary(cfg, "retrieve");
        } else if (cmd_generate->parsed()) {
            raglab::cmd_generate(cfg);
            print_stage_summary(cfg, "generate");
        } else if (cmd_evaluate->parsed()) {
            raglab::EvalReport report = raglab::cmd_evaluate(cfg, format);
            if (format == "json") {
                std::cout << report.to_json().dump(2) << "\n";
            } else if (format == "csv") {
                std::cout << report.to_csv();
            } else {
                std::cout << report.to_markdown();
            }
        } else if (cmd_report->parsed()) {
            std::cout << raglab::cmd_report(cfg, format);
        }
    } catch (const raglab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const raglab::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const raglab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
