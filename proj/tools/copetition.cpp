// Pipeline CLI: copetition <subcommand> --config <path> [--override k=v]...
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <omp.h>

#include "copet/config.hpp"
#include "copet/io_util.hpp"
#include "copet/pipeline.hpp"

namespace {

int fail_config(const std::vector<copet::ConfigError>& errors) {
    for (const copet::ConfigError& e : errors)
        std::fprintf(stderr, "config error: %s: %s\n", e.field.c_str(),
                     e.message.c_str());
    return 2;
}

// Stages that read the raw input files check their existence up front; a
// bad path is a config problem, not a runtime failure.
bool needs_inputs(const std::string& subcommand) {
    return subcommand == "ingest" || subcommand == "pipeline";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"petition co-sharing network analysis pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    const std::vector<std::pair<std::string, std::function<void(const copet::RunConfig&)>>>
        stages = {
            {"synth", copet::run_synth},         {"ingest", copet::run_ingest},
            {"project", copet::run_project},     {"communities", copet::run_communities},
            {"pagerank", copet::run_pagerank},   {"stats", copet::run_stats},
            {"regress", copet::run_regress},     {"report", copet::run_report},
            {"pipeline", copet::run_pipeline},
        };

    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, fn] : stages) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--override", overrides,
                        "dotted key=value override, e.g. projection.item_quantile=0.2");
        subs[name] = sub;
    }

    CLI11_PARSE(app, argc, argv);

    const std::string subcommand = app.get_subcommands().front()->get_name();
    copet::ConfigParse parsed = copet::load_config(config_path, overrides);
    if (!parsed.config) return fail_config(parsed.errors);
    const copet::RunConfig& config = *parsed.config;

    if (needs_inputs(subcommand)) {
        std::vector<copet::ConfigError> missing;
        if (!std::filesystem::exists(config.shares_path))
            missing.push_back({"input.shares", "file not found: " + config.shares_path});
        if (!std::filesystem::exists(config.items_path))
            missing.push_back({"input.items", "file not found: " + config.items_path});
        if (!missing.empty()) return fail_config(missing);
    }

    omp_set_num_threads(copet::effective_threads(config));

    try {
        copet::RunLock lock(config.output_dir);
        for (const auto& [name, fn] : stages) {
            if (name == subcommand) {
                fn(config);
                break;
            }
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", subcommand.c_str(), e.what());
        return 1;
    }
    return 0;
}
