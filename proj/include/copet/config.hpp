#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "copet/synth.hpp"

namespace copet {

// Declarative run configuration. Defaults mirror the source analysis where
// it states them (item quantile 0.10, actor quantile 0.05, year boundaries)
// and documented choices elsewhere.
struct RunConfig {
    std::string shares_path;
    std::string items_path;
    std::string output_dir = "out";

    double item_quantile = 0.10;
    double actor_quantile = 0.05;
    bool drop_isolated_items = true;  // lone petitions removed by default
    bool drop_isolated_actors = false;
    std::uint32_t degree_warn_threshold = 50000;

    double resolution = 1.0;
    std::uint64_t louvain_seed = 0;

    double damping = 0.85;
    double pagerank_tol = 1e-10;
    int max_iter = 200;

    std::vector<std::int64_t> temporal_boundaries; // default: 2014-01-01, 2015-01-01
    std::size_t top_k_tokens = 30;
    std::size_t top_k_central = 10;

    int threads = 0; // 0 = all available, bounded by COPETITION_THREADS

    PlantedSpec synth;
};

struct ConfigError {
    std::string field;
    std::string message;
};

// Parses the JSON config file; returns field-level errors instead of a
// config when validation fails. Overrides are dotted key=value pairs
// (e.g. "projection.item_quantile=0.2") applied on top of the file.
struct ConfigParse {
    std::optional<RunConfig> config;
    std::vector<ConfigError> errors;
};

ConfigParse load_config(const std::string& path,
                        const std::vector<std::string>& overrides = {});
ConfigParse parse_config(const std::string& json_text,
                         const std::vector<std::string>& overrides = {});

// Effective OpenMP thread count: config value (0 = hardware), bounded by
// the COPETITION_THREADS environment variable when set.
int effective_threads(const RunConfig& config);

} // namespace copet
