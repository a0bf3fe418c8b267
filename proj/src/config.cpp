#include "copet/config.hpp"

#include <cstdlib>
#include <filesystem>

#include <json.hpp>
#include <omp.h>

#include "copet/io_util.hpp"

namespace copet {

namespace {

using nlohmann::json;

struct Cursor {
    const json& root;
    std::vector<ConfigError>& errors;

    const json* section(const char* name) const {
        auto it = root.find(name);
        if (it == root.end()) return nullptr;
        if (!it->is_object()) {
            errors.push_back({name, "expected an object"});
            return nullptr;
        }
        return &*it;
    }
};

template <typename T>
void read_number(const json* section, const char* section_name, const char* key,
                 T& out, std::vector<ConfigError>& errors) {
    if (!section) return;
    auto it = section->find(key);
    if (it == section->end()) return;
    if (!it->is_number()) {
        errors.push_back({std::string(section_name) + "." + key, "expected a number"});
        return;
    }
    out = it->get<T>();
}

void read_bool(const json* section, const char* section_name, const char* key, bool& out,
               std::vector<ConfigError>& errors) {
    if (!section) return;
    auto it = section->find(key);
    if (it == section->end()) return;
    if (!it->is_boolean()) {
        errors.push_back({std::string(section_name) + "." + key, "expected a boolean"});
        return;
    }
    out = it->get<bool>();
}

void read_string(const json* section, const char* section_name, const char* key,
                 std::string& out, std::vector<ConfigError>& errors) {
    if (!section) return;
    auto it = section->find(key);
    if (it == section->end()) return;
    if (!it->is_string()) {
        errors.push_back({std::string(section_name) + "." + key, "expected a string"});
        return;
    }
    out = it->get<std::string>();
}

// "a.b.c=value" applied into the json tree; values parse as JSON when they
// can (numbers, booleans) and fall back to strings.
bool apply_override(json& root, const std::string& text) {
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos || eq == 0) return false;
    const std::string path = text.substr(0, eq);
    const std::string value = text.substr(eq + 1);

    json* node = &root;
    std::size_t start = 0;
    for (;;) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) return false;
        if (dot == std::string::npos) {
            json parsed = json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? json(value) : parsed;
            return true;
        }
        node = &(*node)[key];
        if (!node->is_object() && !node->is_null()) return false;
        start = dot + 1;
    }
}

} // namespace

ConfigParse parse_config(const std::string& json_text,
                         const std::vector<std::string>& overrides) {
    ConfigParse result;
    json root = json::parse(json_text, nullptr, false);
    if (root.is_discarded() || !root.is_object()) {
        result.errors.push_back({"<root>", "config is not a JSON object"});
        return result;
    }
    for (const std::string& text : overrides) {
        if (!apply_override(root, text)) {
            result.errors.push_back({"--override", "cannot apply '" + text + "'"});
            return result;
        }
    }

    RunConfig config;
    std::vector<ConfigError>& errors = result.errors;
    Cursor cur{root, errors};

    if (const json* input = cur.section("input")) {
        read_string(input, "input", "shares", config.shares_path, errors);
        read_string(input, "input", "items", config.items_path, errors);
    }
    read_string(&root, "<root>", "output_dir", config.output_dir, errors);
    {
        auto it = root.find("threads");
        if (it != root.end()) {
            if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
                errors.push_back({"threads", "expected a non-negative integer"});
            else
                config.threads = it->get<int>();
        }
    }

    if (const json* proj = cur.section("projection")) {
        read_number(proj, "projection", "item_quantile", config.item_quantile, errors);
        read_number(proj, "projection", "actor_quantile", config.actor_quantile, errors);
        read_bool(proj, "projection", "drop_isolated_items", config.drop_isolated_items,
                  errors);
        read_bool(proj, "projection", "drop_isolated_actors", config.drop_isolated_actors,
                  errors);
        read_number(proj, "projection", "degree_warn_threshold",
                    config.degree_warn_threshold, errors);
    }
    if (const json* community = cur.section("community")) {
        read_number(community, "community", "resolution", config.resolution, errors);
        read_number(community, "community", "seed", config.louvain_seed, errors);
    }
    if (const json* pr = cur.section("pagerank")) {
        read_number(pr, "pagerank", "damping", config.damping, errors);
        read_number(pr, "pagerank", "tol", config.pagerank_tol, errors);
        read_number(pr, "pagerank", "max_iter", config.max_iter, errors);
    }

    config.temporal_boundaries = {timestamp_from_civil(2014, 1, 1),
                                  timestamp_from_civil(2015, 1, 1)};
    if (const json* stats = cur.section("stats")) {
        auto it = stats->find("temporal_boundaries");
        if (it != stats->end()) {
            if (!it->is_array()) {
                errors.push_back({"stats.temporal_boundaries", "expected an array"});
            } else {
                config.temporal_boundaries.clear();
                for (const json& v : *it) {
                    std::optional<std::int64_t> ts;
                    if (v.is_number_integer())
                        ts = v.get<std::int64_t>();
                    else if (v.is_string())
                        ts = parse_timestamp(v.get_ref<const std::string&>());
                    if (!ts) {
                        errors.push_back({"stats.temporal_boundaries",
                                          "entries must be timestamps"});
                        break;
                    }
                    config.temporal_boundaries.push_back(*ts);
                }
            }
        }
        read_number(stats, "stats", "top_k_tokens", config.top_k_tokens, errors);
        read_number(stats, "stats", "top_k_central", config.top_k_central, errors);
    }

    if (const json* synth = cur.section("synth")) {
        PlantedSpec& s = config.synth;
        read_number(synth, "synth", "communities", s.communities, errors);
        read_number(synth, "synth", "actors_per_community", s.actors_per_community, errors);
        read_number(synth, "synth", "items_per_community", s.items_per_community, errors);
        read_number(synth, "synth", "p_in", s.p_in, errors);
        read_number(synth, "synth", "p_out", s.p_out, errors);
        read_number(synth, "synth", "signature_alpha", s.signature_alpha, errors);
        read_number(synth, "synth", "signature_beta", s.signature_beta, errors);
        read_number(synth, "synth", "signature_sigma", s.signature_sigma, errors);
        read_number(synth, "synth", "delay_fast_weight", s.delay_fast_weight, errors);
        read_number(synth, "synth", "delay_fast_median", s.delay_fast_median, errors);
        read_number(synth, "synth", "delay_fast_sigma", s.delay_fast_sigma, errors);
        read_number(synth, "synth", "delay_slow_median", s.delay_slow_median, errors);
        read_number(synth, "synth", "delay_slow_sigma", s.delay_slow_sigma, errors);
        read_number(synth, "synth", "follower_log_mean", s.follower_log_mean, errors);
        read_number(synth, "synth", "follower_log_sigma", s.follower_log_sigma, errors);
        read_number(synth, "synth", "verified_prob", s.verified_prob, errors);
        read_number(synth, "synth", "repeat_prob", s.repeat_prob, errors);
        read_number(synth, "synth", "departments", s.departments, errors);
        read_number(synth, "synth", "bio_tokens", s.bio_tokens, errors);
        read_number(synth, "synth", "item_time_start", s.item_time_start, errors);
        read_number(synth, "synth", "item_time_span", s.item_time_span, errors);
        read_number(synth, "synth", "seed", s.seed, errors);
    }

    // Range validation with field-level messages.
    auto check = [&](bool ok, const char* field, const std::string& msg) {
        if (!ok) errors.push_back({field, msg});
    };
    check(config.item_quantile > 0.0 && config.item_quantile <= 1.0,
          "projection.item_quantile", "must be in (0,1]");
    check(config.actor_quantile > 0.0 && config.actor_quantile <= 1.0,
          "projection.actor_quantile", "must be in (0,1]");
    check(config.resolution > 0.0, "community.resolution", "must be positive");
    check(config.damping >= 0.0 && config.damping < 1.0, "pagerank.damping",
          "must be in [0,1)");
    check(config.pagerank_tol > 0.0, "pagerank.tol", "must be positive");
    check(config.max_iter >= 1, "pagerank.max_iter", "must be >= 1");
    for (std::size_t i = 1; i < config.temporal_boundaries.size(); ++i)
        check(config.temporal_boundaries[i] > config.temporal_boundaries[i - 1],
              "stats.temporal_boundaries", "must be strictly increasing");
    check(config.synth.communities >= 1, "synth.communities", "must be >= 1");
    check(config.synth.p_out >= 0.0 && config.synth.p_out < config.synth.p_in &&
              config.synth.p_in <= 1.0,
          "synth.p_in", "need 0 <= p_out < p_in <= 1");
    check(config.synth.signature_sigma >= 0.0, "synth.signature_sigma", "must be >= 0");

    if (errors.empty()) result.config = std::move(config);
    return result;
}

ConfigParse load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::string text;
    try {
        text = slurp_file(path);
    } catch (const IoError& e) {
        ConfigParse result;
        result.errors.push_back({"<config>", e.what()});
        return result;
    }
    return parse_config(text, overrides);
}

int effective_threads(const RunConfig& config) {
    int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
    if (const char* env = std::getenv("COPETITION_THREADS")) {
        const int bound = std::atoi(env);
        if (bound > 0) threads = std::min(threads, bound);
    }
    return std::max(1, threads);
}

} // namespace copet
