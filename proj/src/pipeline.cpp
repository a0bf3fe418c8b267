#include "copet/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>
#include <omp.h>

#include "copet/bigraph.hpp"
#include "copet/centrality.hpp"
#include "copet/community.hpp"
#include "copet/ingest.hpp"
#include "copet/io_util.hpp"
#include "copet/projection.hpp"
#include "copet/stats.hpp"
#include "copet/synth.hpp"

namespace copet {

const char* kVersion = "0.1.0";

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string stage_dir(const RunConfig& config, const char* stage) {
    const std::string dir = config.output_dir + "/" + stage;
    fs::create_directories(dir);
    return dir;
}

// Semantic parameters only; machine-local paths stay out so the hash is
// stable across checkouts (input content is hashed separately).
json config_json(const RunConfig& c) {
    json j;
    j["projection"] = {{"item_quantile", c.item_quantile},
                       {"actor_quantile", c.actor_quantile},
                       {"drop_isolated_items", c.drop_isolated_items},
                       {"drop_isolated_actors", c.drop_isolated_actors},
                       {"degree_warn_threshold", c.degree_warn_threshold}};
    j["community"] = {{"resolution", c.resolution}, {"seed", c.louvain_seed}};
    j["pagerank"] = {{"damping", c.damping},
                     {"tol", c.pagerank_tol},
                     {"max_iter", c.max_iter}};
    j["stats"] = {{"temporal_boundaries", c.temporal_boundaries},
                  {"top_k_tokens", c.top_k_tokens},
                  {"top_k_central", c.top_k_central}};
    const PlantedSpec& s = c.synth;
    j["synth"] = {{"communities", s.communities},
                  {"actors_per_community", s.actors_per_community},
                  {"items_per_community", s.items_per_community},
                  {"p_in", s.p_in},
                  {"p_out", s.p_out},
                  {"signature_alpha", s.signature_alpha},
                  {"signature_beta", s.signature_beta},
                  {"signature_sigma", s.signature_sigma},
                  {"delay_fast_weight", s.delay_fast_weight},
                  {"delay_fast_median", s.delay_fast_median},
                  {"delay_fast_sigma", s.delay_fast_sigma},
                  {"delay_slow_median", s.delay_slow_median},
                  {"delay_slow_sigma", s.delay_slow_sigma},
                  {"follower_log_mean", s.follower_log_mean},
                  {"follower_log_sigma", s.follower_log_sigma},
                  {"verified_prob", s.verified_prob},
                  {"repeat_prob", s.repeat_prob},
                  {"departments", s.departments},
                  {"bio_tokens", s.bio_tokens},
                  {"item_time_start", s.item_time_start},
                  {"item_time_span", s.item_time_span},
                  {"seed", s.seed}};
    return j;
}

void write_manifest(const RunConfig& config, const char* stage,
                    const std::vector<std::pair<std::string, std::string>>& inputs) {
    json m;
    m["stage"] = stage;
    m["version"] = kVersion;
    m["config_hash"] = fnv1a64_hex(config_json(config).dump());
    json in = json::object();
    for (const auto& [name, path] : inputs) in[name] = file_hash_hex(path);
    m["inputs"] = std::move(in);
    write_file(config.output_dir + "/" + stage + "/manifest.json", m.dump(2) + "\n");
}

void require_artifact(const std::string& path) {
    if (!fs::exists(path)) throw IoError("missing artifact: " + path);
}

Dataset load_normalized(const RunConfig& config) {
    const std::string dir = config.output_dir + "/ingest";
    require_artifact(dir + "/shares.jsonl");
    require_artifact(dir + "/items.csv");
    ShareParse shares = parse_shares_file(dir + "/shares.jsonl");
    ItemParse items = parse_items_file(dir + "/items.csv");
    return join_dataset(std::move(shares.records), std::move(items.records));
}

json entry_json(const CorrelationEntry& e) {
    json j;
    j["n"] = e.n;
    j["value"] = e.value ? json(*e.value) : json();
    return j;
}

json regression_json(const RegressionResult& r) {
    json j;
    j["n"] = r.n;
    j["r2"] = r.r2;
    json coef = json::array();
    for (std::size_t i = 0; i < r.names.size(); ++i)
        coef.push_back({{"name", r.names[i]},
                        {"coef", r.coef[i]},
                        {"std_err", r.std_err[i]}});
    j["coefficients"] = std::move(coef);
    return j;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out += format_double(h.edges[i]);
        out.push_back(',');
        out += format_double(h.edges[i + 1]);
        out.push_back(',');
        out += std::to_string(h.counts[i]);
        out.push_back('\n');
    }
    return out;
}

std::string tokens_csv(const std::vector<TokenCount>& tokens) {
    std::string out = "token,count,log_weight\n";
    for (const TokenCount& t : tokens) {
        out += csv_escape(t.token);
        out.push_back(',');
        out += std::to_string(t.count);
        out.push_back(',');
        out += format_double(t.log_weight);
        out.push_back('\n');
    }
    return out;
}

json histogram_json(const Histogram& h) {
    return {{"edges", h.edges}, {"counts", h.counts}, {"total", h.total}};
}

struct SideArtifacts {
    const char* name;
    Side side;
    double quantile;
    bool drop_isolated;
};

std::vector<SideArtifacts> side_plan(const RunConfig& config) {
    return {{"item", Side::item, config.item_quantile, config.drop_isolated_items},
            {"actor", Side::actor, config.actor_quantile, config.drop_isolated_actors}};
}

} // namespace

void run_synth(const RunConfig& config) {
    const std::string dir = stage_dir(config, "synth");
    const SynthResult result = generate(config.synth);
    write_synth(result, dir);
    write_manifest(config, "synth", {});
}

void run_ingest(const RunConfig& config) {
    require_artifact(config.shares_path);
    require_artifact(config.items_path);
    const std::string dir = stage_dir(config, "ingest");

    ShareParse shares = parse_shares_file(config.shares_path);
    ItemParse items = parse_items_file(config.items_path);
    const std::size_t share_records = shares.records.size();
    const std::size_t item_records = items.records.size();
    write_file(dir + "/rejections_shares.csv", write_rejections_csv(shares.rejections));
    write_file(dir + "/rejections_items.csv", write_rejections_csv(items.rejections));

    Dataset dataset = join_dataset(std::move(shares.records), std::move(items.records));
    write_file(dir + "/shares.jsonl", write_shares_jsonl(dataset.shares));
    write_file(dir + "/items.csv", write_items_csv(dataset.items));

    json summary;
    summary["shares"] = share_records;
    summary["share_rejections"] = shares.rejections.size();
    summary["items"] = item_records;
    summary["item_rejections"] = items.rejections.size();
    summary["matched"] = dataset.matched;
    summary["unmatched"] = dataset.unmatched;
    write_file(dir + "/summary.json", summary.dump(2) + "\n");

    write_manifest(config, "ingest",
                   {{"shares", config.shares_path}, {"items", config.items_path}});
}

void run_project(const RunConfig& config) {
    const std::string ingest_dir = config.output_dir + "/ingest";
    const Dataset dataset = load_normalized(config);

    const std::string graphs_dir = stage_dir(config, "graphs");
    const BipartiteGraph graph = build_bigraph(dataset);
    save_bigraph(graph, graphs_dir + "/bigraph.cpb");

    const DegreeProfile profile = degree_profile(graph, dataset);
    json pj;
    pj["actors"] = profile.num_actors;
    pj["items"] = profile.num_items;
    pj["incidences"] = profile.incidences;
    pj["matched_shares"] = profile.matched_shares;
    auto opt = [](const auto& v) { return v ? json(*v) : json(); };
    pj["median_tweets"] = opt(profile.median_tweets);
    pj["median_users"] = opt(profile.median_users);
    pj["median_signatures"] = opt(profile.median_signatures);
    pj["max_tweets"] = opt(profile.max_tweets);
    pj["max_users"] = opt(profile.max_users);
    pj["max_signatures"] = opt(profile.max_signatures);
    write_file(graphs_dir + "/degree_profile.json", pj.dump(2) + "\n");
    write_manifest(config, "graphs", {{"shares", ingest_dir + "/shares.jsonl"},
                                      {"items", ingest_dir + "/items.csv"}});

    const std::string proj_dir = stage_dir(config, "projections");
    ProjectOptions opts;
    opts.degree_warn_threshold = config.degree_warn_threshold;
    json summary = json::object();
    for (const SideArtifacts& plan : side_plan(config)) {
        Projection raw = project(graph, plan.side, opts);
        weigh(raw);
        const std::size_t raw_edges = raw.edges.size();
        const Projection filtered =
            filter(raw, FilterSpec{plan.quantile, plan.drop_isolated});
        save_projection(filtered, proj_dir + "/" + plan.name + ".proj");
        write_file(proj_dir + "/" + plan.name + ".csv", projection_csv(filtered, graph));
        summary[plan.name] = {{"raw_edges", raw_edges},
                              {"kept_edges", filtered.edges.size()},
                              {"nodes", filtered.nodes.size()},
                              {"quantile", plan.quantile},
                              {"warnings", raw.warnings}};
    }
    write_file(proj_dir + "/summary.json", summary.dump(2) + "\n");
    write_manifest(config, "projections",
                   {{"shares", ingest_dir + "/shares.jsonl"},
                    {"items", ingest_dir + "/items.csv"}});
}

void run_communities(const RunConfig& config) {
    const std::string proj_dir = config.output_dir + "/projections";
    const std::string graphs_dir = config.output_dir + "/graphs";
    require_artifact(graphs_dir + "/bigraph.cpb");
    const BipartiteGraph graph = load_bigraph(graphs_dir + "/bigraph.cpb");
    const Dataset dataset = load_normalized(config);

    const std::string dir = stage_dir(config, "communities");
    json summary = json::object();
    for (const SideArtifacts& plan : side_plan(config)) {
        const std::string proj_path = proj_dir + "/" + plan.name + ".proj";
        require_artifact(proj_path);
        const Projection proj = load_projection(proj_path);
        json entry;
        try {
            const CommunityAssignment assignment =
                louvain(proj, config.resolution, config.louvain_seed);
            write_file(dir + "/" + plan.name + "_clusters.csv",
                       assignment_csv(assignment, graph, plan.side));
            std::vector<std::uint64_t> sizes = assignment.cluster_sizes;
            std::sort(sizes.rbegin(), sizes.rend());
            if (sizes.size() > 20) sizes.resize(20);
            entry = {{"clusters", assignment.cluster_count},
                     {"modularity", assignment.q},
                     {"levels", assignment.levels},
                     {"dropped_nonpositive_edges", assignment.dropped_nonpositive_edges},
                     {"largest_sizes", sizes}};
            if (plan.side == Side::actor) {
                const auto profiles =
                    cluster_profile(assignment, graph, dataset, config.top_k_tokens);
                write_file(dir + "/actor_cluster_profiles.json",
                           cluster_profiles_json(profiles));
            }
        } catch (const std::invalid_argument& e) {
            entry = {{"clusters", nullptr}, {"modularity", nullptr}, {"error", e.what()}};
        }
        summary[plan.name] = std::move(entry);
    }
    write_file(dir + "/summary.json", summary.dump(2) + "\n");
    write_manifest(config, "communities",
                   {{"item_proj", proj_dir + "/item.proj"},
                    {"actor_proj", proj_dir + "/actor.proj"},
                    {"bigraph", graphs_dir + "/bigraph.cpb"}});
}

void run_pagerank(const RunConfig& config) {
    const std::string proj_dir = config.output_dir + "/projections";
    const std::string graphs_dir = config.output_dir + "/graphs";
    require_artifact(graphs_dir + "/bigraph.cpb");
    const BipartiteGraph graph = load_bigraph(graphs_dir + "/bigraph.cpb");
    const Dataset dataset = load_normalized(config);

    const std::string dir = stage_dir(config, "centrality");
    PagerankOptions opts{config.damping, config.pagerank_tol, config.max_iter};
    json summary = json::object();
    for (const SideArtifacts& plan : side_plan(config)) {
        const std::string proj_path = proj_dir + "/" + plan.name + ".proj";
        require_artifact(proj_path);
        const Projection proj = load_projection(proj_path);
        json entry;
        try {
            const CentralityScores scores = pagerank(proj, opts);
            write_file(dir + "/" + plan.name + "_scores.csv",
                       scores_csv(scores, graph, plan.side));
            entry = {{"iterations", scores.iterations},
                     {"residual", scores.residual},
                     {"converged", scores.converged},
                     {"nodes", scores.nodes.size()}};
            if (plan.side == Side::actor) {
                const auto top = top_nodes(scores, config.top_k_central, graph, dataset);
                json rows = json::array();
                for (const CentralNode& row : top)
                    rows.push_back({{"actor_id", row.id},
                                    {"score", row.score},
                                    {"bio", row.bio},
                                    {"followers", row.followers},
                                    {"following", row.following},
                                    {"verified", row.verified},
                                    {"favorites_received", row.favorites_received},
                                    {"retweets_received", row.retweets_received},
                                    {"tweets_about_items", row.tweet_count},
                                    {"unique_items", row.unique_items}});
                write_file(dir + "/top_actors.json", rows.dump(2) + "\n");
            }
        } catch (const std::invalid_argument& e) {
            entry = {{"iterations", nullptr}, {"error", e.what()}};
        }
        summary[plan.name] = std::move(entry);
    }
    write_file(dir + "/summary.json", summary.dump(2) + "\n");
    write_manifest(config, "centrality",
                   {{"item_proj", proj_dir + "/item.proj"},
                    {"actor_proj", proj_dir + "/actor.proj"},
                    {"bigraph", graphs_dir + "/bigraph.cpb"}});
}

namespace {

json regressions_to_json(const std::vector<PetitionStats>& stats) {
    json out = json::array();
    try {
        const std::vector<RegressionResult> regs = signature_regressions(stats);
        for (std::size_t i = 0; i < regs.size(); ++i) {
            json r = regression_json(regs[i]);
            r["regression"] = i + 1;
            out.push_back(std::move(r));
        }
    } catch (const std::exception& e) {
        out = json::object();
        out["error"] = e.what();
    }
    return out;
}

} // namespace

void run_stats(const RunConfig& config) {
    const std::string graphs_dir = config.output_dir + "/graphs";
    const std::string proj_dir = config.output_dir + "/projections";
    require_artifact(graphs_dir + "/bigraph.cpb");
    require_artifact(proj_dir + "/item.proj");
    const BipartiteGraph graph = load_bigraph(graphs_dir + "/bigraph.cpb");
    const Dataset dataset = load_normalized(config);
    const Projection item_proj = load_projection(proj_dir + "/item.proj");

    const std::string dir = stage_dir(config, "stats");
    const std::vector<PetitionStats> stats = petition_stats(graph, dataset);

    {
        std::string csv =
            "item_id,signatures,tweets,users,unique_audience,total_exposure,"
            "department,created_at\n";
        for (const PetitionStats& st : stats) {
            csv += csv_escape(dataset.items[st.item].item_id);
            csv += "," + std::to_string(st.signatures);
            csv += "," + std::to_string(st.tweet_count);
            csv += "," + std::to_string(st.user_count);
            csv += "," + std::to_string(st.unique_audience);
            csv += "," + std::to_string(st.total_exposure);
            csv += "," + csv_escape(st.department);
            csv += "," + std::to_string(st.created_at);
            csv.push_back('\n');
        }
        write_file(dir + "/petition_stats.csv", csv);
    }

    write_file(dir + "/regressions.json", regressions_to_json(stats).dump(2) + "\n");

    // Correlation battery. PageRank is re-derived from the projection (same
    // parameters, deterministic) so the stats stage does not depend on the
    // centrality stage having run.
    CentralityScores item_scores;
    try {
        item_scores = pagerank(item_proj,
                               {config.damping, config.pagerank_tol, config.max_iter});
    } catch (const std::invalid_argument&) {
    }
    const CorrelationReport corr = scalar_correlates(dataset, stats, item_proj, item_scores);
    json cj;
    cj["signatures_vs_tweets"] = entry_json(corr.signatures_vs_tweets);
    cj["signatures_vs_users"] = entry_json(corr.signatures_vs_users);
    cj["weight_vs_sig_product"] = entry_json(corr.weight_vs_sig_product);
    cj["pagerank_vs_signatures"] = entry_json(corr.pagerank_vs_signatures);
    cj["pagerank_vs_signatures_ge_10k"] = entry_json(corr.pagerank_vs_signatures_ge_10k);
    cj["favorites_vs_signatures"] = entry_json(corr.favorites_vs_signatures);
    cj["retweets_vs_signatures"] = entry_json(corr.retweets_vs_signatures);
    cj["verified_tweets_vs_signatures"] = entry_json(corr.verified_tweets_vs_signatures);
    write_file(dir + "/correlations.json", cj.dump(2) + "\n");

    const DelayAnalysis delay = delay_histogram(dataset);
    write_file(dir + "/hist_delay.csv", histogram_csv(delay.hist));
    const ThresholdProfile threshold = threshold_profile(dataset);
    write_file(dir + "/hist_threshold.csv", histogram_csv(threshold.hist));

    // Per-item distributions in the shape of the headline figures.
    std::vector<double> sig_values, tweet_values;
    for (const PetitionStats& st : stats) {
        sig_values.push_back(static_cast<double>(st.signatures));
        tweet_values.push_back(static_cast<double>(st.tweet_count));
    }
    write_file(dir + "/hist_signatures.csv", histogram_csv(log10_histogram(sig_values)));
    write_file(dir + "/hist_tweets.csv", histogram_csv(log10_histogram(tweet_values)));

    {
        std::vector<std::string> titles_10k;
        for (const PetitionStats& st : stats)
            if (st.signatures >= 10000) titles_10k.push_back(dataset.items[st.item].title);
        write_file(dir + "/words_titles_10k.csv", tokens_csv(word_freq(titles_10k)));

        std::vector<std::string> bios;
        std::unordered_set<std::string_view> seen_actor;
        for (const ShareRecord& share : dataset.shares)
            if (seen_actor.insert(share.actor_id).second && !share.bio.empty())
                bios.push_back(share.bio);
        write_file(dir + "/words_bios.csv", tokens_csv(word_freq(bios)));
    }

    // Temporal sub-networks: item-side projection + Louvain per bucket.
    {
        const std::vector<Dataset> splits =
            temporal_split(dataset, config.temporal_boundaries);
        json buckets = json::array();
        for (std::size_t b = 0; b < splits.size(); ++b) {
            json entry;
            entry["bucket"] = b;
            entry["from"] = b == 0 ? json() : json(config.temporal_boundaries[b - 1]);
            entry["to"] = b < config.temporal_boundaries.size()
                              ? json(config.temporal_boundaries[b])
                              : json();
            entry["items"] = splits[b].items.size();
            entry["shares"] = splits[b].shares.size();
            entry["modularity"] = json();
            entry["clusters"] = json();
            if (!splits[b].items.empty() && splits[b].matched > 0) {
                const BipartiteGraph sub_graph = build_bigraph(splits[b]);
                Projection sub = project(sub_graph, Side::item);
                weigh(sub);
                const Projection sub_filtered = filter(
                    sub, FilterSpec{config.item_quantile, config.drop_isolated_items});
                try {
                    const CommunityAssignment sub_assign =
                        louvain(sub_filtered, config.resolution, config.louvain_seed);
                    entry["modularity"] = sub_assign.q;
                    entry["clusters"] = sub_assign.cluster_count;
                } catch (const std::invalid_argument&) {
                }
            }
            buckets.push_back(std::move(entry));
        }
        write_file(dir + "/temporal.json", buckets.dump(2) + "\n");
    }

    json summary;
    summary["delay_median_excluded_negative"] = delay.negative_excluded;
    summary["delay_tweets_corr"] =
        delay.delay_tweets_corr ? json(*delay.delay_tweets_corr) : json();
    summary["delay_mode_bins"] = local_maxima(delay.hist);
    summary["threshold_median"] = threshold.median ? json(*threshold.median) : json();
    summary["threshold_frac_ge_10k"] = threshold.frac_ge_10k;
    summary["threshold_frac_ge_100k"] = threshold.frac_ge_100k;
    summary["delay_hist"] = histogram_json(delay.hist);
    summary["threshold_hist"] = histogram_json(threshold.hist);
    write_file(dir + "/summary.json", summary.dump(2) + "\n");

    write_manifest(config, "stats",
                   {{"bigraph", graphs_dir + "/bigraph.cpb"},
                    {"item_proj", proj_dir + "/item.proj"}});
}

void run_regress(const RunConfig& config) {
    const std::string graphs_dir = config.output_dir + "/graphs";
    require_artifact(graphs_dir + "/bigraph.cpb");
    const BipartiteGraph graph = load_bigraph(graphs_dir + "/bigraph.cpb");
    const Dataset dataset = load_normalized(config);
    const std::string dir = stage_dir(config, "stats");
    const std::vector<PetitionStats> stats = petition_stats(graph, dataset);
    write_file(dir + "/regressions.json", regressions_to_json(stats).dump(2) + "\n");
    write_manifest(config, "stats", {{"bigraph", graphs_dir + "/bigraph.cpb"}});
}

namespace {

std::string fmt(double v, int precision = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::string opt_fmt(const json& v, int precision = 4) {
    if (v.is_null()) return "undefined";
    return fmt(v.get<double>(), precision);
}

void two_column_plot(const std::string& src_csv, const std::string& dst,
                     const std::string& comment) {
    const std::string csv = slurp_file(src_csv);
    std::string out = "# " + comment + "\n";
    bool first = true;
    for (const std::string_view line : split_lines(csv)) {
        if (first) { // header
            first = false;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (!fields || fields->size() < 3) continue;
        out += (*fields)[0] + " " + (*fields)[2] + "\n";
    }
    write_file(dst, out);
}

} // namespace

void run_report(const RunConfig& config) {
    const std::string out_dir = config.output_dir;
    const char* needed[] = {"/ingest/summary.json",     "/graphs/degree_profile.json",
                            "/projections/summary.json", "/communities/summary.json",
                            "/centrality/summary.json",  "/stats/summary.json",
                            "/stats/correlations.json",  "/stats/regressions.json",
                            "/stats/temporal.json"};
    for (const char* path : needed) require_artifact(out_dir + path);

    const json ingest = json::parse(slurp_file(out_dir + "/ingest/summary.json"));
    const json degrees = json::parse(slurp_file(out_dir + "/graphs/degree_profile.json"));
    const json projections = json::parse(slurp_file(out_dir + "/projections/summary.json"));
    const json communities = json::parse(slurp_file(out_dir + "/communities/summary.json"));
    const json centrality = json::parse(slurp_file(out_dir + "/centrality/summary.json"));
    const json stats = json::parse(slurp_file(out_dir + "/stats/summary.json"));
    const json correlations = json::parse(slurp_file(out_dir + "/stats/correlations.json"));
    const json regressions = json::parse(slurp_file(out_dir + "/stats/regressions.json"));
    const json temporal = json::parse(slurp_file(out_dir + "/stats/temporal.json"));

    const std::string dir = stage_dir(config, "report");
    std::string t;
    t += "copetition report\n";
    t += "=================\n\n";

    t += "Dataset\n";
    t += "  shares (deduplicated): " + ingest["shares"].dump() + "\n";
    t += "  rejected share lines:  " + ingest["share_rejections"].dump() + "\n";
    t += "  items:                 " + ingest["items"].dump() + "\n";
    t += "  matched shares:        " + ingest["matched"].dump() + "\n";
    t += "  unmatched shares:      " + ingest["unmatched"].dump() + "\n\n";

    t += "Bipartite graph\n";
    t += "  actors: " + degrees["actors"].dump() + "  items: " + degrees["items"].dump() +
         "  incidences: " + degrees["incidences"].dump() + "\n";
    t += "  per-item medians: tweets " + opt_fmt(degrees["median_tweets"], 1) + ", users " +
         opt_fmt(degrees["median_users"], 1) + ", signatures " +
         opt_fmt(degrees["median_signatures"], 1) + "\n";
    t += "  per-item maxima:  tweets " + degrees["max_tweets"].dump() + ", users " +
         degrees["max_users"].dump() + ", signatures " + degrees["max_signatures"].dump() +
         "\n\n";

    t += "Projections (significance-filtered)\n";
    for (const char* side : {"item", "actor"}) {
        const json& p = projections[side];
        t += std::string("  ") + side + ": nodes " + p["nodes"].dump() + ", edges " +
             p["kept_edges"].dump() + " of " + p["raw_edges"].dump() +
             " (q=" + fmt(p["quantile"].get<double>(), 2) + ")\n";
    }
    t += "\nCommunities (Louvain)\n";
    for (const char* side : {"item", "actor"}) {
        const json& c = communities[side];
        if (c["modularity"].is_null()) {
            t += std::string("  ") + side + ": undefined (" +
                 c.value("error", std::string("no data")) + ")\n";
        } else {
            t += std::string("  ") + side + ": clusters " + c["clusters"].dump() +
                 ", modularity " + fmt(c["modularity"].get<double>(), 3) + "/1.000\n";
        }
    }

    t += "\nCentrality (PageRank)\n";
    for (const char* side : {"item", "actor"}) {
        const json& c = centrality[side];
        if (c["iterations"].is_null()) {
            t += std::string("  ") + side + ": undefined (" +
                 c.value("error", std::string("no data")) + ")\n";
        } else {
            t += std::string("  ") + side + ": iterations " + c["iterations"].dump() +
                 ", converged " + c["converged"].dump() + "\n";
        }
    }
    const std::string top_path = out_dir + "/centrality/top_actors.json";
    if (fs::exists(top_path)) {
        const json top = json::parse(slurp_file(top_path));
        t += "  top central actors (score, id, tweets, unique items, followers):\n";
        for (const json& row : top) {
            t += "    " + fmt(row["score"].get<double>(), 7) + "  " +
                 row["actor_id"].get<std::string>() + "  " +
                 row["tweets_about_items"].dump() + "  " + row["unique_items"].dump() +
                 "  " + row["followers"].dump() + "\n";
        }
    }

    t += "\nCorrelations (Pearson of ln(1+x))\n";
    const char* corr_keys[] = {"signatures_vs_tweets",
                               "signatures_vs_users",
                               "weight_vs_sig_product",
                               "pagerank_vs_signatures",
                               "pagerank_vs_signatures_ge_10k",
                               "favorites_vs_signatures",
                               "retweets_vs_signatures",
                               "verified_tweets_vs_signatures"};
    for (const char* key : corr_keys) {
        const json& e = correlations[key];
        std::string name(key);
        name.resize(32, ' ');
        t += "  " + name + " " + opt_fmt(e["value"]) + "  (n=" + e["n"].dump() + ")\n";
    }

    t += "\nRegressions (ln(1+signatures) response)\n";
    if (regressions.is_array()) {
        for (const json& r : regressions) {
            t += "  R" + r["regression"].dump() + ": R2=" + fmt(r["r2"].get<double>()) +
                 ", n=" + r["n"].dump() + "\n";
            for (const json& c : r["coefficients"]) {
                std::string name = c["name"].get<std::string>();
                name.resize(24, ' ');
                t += "      " + name + " " + fmt(c["coef"].get<double>()) + " (se " +
                     fmt(c["std_err"].get<double>()) + ")\n";
            }
        }
    } else {
        t += "  undefined (" + regressions.value("error", std::string()) + ")\n";
    }

    t += "\nTweet timing\n";
    t += "  tweets predating their petition (excluded): " +
         stats["delay_median_excluded_negative"].dump() + "\n";
    t += "  per-item delay vs tweet count (loglog):     " +
         opt_fmt(stats["delay_tweets_corr"]) + "\n";
    t += "  delay histogram modes (3-bin smoothed):     " +
         stats["delay_mode_bins"].dump() + "\n";

    t += "\nThreshold profile (signatures at share)\n";
    t += "  median:             " + opt_fmt(stats["threshold_median"], 1) + "\n";
    t += "  fraction >= 10000:  " + fmt(stats["threshold_frac_ge_10k"].get<double>()) + "\n";
    t += "  fraction >= 100000: " + fmt(stats["threshold_frac_ge_100k"].get<double>()) +
         "\n";

    t += "\nTemporal sub-networks (item projection per petition-date bucket)\n";
    for (const json& b : temporal) {
        t += "  bucket " + b["bucket"].dump() + ": items " + b["items"].dump() +
             ", shares " + b["shares"].dump() + ", modularity " +
             opt_fmt(b["modularity"], 3) + "\n";
    }

    write_file(dir + "/summary.txt", t);

    two_column_plot(out_dir + "/stats/hist_delay.csv", dir + "/hist_delay.dat",
                    "delay_s count");
    two_column_plot(out_dir + "/stats/hist_threshold.csv", dir + "/hist_threshold.dat",
                    "signatures count");
    two_column_plot(out_dir + "/stats/hist_signatures.csv", dir + "/hist_signatures.dat",
                    "signatures petitions");
    two_column_plot(out_dir + "/stats/hist_tweets.csv", dir + "/hist_tweets.dat",
                    "tweets petitions");

    write_manifest(config, "report", {{"stats_summary", out_dir + "/stats/summary.json"}});
}

void run_pipeline(const RunConfig& config) {
    run_ingest(config);
    run_project(config);
    run_communities(config);
    run_pagerank(config);
    run_stats(config);
    run_report(config);
}

RunLock::RunLock(const std::string& output_dir) {
    fs::create_directories(output_dir);
    path_ = output_dir + "/.copetition.lock";
    const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw IoError("output directory is locked by another run: " + path_);
    ::close(fd);
}

RunLock::~RunLock() { ::unlink(path_.c_str()); }

} // namespace copet
