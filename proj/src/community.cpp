#include "copet/community.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "copet/io_util.hpp"
#include "copet/rng.hpp"
#include "copet/stats.hpp"

namespace copet {

namespace {

constexpr double kMoveTol = 1e-9; // a move must improve Q by more than this

// Aggregated working graph. Off-diagonal weights are stored once per
// direction; diag[u] is the collapsed intra weight with both directions
// already summed (the A_uu convention), so sum(volume) == 2m at every level.
struct LevelGraph {
    std::uint32_t n = 0;
    std::vector<std::uint64_t> off;
    std::vector<std::uint32_t> adj;
    std::vector<double> w;
    std::vector<double> diag;
    std::vector<double> volume;
    double m = 0.0; // total edge weight, diag counted once as a loop
};

double level_modularity(const LevelGraph& g, std::span<const std::uint32_t> comm,
                        double resolution) {
    std::uint32_t nc = 0;
    for (const std::uint32_t c : comm) nc = std::max(nc, c + 1);
    std::vector<double> intra(nc, 0.0), vol(nc, 0.0);
    for (std::uint32_t u = 0; u < g.n; ++u) {
        intra[comm[u]] += g.diag[u];
        vol[comm[u]] += g.volume[u];
        for (std::uint64_t k = g.off[u]; k < g.off[u + 1]; ++k)
            if (comm[g.adj[k]] == comm[u]) intra[comm[u]] += g.w[k];
    }
    const double two_m = 2.0 * g.m;
    double q = 0.0;
    for (std::uint32_t c = 0; c < nc; ++c)
        q += intra[c] / two_m - resolution * (vol[c] / two_m) * (vol[c] / two_m);
    return q;
}

// One level of local moves. Returns the number of accepted moves; comm is
// renumbered densely afterwards by the caller.
std::uint64_t local_move(const LevelGraph& g, std::vector<std::uint32_t>& comm,
                         std::span<const std::uint32_t> order, double resolution,
                         int& sweeps) {
    std::vector<double> vol_comm(g.volume);
    std::vector<double> affinity(g.n, 0.0);
    std::vector<std::uint32_t> touched;
    touched.reserve(64);

    const double m = g.m;
    std::uint64_t total_moves = 0;
    double q_prev = level_modularity(g, comm, resolution);

    bool moved = true;
    while (moved) {
        moved = false;
        for (const std::uint32_t u : order) {
            const std::uint32_t c_u = comm[u];
            touched.clear();
            for (std::uint64_t k = g.off[u]; k < g.off[u + 1]; ++k) {
                const std::uint32_t d = comm[g.adj[k]];
                // weights are strictly positive here, so 0 means first touch
                if (affinity[d] == 0.0) touched.push_back(d);
                affinity[d] += g.w[k];
            }
            const double aff_c = affinity[c_u];
            const double vol_u = g.volume[u];
            const double vol_c_wo_u = vol_comm[c_u] - vol_u;

            double best_gain = kMoveTol;
            std::uint32_t best = c_u;
            for (const std::uint32_t d : touched) {
                if (d == c_u) continue;
                const double gain =
                    (affinity[d] - aff_c) / m -
                    resolution * vol_u * (vol_comm[d] - vol_c_wo_u) / (2.0 * m * m);
                if (gain > best_gain || (gain == best_gain && best != c_u && d < best)) {
                    best_gain = gain;
                    best = d;
                }
            }
            for (const std::uint32_t d : touched) affinity[d] = 0.0;

            if (best != c_u) {
                vol_comm[c_u] -= vol_u;
                vol_comm[best] += vol_u;
                comm[u] = best;
                moved = true;
                ++total_moves;
            }
        }
        ++sweeps;
        // Every accepted move improves Q by more than kMoveTol, so the
        // from-scratch value must not decrease (tiny fp slack allowed).
        const double q_now = level_modularity(g, comm, resolution);
        if (q_now < q_prev - 1e-12)
            throw std::logic_error("modularity decreased across a sweep");
        q_prev = q_now;
    }
    return total_moves;
}

std::uint32_t renumber(std::vector<std::uint32_t>& comm) {
    std::vector<std::uint32_t> remap(comm.size(), UINT32_MAX);
    std::uint32_t next = 0;
    for (std::uint32_t& c : comm) {
        if (remap[c] == UINT32_MAX) remap[c] = next++;
        c = remap[c];
    }
    return next;
}

LevelGraph aggregate(const LevelGraph& g, std::span<const std::uint32_t> comm,
                     std::uint32_t n_new) {
    LevelGraph out;
    out.n = n_new;
    out.diag.assign(n_new, 0.0);
    out.volume.assign(n_new, 0.0);
    out.m = g.m;

    struct Entry {
        std::uint32_t a, b;
        double w;
    };
    std::vector<Entry> cross;
    for (std::uint32_t u = 0; u < g.n; ++u) {
        out.diag[comm[u]] += g.diag[u];
        out.volume[comm[u]] += g.volume[u];
        for (std::uint64_t k = g.off[u]; k < g.off[u + 1]; ++k) {
            const std::uint32_t cu = comm[u], cv = comm[g.adj[k]];
            if (cu == cv)
                out.diag[cu] += g.w[k];
            else
                cross.push_back({cu, cv, g.w[k]});
        }
    }
    std::sort(cross.begin(), cross.end(), [](const Entry& l, const Entry& r) {
        return std::tie(l.a, l.b) < std::tie(r.a, r.b);
    });

    out.off.assign(n_new + 1, 0);
    for (std::size_t i = 0; i < cross.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < cross.size() && cross[j].a == cross[i].a && cross[j].b == cross[i].b)
            sum += cross[j++].w;
        out.adj.push_back(cross[i].b);
        out.w.push_back(sum);
        ++out.off[cross[i].a + 1];
        i = j;
    }
    for (std::uint32_t c = 0; c < n_new; ++c) out.off[c + 1] += out.off[c];
    return out;
}

} // namespace

double modularity(const Projection& proj, std::span<const std::uint32_t> cluster,
                  double resolution) {
    if (cluster.size() != proj.nodes.size())
        throw std::invalid_argument("assignment must cover all projection nodes");
    std::vector<std::uint32_t> position(proj.side_node_count, UINT32_MAX);
    for (std::uint32_t i = 0; i < proj.nodes.size(); ++i) position[proj.nodes[i]] = i;

    std::uint32_t nc = 0;
    for (const std::uint32_t c : cluster) nc = std::max(nc, c + 1);
    std::vector<double> intra(nc, 0.0), vol(nc, 0.0);
    double m = 0.0;
    for (const ProjectionEdge& e : proj.edges) {
        const std::uint32_t pa = position[e.a], pb = position[e.b];
        m += e.weight;
        vol[cluster[pa]] += e.weight;
        vol[cluster[pb]] += e.weight;
        if (cluster[pa] == cluster[pb]) intra[cluster[pa]] += 2.0 * e.weight;
    }
    if (m == 0.0) return 0.0;
    const double two_m = 2.0 * m;
    double q = 0.0;
    for (std::uint32_t c = 0; c < nc; ++c)
        q += intra[c] / two_m - resolution * (vol[c] / two_m) * (vol[c] / two_m);
    return q;
}

CommunityAssignment louvain(const Projection& proj, double resolution, std::uint64_t seed) {
    if (proj.edges.empty()) throw std::invalid_argument("louvain: no edges");

    CommunityAssignment result;
    result.nodes = proj.nodes;
    const std::uint32_t n = static_cast<std::uint32_t>(proj.nodes.size());

    std::vector<std::uint32_t> position(proj.side_node_count, UINT32_MAX);
    for (std::uint32_t i = 0; i < n; ++i) position[proj.nodes[i]] = i;

    // Below-chance (non-positive) weights would make the standard modularity
    // objective ill-defined; drop them up front and report the count.
    LevelGraph g;
    g.n = n;
    std::vector<std::uint32_t> degree(n, 0);
    std::uint64_t kept = 0;
    for (const ProjectionEdge& e : proj.edges) {
        const double w = proj.weighted ? e.weight : static_cast<double>(e.co_count);
        if (w <= 0.0) {
            ++result.dropped_nonpositive_edges;
            continue;
        }
        ++degree[position[e.a]];
        ++degree[position[e.b]];
        ++kept;
    }
    if (kept == 0) throw std::invalid_argument("louvain: no edges with positive weight");

    g.off.assign(n + 1, 0);
    for (std::uint32_t u = 0; u < n; ++u) g.off[u + 1] = g.off[u] + degree[u];
    g.adj.resize(2 * kept);
    g.w.resize(2 * kept);
    {
        std::vector<std::uint64_t> cursor(g.off.begin(), g.off.end() - 1);
        for (const ProjectionEdge& e : proj.edges) {
            const double w = proj.weighted ? e.weight : static_cast<double>(e.co_count);
            if (w <= 0.0) continue;
            const std::uint32_t pa = position[e.a], pb = position[e.b];
            g.adj[cursor[pa]] = pb;
            g.w[cursor[pa]++] = w;
            g.adj[cursor[pb]] = pa;
            g.w[cursor[pb]++] = w;
        }
    }
    g.diag.assign(n, 0.0);
    g.volume.assign(n, 0.0);
    for (std::uint32_t u = 0; u < n; ++u) {
        double v = 0.0;
        for (std::uint64_t k = g.off[u]; k < g.off[u + 1]; ++k) v += g.w[k];
        g.volume[u] = v;
        g.m += v;
    }
    g.m /= 2.0;

    Rng rng(seed);
    std::vector<std::uint32_t> current(n); // node -> community across levels
    std::iota(current.begin(), current.end(), 0u);

    int sweeps = 0;
    for (;;) {
        std::vector<std::uint32_t> order(g.n);
        std::iota(order.begin(), order.end(), 0u);
        if (seed != 0) {
            for (std::uint32_t i = g.n; i > 1; --i)
                std::swap(order[i - 1], order[rng.uniform_u64(i)]);
        }

        std::vector<std::uint32_t> comm(g.n);
        std::iota(comm.begin(), comm.end(), 0u);
        const std::uint64_t moves = local_move(g, comm, order, resolution, sweeps);
        ++result.levels;
        if (moves == 0) break;

        const std::uint32_t n_new = renumber(comm);
        for (std::uint32_t u = 0; u < n; ++u) current[u] = comm[current[u]];
        if (n_new == g.n) break;
        g = aggregate(g, comm, n_new);
    }

    result.cluster = std::move(current);
    result.cluster_count = renumber(result.cluster);
    result.cluster_sizes.assign(result.cluster_count, 0);
    for (const std::uint32_t c : result.cluster) ++result.cluster_sizes[c];

    // Reported Q is the partition's modularity on the graph that was
    // optimized (positive-weight subgraph), recomputed from scratch.
    {
        std::vector<double> intra(result.cluster_count, 0.0), vol(result.cluster_count, 0.0);
        double m = 0.0;
        for (const ProjectionEdge& e : proj.edges) {
            const double w = proj.weighted ? e.weight : static_cast<double>(e.co_count);
            if (w <= 0.0) continue;
            const std::uint32_t ca = result.cluster[position[e.a]];
            const std::uint32_t cb = result.cluster[position[e.b]];
            m += w;
            vol[ca] += w;
            vol[cb] += w;
            if (ca == cb) intra[ca] += 2.0 * w;
        }
        const double two_m = 2.0 * m;
        for (std::uint32_t c = 0; c < result.cluster_count; ++c)
            result.q +=
                intra[c] / two_m - resolution * (vol[c] / two_m) * (vol[c] / two_m);
    }
    return result;
}

std::vector<ClusterProfile> cluster_profile(const CommunityAssignment& assignment,
                                            const BipartiteGraph& graph,
                                            const Dataset& dataset, std::size_t top_k) {
    // First-seen bio per actor id.
    std::unordered_map<std::string_view, const std::string*> bio_of;
    bio_of.reserve(dataset.shares.size());
    for (const ShareRecord& share : dataset.shares)
        bio_of.emplace(share.actor_id, &share.bio);

    std::vector<std::vector<std::string>> texts(assignment.cluster_count);
    for (std::size_t i = 0; i < assignment.nodes.size(); ++i) {
        const std::string& actor = graph.actor_ids[assignment.nodes[i]];
        auto it = bio_of.find(actor);
        if (it != bio_of.end() && !it->second->empty())
            texts[assignment.cluster[i]].push_back(*it->second);
    }

    std::vector<ClusterProfile> profiles(assignment.cluster_count);
    for (std::uint32_t c = 0; c < assignment.cluster_count; ++c) {
        profiles[c].cluster_id = c;
        profiles[c].size = assignment.cluster_sizes[c];
        auto tokens = word_freq(texts[c]);
        if (tokens.size() > top_k) tokens.resize(top_k);
        profiles[c].top_tokens = std::move(tokens);
    }
    return profiles;
}

std::string assignment_csv(const CommunityAssignment& assignment,
                           const BipartiteGraph& graph, Side side) {
    const auto& ids = side == Side::item ? graph.item_ids : graph.actor_ids;
    std::string out = "node_id,cluster_id\n";
    for (std::size_t i = 0; i < assignment.nodes.size(); ++i) {
        out += csv_escape(ids[assignment.nodes[i]]);
        out.push_back(',');
        out += std::to_string(assignment.cluster[i]);
        out.push_back('\n');
    }
    return out;
}

std::string cluster_profiles_json(const std::vector<ClusterProfile>& profiles) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ClusterProfile& p : profiles) {
        nlohmann::json tokens = nlohmann::json::array();
        for (const TokenCount& t : p.top_tokens)
            tokens.push_back({{"token", t.token},
                              {"count", t.count},
                              {"log_weight", t.log_weight}});
        arr.push_back({{"cluster_id", p.cluster_id},
                       {"size", p.size},
                       {"top_tokens", std::move(tokens)}});
    }
    return arr.dump(2) + "\n";
}

} // namespace copet
