#include "copet/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <omp.h>

#include "copet/io_util.hpp"

namespace copet {

namespace {

constexpr std::size_t kBlock = 4096;

// Compact positive-weight CSR over the projection's node list. Undirected
// edges appear in both adjacency lists.
struct WalkGraph {
    std::uint32_t n = 0;
    std::vector<std::uint64_t> off;
    std::vector<std::uint32_t> adj;
    std::vector<double> w;
    std::vector<double> out_weight;
};

WalkGraph build_walk_graph(const Projection& proj) {
    if (proj.nodes.empty()) throw std::invalid_argument("pagerank: empty projection");
    WalkGraph g;
    g.n = static_cast<std::uint32_t>(proj.nodes.size());

    std::vector<std::uint32_t> position(proj.side_node_count, UINT32_MAX);
    for (std::uint32_t i = 0; i < g.n; ++i) position[proj.nodes[i]] = i;

    std::vector<std::uint32_t> degree(g.n, 0);
    for (const ProjectionEdge& e : proj.edges) {
        const double w = proj.weighted ? e.weight : static_cast<double>(e.co_count);
        if (w <= 0.0) continue;
        ++degree[position[e.a]];
        ++degree[position[e.b]];
    }
    g.off.assign(g.n + 1, 0);
    for (std::uint32_t u = 0; u < g.n; ++u) g.off[u + 1] = g.off[u] + degree[u];
    g.adj.resize(g.off[g.n]);
    g.w.resize(g.off[g.n]);
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
    g.out_weight.assign(g.n, 0.0);
    for (std::uint32_t u = 0; u < g.n; ++u) {
        double s = 0.0;
        for (std::uint64_t k = g.off[u]; k < g.off[u + 1]; ++k) s += g.w[k];
        g.out_weight[u] = s;
    }
    return g;
}

// Sums values in fixed 4096-element blocks, blocks combined in order, so
// the result is identical for any thread count.
template <typename F>
double block_sum(std::size_t n, bool parallel, F&& term) {
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t end = std::min(n, (b + 1) * kBlock);
        double s = 0.0;
        for (std::size_t i = b * kBlock; i < end; ++i) s += term(i);
        partial[b] = s;
    }
    double total = 0.0;
    for (const double p : partial) total += p;
    return total;
}

CentralityScores power_iterate(const Projection& proj, const PagerankOptions& opts,
                               bool parallel) {
    const WalkGraph g = build_walk_graph(proj);
    const std::uint32_t n = g.n;
    const double d = opts.damping;
    const double uniform = 1.0 / static_cast<double>(n);

    std::vector<double> x(n, uniform), next(n, 0.0), scaled(n, 0.0);

    CentralityScores result;
    result.nodes = proj.nodes;
    result.damping = d;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        const double dangling = block_sum(n, parallel, [&](std::size_t i) {
            return g.out_weight[i] == 0.0 ? x[i] : 0.0;
        });
        const double base = (1.0 - d) * uniform + d * dangling * uniform;

#pragma omp parallel for schedule(static) if (parallel)
        for (std::uint32_t u = 0; u < n; ++u)
            scaled[u] = g.out_weight[u] == 0.0 ? 0.0 : x[u] / g.out_weight[u];

#pragma omp parallel for schedule(dynamic, 512) if (parallel)
        for (std::uint32_t u = 0; u < n; ++u) {
            double acc = 0.0;
            for (std::uint64_t k = g.off[u]; k < g.off[u + 1]; ++k)
                acc += scaled[g.adj[k]] * g.w[k];
            next[u] = base + d * acc;
        }

        const double mass = block_sum(n, parallel, [&](std::size_t i) { return next[i]; });
#pragma omp parallel for schedule(static) if (parallel)
        for (std::uint32_t u = 0; u < n; ++u) next[u] /= mass;

        const double residual = block_sum(
            n, parallel, [&](std::size_t i) { return std::abs(next[i] - x[i]); });

        x.swap(next);
        result.iterations = iter;
        result.residual = residual;
        if (residual < opts.tol) {
            result.converged = true;
            break;
        }
    }
    result.score = std::move(x);
    return result;
}

} // namespace

CentralityScores pagerank(const Projection& proj, const PagerankOptions& opts) {
    return power_iterate(proj, opts, true);
}

CentralityScores pagerank_serial(const Projection& proj, const PagerankOptions& opts) {
    return power_iterate(proj, opts, false);
}

std::vector<CentralNode> top_nodes(const CentralityScores& scores, std::size_t k,
                                   const BipartiteGraph& graph, const Dataset& dataset) {
    std::vector<std::uint32_t> order(scores.nodes.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t l, std::uint32_t r) {
        if (scores.score[l] != scores.score[r]) return scores.score[l] > scores.score[r];
        return scores.nodes[l] < scores.nodes[r];
    });
    if (k < order.size()) order.resize(k);

    std::unordered_map<std::string_view, std::uint32_t> actor_index;
    actor_index.reserve(graph.actor_ids.size() * 2);
    for (std::uint32_t a = 0; a < graph.num_actors(); ++a)
        actor_index.emplace(graph.actor_ids[a], a);

    struct Meta {
        const ShareRecord* first = nullptr;
        std::uint64_t favorites = 0, retweets = 0, tweets = 0;
    };
    std::vector<Meta> meta(graph.num_actors());
    for (std::size_t s = 0; s < dataset.shares.size(); ++s) {
        if (dataset.share_item[s] == kNoItem) continue;
        auto it = actor_index.find(dataset.shares[s].actor_id);
        if (it == actor_index.end()) continue;
        Meta& m = meta[it->second];
        if (!m.first) m.first = &dataset.shares[s];
        m.favorites += dataset.shares[s].favorite_count;
        m.retweets += dataset.shares[s].retweet_count;
        m.tweets += 1;
    }

    std::vector<CentralNode> out;
    out.reserve(order.size());
    for (const std::uint32_t pos : order) {
        const std::uint32_t node = scores.nodes[pos];
        CentralNode row;
        row.node = node;
        row.id = graph.actor_ids[node];
        row.score = scores.score[pos];
        row.unique_items = graph.items_of(node).size();
        const Meta& m = meta[node];
        row.tweet_count = m.tweets;
        row.favorites_received = m.favorites;
        row.retweets_received = m.retweets;
        if (m.first) {
            row.bio = m.first->bio;
            row.followers = m.first->follower_count;
            row.following = m.first->following_count;
            row.verified = m.first->verified;
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::string scores_csv(const CentralityScores& scores, const BipartiteGraph& graph,
                       Side side) {
    const auto& ids = side == Side::item ? graph.item_ids : graph.actor_ids;
    std::string out = "node_id,score\n";
    for (std::size_t i = 0; i < scores.nodes.size(); ++i) {
        out += csv_escape(ids[scores.nodes[i]]);
        out.push_back(',');
        out += format_double(scores.score[i]);
        out.push_back('\n');
    }
    return out;
}

} // namespace copet
