#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copet/bigraph.hpp"
#include "copet/projection.hpp"
#include "copet/records.hpp"

namespace copet {

struct CentralityScores {
    std::vector<std::uint32_t> nodes;  // copied from the projection
    std::vector<double> score;         // position-aligned, sums to 1
    double damping = 0.85;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

struct PagerankOptions {
    double damping = 0.85;
    double tol = 1e-10;
    int max_iter = 200;
};

// PageRank on the weighted undirected projection: each edge acts as two
// directed edges, transition probability proportional to edge weight.
// Edges with weight <= 0 are dropped (same policy as community detection);
// nodes left without edges receive teleport-only mass. Power iteration runs
// until the L1 residual drops below tol or max_iter is hit (then
// converged=false). Per-sweep reductions use fixed 4096-node blocks summed
// in block order, so results are bit-stable across thread counts.
CentralityScores pagerank(const Projection& projection, const PagerankOptions& opts = {});

// Single-threaded reference, kept for tests and the benchmark; produces
// output identical to pagerank().
CentralityScores pagerank_serial(const Projection& projection,
                                 const PagerankOptions& opts = {});

// One row of the most-central table, joined with actor metadata.
struct CentralNode {
    std::uint32_t node = 0;
    std::string id;
    double score = 0.0;
    std::string bio;
    std::uint64_t followers = 0;
    std::uint64_t following = 0;
    bool verified = false;
    std::uint64_t favorites_received = 0;
    std::uint64_t retweets_received = 0;
    std::uint64_t tweet_count = 0;  // tweets about items, with multiplicity
    std::uint64_t unique_items = 0; // distinct items tweeted
};

// k highest-score nodes, ties broken by dense id; k larger than the node
// count returns all. Metadata comes from each actor's first share record.
std::vector<CentralNode> top_nodes(const CentralityScores& scores, std::size_t k,
                                   const BipartiteGraph& graph, const Dataset& dataset);

std::string scores_csv(const CentralityScores& scores, const BipartiteGraph& graph,
                       Side side);

} // namespace copet
