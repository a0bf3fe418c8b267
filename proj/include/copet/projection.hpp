#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "copet/bigraph.hpp"

namespace copet {

enum class Side { item, actor };

const char* side_name(Side side);

struct ProjectionEdge {
    std::uint32_t a = 0; // a < b, dense ids carried from the bipartite graph
    std::uint32_t b = 0;
    std::uint32_t co_count = 0;
    double weight = 0.0;
};

// One-mode weighted undirected graph. Edges are canonical (a < b), sorted
// lexicographically, no self-loops, co_count >= 1. strength[x] = sum of
// co_counts incident to x; total_co_mass W = sum of co_counts over edges,
// so sum(strength) == 2W.
struct Projection {
    Side side = Side::item;
    std::uint32_t side_node_count = 0;  // dense-id space of this side
    std::vector<std::uint32_t> nodes;   // nodes present (all, until drop_isolated)
    std::vector<ProjectionEdge> edges;
    std::vector<std::uint64_t> strength; // size side_node_count
    std::uint64_t total_co_mass = 0;
    bool weighted = false;
    std::vector<std::string> warnings;
};

struct ProjectOptions {
    // A node of opposite-side degree d contributes d(d-1)/2 pairs; degrees
    // above this emit a warning (never a cap).
    std::uint32_t degree_warn_threshold = 50000;
};

// co_count(x,y) = number of opposite-side nodes incident to both x and y,
// counting each opposite-side node once regardless of tweet multiplicity.
// OpenMP kernel: shards the pair space by first endpoint and gives each
// shard its own hash counter, so output is identical for any thread count.
// Memory is O(projected edges + U + P).
Projection project(const BipartiteGraph& graph, Side side,
                   const ProjectOptions& opts = {});

// Single-threaded reference of the same kernel, kept for tests and the
// benchmark. Produces output identical to project().
Projection project_serial(const BipartiteGraph& graph, Side side,
                          const ProjectOptions& opts = {});

// Normalized significance weight per edge. With N = 2W, P(x,y) = co/N,
// P(x) = strength[x]/N:
//   weight = log2(P(x,y) / (P(x)*P(y))) / (-log2 P(x,y))
// Every realized weight is in (-1, 1]; exactly 1 iff the pair is exclusive
// (co == strength of both endpoints). The denominator cannot vanish since
// P(x,y) <= 1/2 under the N = 2W convention (asserted).
void weigh(Projection& projection);

struct FilterSpec {
    double quantile = 1.0; // fraction of edges to KEEP, by weight descending
    bool drop_isolated = false;
};

// Keeps the ceil(q*E) highest-weight edges; ties at the threshold weight
// are broken by (a,b) lexicographic order. Throws std::invalid_argument if
// q is outside (0,1].
Projection filter(const Projection& projection, const FilterSpec& spec);

// CSV export `node_a,node_b,co_count,weight` with original string ids.
std::string projection_csv(const Projection& projection, const BipartiteGraph& graph);

// Binary cache, magic "CPP1", analogous to the bigraph cache.
void save_projection(const Projection& projection, const std::string& path);
Projection load_projection(const std::string& path);
std::string serialize_projection(const Projection& projection);
Projection deserialize_projection(std::string_view bytes);

} // namespace copet
