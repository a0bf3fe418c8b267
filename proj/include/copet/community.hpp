#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "copet/projection.hpp"
#include "copet/records.hpp"

namespace copet {

struct CommunityAssignment {
    std::vector<std::uint32_t> nodes;   // copied from the projection
    std::vector<std::uint32_t> cluster; // position-aligned with nodes, dense 0-based
    double q = 0.0;                     // modularity of the final partition,
                                        // recomputed from scratch
    std::uint32_t cluster_count = 0;
    std::vector<std::uint64_t> cluster_sizes;
    int levels = 0;
    std::uint64_t dropped_nonpositive_edges = 0;
};

// Weighted Louvain: local-move sweeps plus aggregation until no single-node
// move improves modularity by more than 1e-9. Edges with weight <= 0 are
// dropped first (counted in the result). Node sweep order is ascending for
// seed 0, otherwise a deterministic shuffle of the given seed. Modularity is
// checked non-decreasing across sweeps in-engine. Throws
// std::invalid_argument when no positive-weight edge remains.
CommunityAssignment louvain(const Projection& projection, double resolution = 1.0,
                            std::uint64_t seed = 0);

// Standard weighted modularity of an arbitrary assignment (cluster id per
// position in projection.nodes), on the positive-weight subgraph:
//   Q = (1/2m) * sum_ij [A_ij - r*k_i*k_j/(2m)] * delta(c_i, c_j)
double modularity(const Projection& projection, std::span<const std::uint32_t> cluster,
                  double resolution = 1.0);

struct TokenCount {
    std::string token;
    std::uint64_t count = 0;
    double log_weight = 0.0; // ln(1 + count)
};

struct ClusterProfile {
    std::uint32_t cluster_id = 0;
    std::uint64_t size = 0;
    std::vector<TokenCount> top_tokens; // from member bios
};

// Per-cluster size and top-k bio tokens; assignment must come from an
// actor-side projection of this graph.
std::vector<ClusterProfile> cluster_profile(const CommunityAssignment& assignment,
                                            const BipartiteGraph& graph,
                                            const Dataset& dataset, std::size_t top_k);

std::string assignment_csv(const CommunityAssignment& assignment,
                           const BipartiteGraph& graph, Side side);
std::string cluster_profiles_json(const std::vector<ClusterProfile>& profiles);

} // namespace copet
