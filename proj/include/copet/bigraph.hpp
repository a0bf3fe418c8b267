#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "copet/records.hpp"

namespace copet {

// Compact immutable bipartite incidence graph between actors and items.
// Adjacency is stored CSR-style in both directions: the projection needs
// fast item->actors iteration and the stats need actor->items. Dense actor
// ids are assigned by first appearance among matched shares; dense item ids
// equal the item's index in the joined dataset (all items, including ones
// never tweeted). Neighbor lists are sorted ascending with no duplicate
// (actor,item) entries; multiplicity stores tweet repetition.
struct BipartiteGraph {
    std::vector<std::string> actor_ids; // dense actor id -> original id
    std::vector<std::string> item_ids;  // dense item id -> original id

    std::vector<std::uint64_t> actor_offsets; // size U+1
    std::vector<std::uint32_t> actor_items;
    std::vector<std::uint32_t> multiplicities; // parallel to actor_items

    std::vector<std::uint64_t> item_offsets; // size P+1
    std::vector<std::uint32_t> item_actors;

    std::uint64_t matched_shares = 0;      // == sum of multiplicities
    std::uint64_t excluded_unmatched = 0;

    std::uint32_t num_actors() const { return static_cast<std::uint32_t>(actor_ids.size()); }
    std::uint32_t num_items() const { return static_cast<std::uint32_t>(item_ids.size()); }
    std::uint64_t incidence_count() const { return actor_items.size(); }

    std::span<const std::uint32_t> items_of(std::uint32_t actor) const {
        return {actor_items.data() + actor_offsets[actor],
                actor_items.data() + actor_offsets[actor + 1]};
    }
    std::span<const std::uint32_t> actors_of(std::uint32_t item) const {
        return {item_actors.data() + item_offsets[item],
                item_actors.data() + item_offsets[item + 1]};
    }
    std::span<const std::uint32_t> multiplicities_of(std::uint32_t actor) const {
        return {multiplicities.data() + actor_offsets[actor],
                multiplicities.data() + actor_offsets[actor + 1]};
    }
};

BipartiteGraph build_bigraph(const Dataset& dataset);

// Summary table in the shape of per-petition medians/maxima (tweets with
// multiplicity, distinct users, signatures). Medians use the midpoint
// convention; empty graphs report absent values.
struct DegreeProfile {
    std::uint64_t num_actors = 0;
    std::uint64_t num_items = 0;
    std::uint64_t incidences = 0;
    std::uint64_t matched_shares = 0;
    std::optional<double> median_tweets, median_users, median_signatures;
    std::optional<std::uint64_t> max_tweets, max_users, max_signatures;
};

DegreeProfile degree_profile(const BipartiteGraph& graph, const Dataset& dataset);

// Binary cache, magic "CPB1", little-endian, 64-bit counts / 32-bit ids.
// load(save(g)) is bit-identical to g; bad magic/version/truncation throws.
void save_bigraph(const BipartiteGraph& graph, const std::string& path);
BipartiteGraph load_bigraph(const std::string& path);
std::string serialize_bigraph(const BipartiteGraph& graph);
BipartiteGraph deserialize_bigraph(std::string_view bytes);

} // namespace copet
