#include "copet/bigraph.hpp"

#include <algorithm>
#include <cassert>
#include <unordered_map>

#include "copet/io_util.hpp"

namespace copet {

BipartiteGraph build_bigraph(const Dataset& dataset) {
    BipartiteGraph g;
    g.item_ids.reserve(dataset.items.size());
    for (const ItemRecord& item : dataset.items) g.item_ids.push_back(item.item_id);

    // Dense actor ids by first appearance among matched shares.
    std::unordered_map<std::string_view, std::uint32_t> actor_index;
    actor_index.reserve(dataset.shares.size());
    std::vector<std::pair<std::uint32_t, std::uint32_t>> incid; // (actor, item) per share
    incid.reserve(dataset.matched);
    for (std::size_t s = 0; s < dataset.shares.size(); ++s) {
        const std::uint32_t item = dataset.share_item[s];
        if (item == kNoItem) {
            ++g.excluded_unmatched;
            continue;
        }
        auto [it, inserted] = actor_index.emplace(dataset.shares[s].actor_id,
                                                  static_cast<std::uint32_t>(g.actor_ids.size()));
        if (inserted) g.actor_ids.push_back(dataset.shares[s].actor_id);
        incid.emplace_back(it->second, item);
    }
    g.matched_shares = incid.size();

    std::sort(incid.begin(), incid.end());

    const std::uint32_t num_actors = g.num_actors();
    const std::uint32_t num_items = g.num_items();
    g.actor_offsets.assign(num_actors + 1, 0);
    g.item_offsets.assign(num_items + 1, 0);

    // Forward CSR with per-incidence multiplicity collapse.
    for (std::size_t i = 0; i < incid.size();) {
        std::size_t j = i;
        while (j < incid.size() && incid[j] == incid[i]) ++j;
        g.actor_items.push_back(incid[i].second);
        g.multiplicities.push_back(static_cast<std::uint32_t>(j - i));
        ++g.actor_offsets[incid[i].first + 1];
        ++g.item_offsets[incid[i].second + 1];
        i = j;
    }
    for (std::uint32_t a = 0; a < num_actors; ++a)
        g.actor_offsets[a + 1] += g.actor_offsets[a];
    for (std::uint32_t p = 0; p < num_items; ++p)
        g.item_offsets[p + 1] += g.item_offsets[p];

    // Reverse CSR by stable counting placement; actor lists are scanned in
    // ascending actor order, so each item's neighbor list comes out sorted.
    g.item_actors.assign(g.actor_items.size(), 0);
    std::vector<std::uint64_t> cursor(g.item_offsets.begin(), g.item_offsets.end() - 1);
    for (std::uint32_t a = 0; a < num_actors; ++a) {
        for (std::uint64_t k = g.actor_offsets[a]; k < g.actor_offsets[a + 1]; ++k) {
            const std::uint32_t p = g.actor_items[k];
            g.item_actors[cursor[p]++] = a;
        }
    }
    return g;
}

namespace {

std::optional<double> median_of_sorted(const std::vector<std::uint64_t>& sorted) {
    if (sorted.empty()) return std::nullopt;
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return static_cast<double>(sorted[n / 2]);
    return (static_cast<double>(sorted[n / 2 - 1]) + static_cast<double>(sorted[n / 2])) / 2.0;
}

} // namespace

DegreeProfile degree_profile(const BipartiteGraph& graph, const Dataset& dataset) {
    DegreeProfile profile;
    profile.num_actors = graph.num_actors();
    profile.num_items = graph.num_items();
    profile.incidences = graph.incidence_count();
    profile.matched_shares = graph.matched_shares;

    const std::uint32_t num_items = graph.num_items();
    std::vector<std::uint64_t> tweets(num_items, 0), users(num_items, 0), sigs(num_items, 0);
    for (std::uint32_t a = 0; a < graph.num_actors(); ++a) {
        const auto items = graph.items_of(a);
        const auto mult = graph.multiplicities_of(a);
        for (std::size_t k = 0; k < items.size(); ++k) {
            tweets[items[k]] += mult[k];
            users[items[k]] += 1;
        }
    }
    for (std::uint32_t p = 0; p < num_items; ++p)
        sigs[p] = dataset.items[p].signature_count;

    if (num_items == 0) return profile;

    for (auto* v : {&tweets, &users, &sigs}) std::sort(v->begin(), v->end());
    profile.median_tweets = median_of_sorted(tweets);
    profile.median_users = median_of_sorted(users);
    profile.median_signatures = median_of_sorted(sigs);
    profile.max_tweets = tweets.back();
    profile.max_users = users.back();
    profile.max_signatures = sigs.back();
    return profile;
}

static constexpr std::uint32_t kBigraphVersion = 1;

std::string serialize_bigraph(const BipartiteGraph& g) {
    BinWriter w;
    w.bytes("CPB1");
    w.u32(kBigraphVersion);
    w.u64(g.num_actors());
    w.u64(g.num_items());
    w.u64(g.incidence_count());
    w.u64(g.matched_shares);
    w.u64(g.excluded_unmatched);
    for (const std::string& id : g.actor_ids) w.str(id);
    for (const std::string& id : g.item_ids) w.str(id);
    for (const std::uint64_t v : g.actor_offsets) w.u64(v);
    for (const std::uint32_t v : g.actor_items) w.u32(v);
    for (const std::uint32_t v : g.multiplicities) w.u32(v);
    for (const std::uint64_t v : g.item_offsets) w.u64(v);
    for (const std::uint32_t v : g.item_actors) w.u32(v);
    return std::move(w.buf);
}

BipartiteGraph deserialize_bigraph(std::string_view bytes) {
    BinReader r{bytes};
    r.expect_magic("CPB1", "bigraph cache");
    const std::uint32_t version = r.u32();
    if (version != kBigraphVersion)
        throw IoError("bigraph cache: unsupported version " + std::to_string(version));
    BipartiteGraph g;
    const std::uint64_t num_actors = r.u64();
    const std::uint64_t num_items = r.u64();
    const std::uint64_t nnz = r.u64();
    g.matched_shares = r.u64();
    g.excluded_unmatched = r.u64();
    g.actor_ids.reserve(num_actors);
    for (std::uint64_t i = 0; i < num_actors; ++i) g.actor_ids.push_back(r.str());
    g.item_ids.reserve(num_items);
    for (std::uint64_t i = 0; i < num_items; ++i) g.item_ids.push_back(r.str());
    g.actor_offsets.resize(num_actors + 1);
    for (auto& v : g.actor_offsets) v = r.u64();
    g.actor_items.resize(nnz);
    for (auto& v : g.actor_items) v = r.u32();
    g.multiplicities.resize(nnz);
    for (auto& v : g.multiplicities) v = r.u32();
    g.item_offsets.resize(num_items + 1);
    for (auto& v : g.item_offsets) v = r.u64();
    g.item_actors.resize(nnz);
    for (auto& v : g.item_actors) v = r.u32();
    if (!r.at_end()) throw IoError("bigraph cache: trailing bytes");
    return g;
}

void save_bigraph(const BipartiteGraph& graph, const std::string& path) {
    write_file(path, serialize_bigraph(graph));
}

BipartiteGraph load_bigraph(const std::string& path) {
    const std::string bytes = slurp_file(path);
    return deserialize_bigraph(bytes);
}

} // namespace copet
