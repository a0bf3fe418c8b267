#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "copet/bigraph.hpp"
#include "copet/ingest.hpp"
#include "copet/io_util.hpp"
#include "copet/projection.hpp"
#include "copet/rng.hpp"
#include "oracles.hpp"

using namespace copet;

namespace {

Dataset pairs_dataset(const std::vector<std::pair<std::string, std::string>>& tweets,
                      const std::vector<std::string>& item_ids) {
    std::vector<ShareRecord> shares;
    int seq = 0;
    for (const auto& [actor, item] : tweets) {
        ShareRecord s;
        s.tweet_id = "t" + std::to_string(seq++);
        s.actor_id = actor;
        s.item_id = item;
        s.posted_at = 1400000000;
        shares.push_back(std::move(s));
    }
    std::vector<ItemRecord> items;
    for (const std::string& id : item_ids) items.push_back({id, "", 0, 0, ""});
    return join_dataset(std::move(shares), std::move(items));
}

// 3 nodes with co-counts c(a,b)=2, c(b,c)=1, c(a,c)=1: two items shared by
// {a,b}, one by {b,c}, one by {a,c}.
BipartiteGraph worked_example() {
    const Dataset ds = pairs_dataset(
        {{"a", "p1"}, {"b", "p1"}, {"a", "p2"}, {"b", "p2"},
         {"b", "p3"}, {"c", "p3"}, {"a", "p4"}, {"c", "p4"}},
        {"p1", "p2", "p3", "p4"});
    return build_bigraph(ds);
}

void check_matches_oracle(const BipartiteGraph& g, Side side) {
    Projection proj = project(g, side);
    weigh(proj);
    const auto expected = oracle::naive_projection(g, side);
    REQUIRE(proj.edges.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(proj.edges[i].a == expected[i].a);
        CHECK(proj.edges[i].b == expected[i].b);
        CHECK(proj.edges[i].co_count == expected[i].co_count);
        CHECK(proj.edges[i].weight ==
              doctest::Approx(expected[i].weight).epsilon(1e-12));
    }
}

} // namespace

TEST_SUITE("projection") {

TEST_CASE("one item tweeted by three actors projects to a unit triangle") {
    const Dataset ds = pairs_dataset({{"a", "p"}, {"b", "p"}, {"c", "p"}}, {"p"});
    const Projection proj = project(build_bigraph(ds), Side::actor);
    REQUIRE(proj.edges.size() == 3);
    for (const ProjectionEdge& e : proj.edges) {
        CHECK(e.co_count == 1);
        CHECK(e.a < e.b);
    }
    CHECK(proj.total_co_mass == 3);
}

TEST_CASE("items with disjoint actor sets share no edges") {
    const Dataset ds = pairs_dataset({{"a", "p1"}, {"b", "p2"}}, {"p1", "p2"});
    const Projection proj = project(build_bigraph(ds), Side::item);
    CHECK(proj.edges.empty());
}

TEST_CASE("tweet multiplicity does not inflate co-counts") {
    const Dataset ds = pairs_dataset(
        {{"a", "p"}, {"a", "p"}, {"a", "p"}, {"b", "p"}, {"b", "p"}}, {"p"});
    const Projection proj = project(build_bigraph(ds), Side::actor);
    REQUIRE(proj.edges.size() == 1);
    CHECK(proj.edges[0].co_count == 1);
}

TEST_CASE("matches the set-intersection oracle on random graphs") {
    Rng rng(31);
    for (int trial = 0; trial < 8; ++trial) {
        const std::uint32_t actors = 10 + static_cast<std::uint32_t>(rng.uniform_u64(60));
        const std::uint32_t items = 5 + static_cast<std::uint32_t>(rng.uniform_u64(30));
        const Dataset ds = oracle::random_dataset(actors, items, 0.2, 3, rng);
        const BipartiteGraph g = build_bigraph(ds);
        check_matches_oracle(g, Side::actor);
        check_matches_oracle(g, Side::item);
    }
}

TEST_CASE("serial reference and OpenMP kernel are identical") {
    Rng rng(32);
    const Dataset ds = oracle::random_dataset(80, 40, 0.15, 2, rng);
    const BipartiteGraph g = build_bigraph(ds);
    for (const Side side : {Side::actor, Side::item}) {
        Projection a = project(g, side);
        Projection b = project_serial(g, side);
        weigh(a);
        weigh(b);
        REQUIRE(a.edges.size() == b.edges.size());
        for (std::size_t i = 0; i < a.edges.size(); ++i) {
            CHECK(a.edges[i].a == b.edges[i].a);
            CHECK(a.edges[i].b == b.edges[i].b);
            CHECK(a.edges[i].co_count == b.edges[i].co_count);
            CHECK(a.edges[i].weight == b.edges[i].weight);
        }
        CHECK(a.strength == b.strength);
        CHECK(a.total_co_mass == b.total_co_mass);
    }
}

TEST_CASE("strength sums to twice the total co-mass") {
    Rng rng(33);
    const Dataset ds = oracle::random_dataset(50, 25, 0.2, 2, rng);
    const Projection proj = project(build_bigraph(ds), Side::actor);
    std::uint64_t total = 0;
    for (const std::uint64_t s : proj.strength) total += s;
    CHECK(total == 2 * proj.total_co_mass);
}

TEST_CASE("single exclusive pair gets weight exactly 1") {
    const Dataset ds = pairs_dataset({{"a", "p"}, {"b", "p"}}, {"p"});
    Projection proj = project(build_bigraph(ds), Side::actor);
    weigh(proj);
    REQUIRE(proj.edges.size() == 1);
    CHECK(proj.edges[0].weight == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("two disjoint exclusive pairs both get weight 1") {
    const Dataset ds =
        pairs_dataset({{"a", "p1"}, {"b", "p1"}, {"c", "p2"}, {"d", "p2"}}, {"p1", "p2"});
    Projection proj = project(build_bigraph(ds), Side::actor);
    weigh(proj);
    REQUIRE(proj.edges.size() == 2);
    for (const ProjectionEdge& e : proj.edges)
        CHECK(e.weight == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("3-node worked example reproduces the frozen weights") {
    // Independent hand evaluation: W=4, N=8; pair (a,b): co=2, s(a)=s(b)=3,
    // weight = log2((2/8)/(9/64)) / -log2(2/8) = log2(16/9)/2 = 0.4150375;
    // pairs (b,c),(a,c): co=1, s=3 and 2,
    // weight = log2((1/8)/(6/64))/3 = log2(4/3)/3 = 0.1383458.
    BipartiteGraph g = worked_example();
    Projection proj = project(g, Side::actor);
    weigh(proj);
    REQUIRE(proj.edges.size() == 3);
    const auto& ab = proj.edges[0];
    CHECK(ab.co_count == 2);
    CHECK(ab.weight == doctest::Approx(0.41504).epsilon(5e-6));
    CHECK(proj.edges[1].weight == doctest::Approx(0.13835).epsilon(5e-6));
    CHECK(proj.edges[2].weight == doctest::Approx(0.13835).epsilon(5e-6));
}

TEST_CASE("weights stay in (-1, 1] on random graphs") {
    Rng rng(34);
    for (int trial = 0; trial < 5; ++trial) {
        const Dataset ds = oracle::random_dataset(40, 20, 0.3, 2, rng);
        Projection proj = project(build_bigraph(ds), Side::actor);
        weigh(proj);
        for (const ProjectionEdge& e : proj.edges) {
            CHECK(e.weight > -1.0);
            CHECK(e.weight <= 1.0 + 1e-15);
        }
    }
}

TEST_CASE("weight rises with co-count at fixed strengths and mass") {
    // direct formula evaluation with s(x)=s(y)=40, W=200
    auto weight = [](double co) {
        const double n = 400.0;
        return std::log2((co / n) / ((40.0 / n) * (40.0 / n))) / -std::log2(co / n);
    };
    double prev = weight(1);
    for (double co = 2; co <= 40; ++co) {
        const double w = weight(co);
        CHECK(w > prev);
        prev = w;
    }
}

TEST_CASE("filter keeps exactly ceil(q*E) with deterministic ties") {
    SUBCASE("q=1 is the identity") {
        Rng rng(35);
        const Dataset ds = oracle::random_dataset(30, 15, 0.3, 2, rng);
        Projection proj = project(build_bigraph(ds), Side::actor);
        weigh(proj);
        const Projection kept = filter(proj, {1.0, false});
        CHECK(kept.edges.size() == proj.edges.size());
    }
    SUBCASE("10 distinct weights at q=0.10 keep only the maximum") {
        Projection proj;
        proj.side = Side::item;
        proj.side_node_count = 20;
        proj.nodes.resize(20);
        for (std::uint32_t i = 0; i < 20; ++i) proj.nodes[i] = i;
        proj.strength.assign(20, 0);
        for (std::uint32_t i = 0; i < 10; ++i) {
            ProjectionEdge e{2 * i, 2 * i + 1, 1, 0.05 * (i + 1)};
            proj.edges.push_back(e);
            proj.total_co_mass += 1;
        }
        proj.weighted = true;
        const Projection kept = filter(proj, {0.10, false});
        REQUIRE(kept.edges.size() == 1);
        CHECK(kept.edges[0].weight == doctest::Approx(0.5));
    }
    SUBCASE("threshold ties break by (a,b) lexicographic order") {
        Projection proj;
        proj.side = Side::item;
        proj.side_node_count = 10;
        for (std::uint32_t i = 0; i < 10; ++i) proj.nodes.push_back(i);
        proj.strength.assign(10, 0);
        // one clear winner and four tied edges; q=0.3 of 5 edges keeps 2
        proj.edges.push_back({0, 1, 1, 0.9});
        proj.edges.push_back({0, 2, 1, 0.5});
        proj.edges.push_back({1, 2, 1, 0.5});
        proj.edges.push_back({2, 3, 1, 0.5});
        proj.edges.push_back({3, 4, 1, 0.5});
        proj.weighted = true;
        proj.total_co_mass = 5;
        const Projection kept = filter(proj, {0.3, false});
        REQUIRE(kept.edges.size() == 2);
        CHECK(kept.edges[0].b == 1);
        CHECK(kept.edges[1].a == 0);
        CHECK(kept.edges[1].b == 2); // smallest tied pair
    }
    SUBCASE("kept weights dominate dropped weights on random projections") {
        Rng rng(36);
        for (int trial = 0; trial < 5; ++trial) {
            const Dataset ds = oracle::random_dataset(40, 20, 0.25, 2, rng);
            Projection proj = project(build_bigraph(ds), Side::actor);
            weigh(proj);
            if (proj.edges.empty()) continue;
            const double q = 0.1 + 0.2 * rng.next_double();
            const Projection kept = filter(proj, {q, false});
            const std::size_t expect = static_cast<std::size_t>(
                std::ceil(q * static_cast<double>(proj.edges.size())));
            CHECK(kept.edges.size() == expect);
            double min_kept = 2.0;
            for (const ProjectionEdge& e : kept.edges) min_kept = std::min(min_kept, e.weight);
            // every dropped weight must be <= every kept weight
            std::size_t used = 0;
            for (const ProjectionEdge& e : proj.edges) {
                const bool is_kept = used < kept.edges.size() &&
                                     kept.edges[used].a == e.a && kept.edges[used].b == e.b;
                if (is_kept)
                    ++used;
                else
                    CHECK(e.weight <= min_kept);
            }
        }
    }
    SUBCASE("quantile outside (0,1] is fatal") {
        Projection proj;
        proj.weighted = true;
        CHECK_THROWS_AS(filter(proj, {0.0, false}), std::invalid_argument);
        CHECK_THROWS_AS(filter(proj, {1.5, false}), std::invalid_argument);
    }
}

TEST_CASE("drop_isolated removes nodes without remaining edges") {
    const Dataset ds = pairs_dataset(
        {{"a", "p1"}, {"b", "p1"}, {"c", "p2"}}, {"p1", "p2", "p3"});
    Projection proj = project(build_bigraph(ds), Side::item);
    weigh(proj);
    CHECK(proj.nodes.size() == 3);
    const Projection kept = filter(proj, {1.0, true});
    CHECK(kept.nodes.empty() == proj.edges.empty());
    CHECK(kept.nodes.size() == (proj.edges.empty() ? 0 : 2 * proj.edges.size()));
}

TEST_CASE("degree warning fires above the threshold") {
    const Dataset ds = pairs_dataset(
        {{"a", "p"}, {"b", "p"}, {"c", "p"}, {"d", "p"}}, {"p"});
    ProjectOptions opts;
    opts.degree_warn_threshold = 3;
    const Projection proj = project(build_bigraph(ds), Side::actor, opts);
    REQUIRE(proj.warnings.size() == 1);
    CHECK(proj.warnings[0].find("degree 4") != std::string::npos);
}

TEST_CASE("projection cache round-trips bit-identically") {
    Rng rng(37);
    const Dataset ds = oracle::random_dataset(30, 15, 0.25, 2, rng);
    Projection proj = project(build_bigraph(ds), Side::actor);
    weigh(proj);
    const std::string bytes = serialize_projection(proj);
    CHECK(serialize_projection(deserialize_projection(bytes)) == bytes);

    std::string corrupt = bytes;
    corrupt[1] = 'X';
    CHECK_THROWS_AS(deserialize_projection(corrupt), IoError);
}

TEST_CASE("csv export carries original string ids") {
    const Dataset ds = pairs_dataset({{"alice", "pet1"}, {"bob", "pet1"}}, {"pet1"});
    const BipartiteGraph g = build_bigraph(ds);
    Projection proj = project(g, Side::actor);
    weigh(proj);
    const std::string csv = projection_csv(proj, g);
    CHECK(csv.find("alice,bob,1,1") != std::string::npos);
}

} // TEST_SUITE
