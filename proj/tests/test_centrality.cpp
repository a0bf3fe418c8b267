#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <tuple>

#include "copet/centrality.hpp"
#include "copet/ingest.hpp"
#include "copet/rng.hpp"
#include "oracles.hpp"

using namespace copet;

namespace {

Projection complete_graph(std::uint32_t n, double w = 1.0) {
    Projection proj;
    proj.side = Side::item;
    proj.side_node_count = n;
    proj.nodes.resize(n);
    std::iota(proj.nodes.begin(), proj.nodes.end(), 0u);
    proj.strength.assign(n, 0);
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = a + 1; b < n; ++b) {
            proj.edges.push_back({a, b, 1, w});
            proj.total_co_mass += 1;
        }
    proj.weighted = true;
    return proj;
}

} // namespace

TEST_SUITE("centrality") {

TEST_CASE("complete graph scores are uniform") {
    for (const std::uint32_t n : {3u, 7u, 20u}) {
        const CentralityScores s = pagerank(complete_graph(n));
        REQUIRE(s.converged);
        for (const double v : s.score)
            CHECK(v == doctest::Approx(1.0 / n).epsilon(1e-10));
    }
}

TEST_CASE("a single edge splits mass evenly") {
    Projection proj;
    proj.side_node_count = 2;
    proj.nodes = {0, 1};
    proj.edges.push_back({0, 1, 1, 0.7});
    proj.strength = {1, 1};
    proj.total_co_mass = 1;
    proj.weighted = true;
    const CentralityScores s = pagerank(proj);
    CHECK(s.score[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(s.score[1] == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("scores sum to one and match the dense oracle") {
    Rng rng(51);
    for (int trial = 0; trial < 10; ++trial) {
        const std::uint32_t n = 5 + static_cast<std::uint32_t>(rng.uniform_u64(46));
        const Projection proj = oracle::random_weighted_projection(n, 0.2, rng);
        const CentralityScores s = pagerank(proj);
        double total = 0.0;
        for (const double v : s.score) total += v;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

        const std::vector<double> expect = oracle::dense_pagerank(proj, 0.85, 1e-10, 200);
        double l1 = 0.0;
        for (std::size_t i = 0; i < s.score.size(); ++i)
            l1 += std::abs(s.score[i] - expect[i]);
        CHECK(l1 <= 1e-8);
    }
}

TEST_CASE("all scores are positive when damping < 1") {
    Rng rng(52);
    const Projection proj = oracle::random_weighted_projection(30, 0.1, rng);
    const CentralityScores s = pagerank(proj);
    for (const double v : s.score) CHECK(v > 0.0);
}

TEST_CASE("damping near 1 approaches the weighted-degree distribution") {
    Rng rng(53);
    for (int trial = 0; trial < 5; ++trial) {
        Projection proj = oracle::random_weighted_projection(12, 0.6, rng);
        // densify to guarantee connectivity
        std::vector<bool> present(12 * 12, false);
        for (const ProjectionEdge& e : proj.edges) present[e.a * 12 + e.b] = true;
        for (std::uint32_t i = 0; i + 1 < 12; ++i)
            if (!present[i * 12 + i + 1]) {
                proj.edges.push_back({i, i + 1, 1, 0.5});
                proj.total_co_mass += 1;
            }
        std::sort(proj.edges.begin(), proj.edges.end(),
                  [](const ProjectionEdge& l, const ProjectionEdge& r) {
                      return std::tie(l.a, l.b) < std::tie(r.a, r.b);
                  });

        PagerankOptions opts;
        opts.damping = 0.999;
        opts.tol = 1e-12;
        opts.max_iter = 20000;
        const CentralityScores s = pagerank(proj, opts);

        std::vector<double> degree(12, 0.0);
        double two_w = 0.0;
        for (const ProjectionEdge& e : proj.edges) {
            degree[e.a] += e.weight;
            degree[e.b] += e.weight;
            two_w += 2.0 * e.weight;
        }
        double l1 = 0.0;
        for (std::size_t i = 0; i < 12; ++i)
            l1 += std::abs(s.score[i] - degree[i] / two_w);
        CHECK(l1 < 0.01);
    }
}

TEST_CASE("ranking is invariant under positive weight scaling") {
    Rng rng(54);
    Projection proj = oracle::random_weighted_projection(25, 0.25, rng);
    const CentralityScores base = pagerank(proj);
    for (ProjectionEdge& e : proj.edges) e.weight *= 37.5;
    const CentralityScores scaled = pagerank(proj);
    for (std::size_t i = 0; i < base.score.size(); ++i)
        CHECK(scaled.score[i] == doctest::Approx(base.score[i]).epsilon(1e-8));
}

TEST_CASE("isolated nodes keep teleport-only mass") {
    Projection proj;
    proj.side_node_count = 4;
    proj.nodes = {0, 1, 2, 3}; // node 3 isolated
    proj.edges = {{0, 1, 1, 1.0}, {0, 2, 1, 1.0}};
    proj.strength = {2, 1, 1, 0};
    proj.total_co_mass = 2;
    proj.weighted = true;
    const CentralityScores s = pagerank(proj);
    const std::vector<double> expect = oracle::dense_pagerank(proj, 0.85, 1e-10, 200);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(s.score[i] == doctest::Approx(expect[i]).epsilon(1e-9));
    CHECK(s.score[3] > 0.0);
    CHECK(s.score[3] < s.score[0]);
}

TEST_CASE("hitting max_iter returns an unconverged result") {
    Rng rng(56);
    const Projection proj = oracle::random_weighted_projection(30, 0.2, rng);
    PagerankOptions opts;
    opts.tol = 1e-30;
    opts.max_iter = 2;
    const CentralityScores s = pagerank(proj, opts);
    CHECK_FALSE(s.converged);
    CHECK(s.iterations == 2);
}

TEST_CASE("serial reference is bit-identical to the OpenMP kernel") {
    Rng rng(55);
    const Projection proj = oracle::random_weighted_projection(200, 0.05, rng);
    const CentralityScores a = pagerank(proj);
    const CentralityScores b = pagerank_serial(proj);
    REQUIRE(a.score.size() == b.score.size());
    for (std::size_t i = 0; i < a.score.size(); ++i) CHECK(a.score[i] == b.score[i]);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("top_nodes ranks, breaks ties by dense id, joins metadata") {
    // hub-and-spoke: hub actor shares every item, spokes share one each
    std::vector<ShareRecord> shares;
    std::vector<ItemRecord> items;
    int seq = 0;
    auto tweet = [&](const std::string& actor, const std::string& item,
                     std::uint64_t followers) {
        ShareRecord s;
        s.tweet_id = "t" + std::to_string(seq++);
        s.actor_id = actor;
        s.item_id = item;
        s.posted_at = 1400000000;
        s.follower_count = followers;
        s.bio = "bio of " + actor;
        shares.push_back(std::move(s));
    };
    for (int p = 0; p < 6; ++p) {
        items.push_back({"p" + std::to_string(p), "", 0, 0, ""});
        tweet("hub", "p" + std::to_string(p), 9000);
        tweet("spoke" + std::to_string(p), "p" + std::to_string(p), 10);
    }
    const Dataset ds = join_dataset(std::move(shares), std::move(items));
    const BipartiteGraph g = build_bigraph(ds);
    Projection proj = project(g, Side::actor);
    weigh(proj);
    const CentralityScores s = pagerank(proj);

    SUBCASE("planted hub ranks first with joined metadata") {
        const auto top = top_nodes(s, 3, g, ds);
        REQUIRE(top.size() == 3);
        CHECK(top[0].id == "hub");
        CHECK(top[0].followers == 9000);
        CHECK(top[0].tweet_count == 6);
        CHECK(top[0].unique_items == 6);
        CHECK(top[0].bio == "bio of hub");
    }
    SUBCASE("k = 0 gives an empty list") { CHECK(top_nodes(s, 0, g, ds).empty()); }
    SUBCASE("k beyond the node count returns all") {
        CHECK(top_nodes(s, 1000, g, ds).size() == s.nodes.size());
    }
    SUBCASE("uniform scores fall back to dense-id order") {
        CentralityScores uniform = s;
        for (double& v : uniform.score) v = 0.5;
        const auto top = top_nodes(uniform, 4, g, ds);
        for (std::size_t i = 1; i < top.size(); ++i) CHECK(top[i - 1].node < top[i].node);
    }
}

} // TEST_SUITE
