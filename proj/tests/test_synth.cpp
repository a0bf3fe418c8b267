#include <doctest.h>

#include <cmath>

#include "copet/bigraph.hpp"
#include "copet/ingest.hpp"
#include "copet/stats.hpp"
#include "copet/synth.hpp"
#include "copet/rng.hpp"

using namespace copet;

TEST_SUITE("synth") {

TEST_CASE("p_in=1, p_out=0 with two communities yields disconnected blocks") {
    PlantedSpec spec;
    spec.communities = 2;
    spec.actors_per_community = 10;
    spec.items_per_community = 5;
    spec.p_in = 1.0;
    spec.p_out = 0.0;
    spec.signature_sigma = 0.0;
    spec.seed = 3;
    const SynthResult r = generate(spec);
    const BipartiteGraph g = build_bigraph(r.dataset);
    CHECK(g.matched_shares == 2 * 10 * 5); // complete blocks
    for (std::uint32_t a = 0; a < g.num_actors(); ++a) {
        const std::uint32_t own =
            r.truth.actor_community[std::stoul(g.actor_ids[a].substr(5))];
        for (const std::uint32_t p : g.items_of(a))
            CHECK(r.truth.item_community[p] == own);
    }
}

TEST_CASE("noiseless signature model is recovered by ols to 1e-10") {
    PlantedSpec spec;
    spec.communities = 3;
    spec.actors_per_community = 40;
    spec.items_per_community = 30;
    spec.p_in = 0.4;
    spec.p_out = 0.05;
    spec.signature_sigma = 0.0;
    // e^alpha = 3 and beta = 2 make ln(1+sig) = ln 3 + 2*ln(1+tweets) hold
    // exactly on the rounded integer signatures
    spec.signature_alpha = std::log(3.0);
    spec.signature_beta = 2.0;
    spec.seed = 13;
    const SynthResult r = generate(spec);
    const BipartiteGraph g = build_bigraph(r.dataset);
    const auto stats = petition_stats(g, r.dataset);

    std::vector<double> lx, ly, one;
    for (const PetitionStats& st : stats) {
        lx.push_back(std::log1p(static_cast<double>(st.tweet_count)));
        ly.push_back(std::log1p(static_cast<double>(st.signatures)));
        one.push_back(1.0);
    }
    const RegressionResult reg = ols({one, lx}, {"intercept", "ln1p_tweets"}, ly);
    CHECK(reg.coef[1] == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(reg.coef[0] == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    CHECK(reg.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identical spec and seed reproduce a byte-identical dataset") {
    PlantedSpec spec;
    spec.seed = 77;
    const SynthResult a = generate(spec);
    const SynthResult b = generate(spec);
    CHECK(write_shares_jsonl(a.dataset.shares) == write_shares_jsonl(b.dataset.shares));
    CHECK(write_items_csv(a.dataset.items) == write_items_csv(b.dataset.items));
    CHECK(a.truth.delay_component == b.truth.delay_component);

    PlantedSpec other = spec;
    other.seed = 78;
    const SynthResult c = generate(other);
    CHECK(write_shares_jsonl(a.dataset.shares) != write_shares_jsonl(c.dataset.shares));
}

TEST_CASE("tweet volume stays within 3-sigma binomial bounds") {
    PlantedSpec spec;
    spec.communities = 4;
    spec.actors_per_community = 100;
    spec.items_per_community = 50;
    spec.p_in = 0.2;
    spec.p_out = 0.02;
    spec.seed = 21;
    const SynthResult r = generate(spec);

    const double n_in = 400.0 * 50;       // in-community (actor,item) pairs
    const double n_out = 400.0 * 150;     // cross-community pairs
    const double mean = n_in * spec.p_in + n_out * spec.p_out;
    const double sd = std::sqrt(n_in * spec.p_in * (1 - spec.p_in) +
                                n_out * spec.p_out * (1 - spec.p_out));
    const double tweets = static_cast<double>(r.dataset.shares.size());
    CHECK(tweets > mean - 3 * sd);
    CHECK(tweets < mean + 3 * sd);
}

TEST_CASE("delay mixture components land near their planted medians") {
    PlantedSpec spec;
    spec.communities = 2;
    spec.actors_per_community = 150;
    spec.items_per_community = 40;
    spec.p_in = 0.3;
    spec.p_out = 0.0;
    spec.delay_fast_weight = 0.5;
    spec.seed = 31;
    const SynthResult r = generate(spec);
    std::vector<double> fast, slow;
    for (std::size_t s = 0; s < r.dataset.shares.size(); ++s) {
        const std::uint32_t item = r.dataset.share_item[s];
        const double delay = static_cast<double>(r.dataset.shares[s].posted_at -
                                                 r.dataset.items[item].created_at);
        (r.truth.delay_component[s] == 0 ? fast : slow).push_back(delay);
    }
    REQUIRE(fast.size() > 100);
    REQUIRE(slow.size() > 100);
    std::sort(fast.begin(), fast.end());
    std::sort(slow.begin(), slow.end());
    CHECK(fast[fast.size() / 2] == doctest::Approx(300.0).epsilon(0.2));
    CHECK(slow[slow.size() / 2] == doctest::Approx(5.0e6).epsilon(0.2));
}

TEST_CASE("invalid specs are rejected") {
    PlantedSpec spec;
    spec.p_in = 0.1;
    spec.p_out = 0.2;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
    spec.p_out = 0.01;
    spec.signature_sigma = -1.0;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
    spec.signature_sigma = 0.1;
    spec.communities = 0;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("adjusted Rand index") {
    SUBCASE("identical labelings score 1") {
        const std::vector<std::uint32_t> a{0, 0, 1, 1, 2, 2};
        CHECK(ari(a, a) == doctest::Approx(1.0));
    }
    SUBCASE("single cluster against single cluster is degenerate agreement") {
        const std::vector<std::uint32_t> a{0, 0, 0};
        const std::vector<std::uint32_t> b{5, 5, 5};
        CHECK(ari(a, b) == doctest::Approx(1.0));
    }
    SUBCASE("independent random labelings hover near zero") {
        Rng rng(81);
        std::vector<std::uint32_t> a(1000), b(1000);
        for (std::size_t i = 0; i < 1000; ++i) {
            a[i] = static_cast<std::uint32_t>(rng.uniform_u64(4));
            b[i] = static_cast<std::uint32_t>(rng.uniform_u64(4));
        }
        CHECK(std::abs(ari(a, b)) < 0.05);
    }
    SUBCASE("a permuted relabeling still scores 1") {
        const std::vector<std::uint32_t> a{0, 0, 1, 1, 2, 2};
        const std::vector<std::uint32_t> b{7, 7, 3, 3, 9, 9};
        CHECK(ari(a, b) == doctest::Approx(1.0));
    }
}

} // TEST_SUITE
