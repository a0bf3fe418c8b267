#include <doctest.h>

#include <map>

#include "copet/bigraph.hpp"
#include "copet/ingest.hpp"
#include "copet/io_util.hpp"
#include "copet/rng.hpp"
#include "oracles.hpp"

using namespace copet;

namespace {

Dataset tiny_dataset(const std::vector<std::pair<std::string, std::string>>& tweets,
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
    for (const std::string& id : item_ids) items.push_back({id, "", 1399000000, 0, ""});
    return join_dataset(std::move(shares), std::move(items));
}

} // namespace

TEST_SUITE("bigraph") {

TEST_CASE("one actor, one item, three tweets collapses to multiplicity 3") {
    const Dataset ds = tiny_dataset({{"a", "p"}, {"a", "p"}, {"a", "p"}}, {"p"});
    const BipartiteGraph g = build_bigraph(ds);
    CHECK(g.num_actors() == 1);
    CHECK(g.num_items() == 1);
    REQUIRE(g.incidence_count() == 1);
    CHECK(g.multiplicities[0] == 3);
    CHECK(g.matched_shares == 3);
}

TEST_CASE("three actors on one item: item degree 3, actor degrees 1") {
    const Dataset ds = tiny_dataset({{"a", "p"}, {"b", "p"}, {"c", "p"}}, {"p"});
    const BipartiteGraph g = build_bigraph(ds);
    CHECK(g.actors_of(0).size() == 3);
    for (std::uint32_t a = 0; a < 3; ++a) CHECK(g.items_of(a).size() == 1);
}

TEST_CASE("unmatched shares are excluded and counted") {
    const Dataset ds = tiny_dataset({{"a", "p"}, {"a", "missing"}}, {"p"});
    const BipartiteGraph g = build_bigraph(ds);
    CHECK(g.matched_shares == 1);
    CHECK(g.excluded_unmatched == 1);
}

TEST_CASE("random graph satisfies transpose identity and multiplicity sums") {
    Rng rng(21);
    const Dataset ds = oracle::random_dataset(40, 25, 0.15, 4, rng);
    const BipartiteGraph g = build_bigraph(ds);

    // brute-force recount from the raw records
    std::map<std::pair<std::string, std::string>, std::uint32_t> expected;
    for (std::size_t s = 0; s < ds.shares.size(); ++s)
        if (ds.share_item[s] != kNoItem)
            ++expected[{ds.shares[s].actor_id, ds.shares[s].item_id}];

    std::uint64_t mult_sum = 0;
    std::map<std::pair<std::string, std::string>, std::uint32_t> actual;
    for (std::uint32_t a = 0; a < g.num_actors(); ++a) {
        const auto items = g.items_of(a);
        const auto mult = g.multiplicities_of(a);
        for (std::size_t k = 0; k < items.size(); ++k) {
            actual[{g.actor_ids[a], g.item_ids[items[k]]}] = mult[k];
            mult_sum += mult[k];
        }
        CHECK(std::is_sorted(items.begin(), items.end()));
        CHECK(std::adjacent_find(items.begin(), items.end()) == items.end());
    }
    CHECK(actual == expected);
    CHECK(mult_sum == g.matched_shares);

    // transpose identity: same incidence pairs from the item side
    std::uint64_t reverse_count = 0;
    for (std::uint32_t p = 0; p < g.num_items(); ++p) {
        const auto actors = g.actors_of(p);
        CHECK(std::is_sorted(actors.begin(), actors.end()));
        for (const std::uint32_t a : actors) {
            const auto items = g.items_of(a);
            CHECK(std::binary_search(items.begin(), items.end(), p));
        }
        reverse_count += actors.size();
    }
    CHECK(reverse_count == g.incidence_count());
}

TEST_CASE("dense id mapping is deterministic given identical input order") {
    Rng rng(22);
    const Dataset ds = oracle::random_dataset(30, 20, 0.2, 2, rng);
    const BipartiteGraph g1 = build_bigraph(ds);
    const BipartiteGraph g2 = build_bigraph(ds);
    CHECK(g1.actor_ids == g2.actor_ids);
    CHECK(serialize_bigraph(g1) == serialize_bigraph(g2));
}

TEST_CASE("degree profile medians and maxima") {
    SUBCASE("empty graph reports absent values") {
        const Dataset ds = tiny_dataset({}, {});
        const DegreeProfile p = degree_profile(build_bigraph(ds), ds);
        CHECK_FALSE(p.median_users.has_value());
        CHECK_FALSE(p.max_signatures.has_value());
    }
    SUBCASE("two items with user counts {1,3} give median 2, max 3") {
        const Dataset ds = tiny_dataset(
            {{"a", "p1"}, {"a", "p2"}, {"b", "p2"}, {"c", "p2"}}, {"p1", "p2"});
        const DegreeProfile p = degree_profile(build_bigraph(ds), ds);
        CHECK(*p.median_users == 2.0);
        CHECK(*p.max_users == 3);
    }
    SUBCASE("skewed dataset matches an independent recount") {
        Rng rng(23);
        const Dataset ds = oracle::random_dataset(50, 30, 0.1, 5, rng);
        const BipartiteGraph g = build_bigraph(ds);
        const DegreeProfile p = degree_profile(g, ds);

        std::vector<std::uint64_t> users, tweets;
        for (std::uint32_t item = 0; item < g.num_items(); ++item) {
            users.push_back(g.actors_of(item).size());
            std::uint64_t t = 0;
            for (std::size_t s = 0; s < ds.shares.size(); ++s)
                if (ds.share_item[s] == item) ++t;
            tweets.push_back(t);
        }
        std::sort(users.begin(), users.end());
        std::sort(tweets.begin(), tweets.end());
        const std::size_t n = users.size();
        const double med_users =
            n % 2 ? users[n / 2] : (users[n / 2 - 1] + users[n / 2]) / 2.0;
        const double med_tweets =
            n % 2 ? tweets[n / 2] : (tweets[n / 2 - 1] + tweets[n / 2]) / 2.0;
        CHECK(*p.median_users == med_users);
        CHECK(*p.median_tweets == med_tweets);
        CHECK(*p.max_users == users.back());
        CHECK(*p.max_tweets == tweets.back());
    }
}

TEST_CASE("binary cache round-trips bit-identically") {
    SUBCASE("empty graph") {
        const Dataset ds = tiny_dataset({}, {});
        const BipartiteGraph g = build_bigraph(ds);
        const std::string bytes = serialize_bigraph(g);
        CHECK(serialize_bigraph(deserialize_bigraph(bytes)) == bytes);
    }
    SUBCASE("random graph") {
        Rng rng(24);
        const Dataset ds = oracle::random_dataset(35, 18, 0.2, 3, rng);
        const BipartiteGraph g = build_bigraph(ds);
        const std::string bytes = serialize_bigraph(g);
        CHECK(serialize_bigraph(deserialize_bigraph(bytes)) == bytes);
    }
}

TEST_CASE("corrupted caches fail loudly") {
    Rng rng(25);
    const Dataset ds = oracle::random_dataset(10, 8, 0.3, 2, rng);
    std::string bytes = serialize_bigraph(build_bigraph(ds));

    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(deserialize_bigraph(bad_magic), IoError);

    std::string bad_version = bytes;
    bad_version[4] = 99;
    CHECK_THROWS_WITH_AS(deserialize_bigraph(bad_version),
                         doctest::Contains("version"), IoError);

    const std::string truncated = bytes.substr(0, bytes.size() / 2);
    CHECK_THROWS_AS(deserialize_bigraph(truncated), IoError);
}

} // TEST_SUITE
