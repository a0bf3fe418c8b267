#include "copet/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "copet/ingest.hpp"
#include "copet/io_util.hpp"
#include "copet/rng.hpp"

namespace copet {

namespace {

std::string padded(const char* prefix, std::uint32_t v, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*u", prefix, width, v);
    return buf;
}

void validate(const PlantedSpec& spec) {
    if (spec.communities < 1)
        throw std::invalid_argument("synth: communities must be >= 1");
    if (!(spec.p_out >= 0.0 && spec.p_out < spec.p_in && spec.p_in <= 1.0))
        throw std::invalid_argument("synth: need 0 <= p_out < p_in <= 1");
    if (spec.signature_sigma < 0.0)
        throw std::invalid_argument("synth: signature_sigma must be >= 0");
    if (!(spec.delay_fast_weight >= 0.0 && spec.delay_fast_weight <= 1.0))
        throw std::invalid_argument("synth: delay_fast_weight must be in [0,1]");
    if (spec.actors_per_community == 0 || spec.items_per_community == 0)
        throw std::invalid_argument("synth: empty community shape");
}

} // namespace

SynthResult generate(const PlantedSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);

    const std::uint32_t k = spec.communities;
    const std::uint32_t num_actors = k * spec.actors_per_community;
    const std::uint32_t num_items = k * spec.items_per_community;

    SynthResult result;
    GroundTruth& truth = result.truth;
    truth.alpha = spec.signature_alpha;
    truth.beta = spec.signature_beta;
    truth.sigma = spec.signature_sigma;
    truth.p_in = spec.p_in;
    truth.p_out = spec.p_out;

    // Items first: ids, creation times, departments.
    std::vector<ItemRecord> items(num_items);
    truth.item_community.resize(num_items);
    std::vector<std::vector<std::string>> vocab = spec.bio_vocab;
    if (vocab.empty()) {
        vocab.resize(k);
        for (std::uint32_t c = 0; c < k; ++c)
            for (std::uint32_t t = 0; t < 20; ++t)
                vocab[c].push_back("topic" + std::to_string(c) + "term" + std::to_string(t));
    }
    if (vocab.size() != k)
        throw std::invalid_argument("synth: bio_vocab must have one list per community");

    for (std::uint32_t p = 0; p < num_items; ++p) {
        const std::uint32_t c = p / spec.items_per_community;
        truth.item_community[p] = c;
        items[p].item_id = padded("item", p, 6);
        items[p].created_at =
            spec.item_time_start +
            (spec.item_time_span > 0
                 ? static_cast<std::int64_t>(rng.uniform_u64(
                       static_cast<std::uint64_t>(spec.item_time_span)))
                 : 0);
        items[p].department = "dept" + std::to_string(p % std::max(1u, spec.departments));
        std::string title;
        for (std::uint32_t t = 0; t < 6; ++t) {
            if (t) title.push_back(' ');
            title += vocab[c][rng.uniform_u64(vocab[c].size())];
        }
        items[p].title = std::move(title);
    }

    // Actors: profile metadata and community-flavored bios.
    struct ActorInfo {
        std::string id;
        std::uint64_t followers, following;
        bool verified;
        std::string bio;
        std::int64_t created;
    };
    std::vector<ActorInfo> actors(num_actors);
    truth.actor_community.resize(num_actors);
    for (std::uint32_t a = 0; a < num_actors; ++a) {
        const std::uint32_t c = a / spec.actors_per_community;
        truth.actor_community[a] = c;
        ActorInfo& info = actors[a];
        info.id = padded("actor", a, 6);
        info.followers = static_cast<std::uint64_t>(
            rng.lognormal(spec.follower_log_mean, spec.follower_log_sigma));
        info.following = rng.uniform_u64(2001);
        info.verified = rng.bernoulli(spec.verified_prob);
        std::string bio;
        for (std::uint32_t t = 0; t < spec.bio_tokens; ++t) {
            if (t) bio.push_back(' ');
            bio += vocab[c][rng.uniform_u64(vocab[c].size())];
        }
        info.bio = std::move(bio);
        info.created = spec.item_time_start - 20000000 -
                       static_cast<std::int64_t>(rng.uniform_u64(10000000));
    }

    // Tweets: each actor hits same-community items with p_in and the rest
    // with p_out, sampled by geometric skipping over the item ranges.
    std::vector<ShareRecord> shares;
    std::vector<std::uint64_t> item_tweets(num_items, 0);
    std::uint64_t tweet_seq = 0;

    auto emit_tweet = [&](std::uint32_t a, std::uint32_t p) {
        ShareRecord share;
        share.tweet_id = padded("t", static_cast<std::uint32_t>(tweet_seq++), 9);
        share.actor_id = actors[a].id;
        share.item_id = items[p].item_id;
        const bool fast = rng.bernoulli(spec.delay_fast_weight);
        truth.delay_component.push_back(fast ? 0 : 1);
        const double delay = fast
            ? rng.lognormal(std::log(spec.delay_fast_median), spec.delay_fast_sigma)
            : rng.lognormal(std::log(spec.delay_slow_median), spec.delay_slow_sigma);
        share.posted_at = items[p].created_at + static_cast<std::int64_t>(delay);
        share.retweet_count = static_cast<std::uint32_t>(rng.uniform_u64(12));
        share.favorite_count = static_cast<std::uint32_t>(rng.uniform_u64(8));
        share.follower_count = actors[a].followers;
        share.following_count = actors[a].following;
        share.verified = actors[a].verified;
        share.bio = actors[a].bio;
        share.account_created_at = actors[a].created;
        shares.push_back(std::move(share));
        ++item_tweets[p];
    };

    for (std::uint32_t a = 0; a < num_actors; ++a) {
        const std::uint32_t own = truth.actor_community[a];
        for (std::uint32_t block = 0; block < k; ++block) {
            const double p = block == own ? spec.p_in : spec.p_out;
            if (p <= 0.0) continue;
            const std::uint32_t base = block * spec.items_per_community;
            std::uint64_t pos = rng.geometric_skip(p);
            while (pos < spec.items_per_community) {
                const std::uint32_t item = base + static_cast<std::uint32_t>(pos);
                emit_tweet(a, item);
                if (spec.repeat_prob > 0.0 && rng.bernoulli(spec.repeat_prob))
                    emit_tweet(a, item);
                pos += 1 + rng.geometric_skip(p);
            }
        }
    }

    // Signatures from the planted log-linear model.
    for (std::uint32_t p = 0; p < num_items; ++p) {
        const double eps =
            spec.signature_sigma > 0.0 ? spec.signature_sigma * rng.normal() : 0.0;
        const double lin = spec.signature_alpha +
                           spec.signature_beta *
                               std::log1p(static_cast<double>(item_tweets[p])) +
                           eps;
        const double sig = std::round(std::expm1(lin));
        items[p].signature_count =
            sig > 0.0 ? static_cast<std::uint64_t>(sig) : 0;
    }

    result.dataset = join_dataset(std::move(shares), std::move(items));
    return result;
}

void write_synth(const SynthResult& result, const std::string& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir + "/shares.jsonl", write_shares_jsonl(result.dataset.shares));
    write_file(dir + "/items.csv", write_items_csv(result.dataset.items));

    nlohmann::json truth;
    truth["actor_community"] = result.truth.actor_community;
    truth["item_community"] = result.truth.item_community;
    truth["delay_component"] = result.truth.delay_component;
    truth["alpha"] = result.truth.alpha;
    truth["beta"] = result.truth.beta;
    truth["sigma"] = result.truth.sigma;
    truth["p_in"] = result.truth.p_in;
    truth["p_out"] = result.truth.p_out;
    write_file(dir + "/ground_truth.json", truth.dump(2) + "\n");
}

double ari(std::span<const std::uint32_t> labels_a, std::span<const std::uint32_t> labels_b) {
    if (labels_a.size() != labels_b.size())
        throw std::invalid_argument("ari: label vectors differ in length");
    const std::size_t n = labels_a.size();
    if (n == 0) return 1.0;

    std::unordered_map<std::uint64_t, std::uint64_t> cell;
    std::unordered_map<std::uint32_t, std::uint64_t> row, col;
    for (std::size_t i = 0; i < n; ++i) {
        ++cell[(static_cast<std::uint64_t>(labels_a[i]) << 32) | labels_b[i]];
        ++row[labels_a[i]];
        ++col[labels_b[i]];
    }
    auto choose2 = [](std::uint64_t v) {
        return static_cast<double>(v) * static_cast<double>(v - 1) / 2.0;
    };
    double index = 0.0, sum_row = 0.0, sum_col = 0.0;
    for (const auto& [_, v] : cell) index += choose2(v);
    for (const auto& [_, v] : row) sum_row += choose2(v);
    for (const auto& [_, v] : col) sum_col += choose2(v);
    const double total = choose2(n);
    const double expected = sum_row * sum_col / total;
    const double max_index = (sum_row + sum_col) / 2.0;
    if (max_index == expected) return 1.0; // degenerate agreement
    return (index - expected) / (max_index - expected);
}

} // namespace copet
