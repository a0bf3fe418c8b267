#include "copet/stats.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "copet/ingest.hpp"
#include "copet/io_util.hpp"

namespace copet {

std::vector<PetitionStats> petition_stats(const BipartiteGraph& graph,
                                          const Dataset& dataset) {
    const std::uint32_t num_items = graph.num_items();
    std::vector<PetitionStats> stats(num_items);

    std::unordered_map<std::string_view, std::uint32_t> actor_index;
    actor_index.reserve(graph.actor_ids.size() * 2);
    for (std::uint32_t a = 0; a < graph.num_actors(); ++a)
        actor_index.emplace(graph.actor_ids[a], a);

    // Follower count of an actor = value on their first share record.
    std::vector<std::uint64_t> canonical_followers(graph.num_actors(), 0);
    std::vector<std::uint8_t> seen(graph.num_actors(), 0);
    for (std::size_t s = 0; s < dataset.shares.size(); ++s) {
        if (dataset.share_item[s] == kNoItem) continue;
        const ShareRecord& share = dataset.shares[s];
        const std::uint32_t a = actor_index.at(share.actor_id);
        if (!seen[a]) {
            seen[a] = 1;
            canonical_followers[a] = share.follower_count;
        }
        stats[dataset.share_item[s]].total_exposure += share.follower_count;
    }

    for (std::uint32_t p = 0; p < num_items; ++p) {
        PetitionStats& st = stats[p];
        st.item = p;
        st.signatures = dataset.items[p].signature_count;
        st.department = dataset.items[p].department;
        st.created_at = dataset.items[p].created_at;
        st.user_count = graph.actors_of(p).size();
        for (const std::uint32_t a : graph.actors_of(p))
            st.unique_audience += canonical_followers[a];
    }
    for (std::uint32_t a = 0; a < graph.num_actors(); ++a) {
        const auto items = graph.items_of(a);
        const auto mult = graph.multiplicities_of(a);
        for (std::size_t k = 0; k < items.size(); ++k)
            stats[items[k]].tweet_count += mult[k];
    }
    return stats;
}

RegressionResult ols(const std::vector<std::vector<double>>& columns,
                     const std::vector<std::string>& names,
                     std::span<const double> y) {
    const std::size_t p = columns.size();
    if (p == 0 || names.size() != p)
        throw std::invalid_argument("ols: empty design or name mismatch");
    const std::size_t n = y.size();
    for (const auto& col : columns)
        if (col.size() != n) throw std::invalid_argument("ols: ragged design matrix");
    if (n <= p)
        throw std::invalid_argument("ols: need more observations than coefficients");

    // Householder QR, column-major working copy.
    std::vector<std::vector<double>> a(columns);
    std::vector<double> qty(y.begin(), y.end());
    std::vector<double> col_scale(p);
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (const double v : a[j]) s += v * v;
        col_scale[j] = std::sqrt(s);
    }

    std::vector<std::vector<double>> r(p, std::vector<double>(p, 0.0));
    for (std::size_t k = 0; k < p; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += a[k][i] * a[k][i];
        norm = std::sqrt(norm);
        if (norm <= 1e-10 * std::max(1.0, col_scale[k])) {
            std::string earlier;
            for (std::size_t j = 0; j < k; ++j)
                earlier += (j ? ", " : "") + names[j];
            throw CollinearityError("ols: column '" + names[k] +
                                    "' is linearly dependent on earlier columns (" +
                                    earlier + ")");
        }
        const double alpha = a[k][k] >= 0.0 ? -norm : norm;
        // Householder vector v = x - alpha*e_k, applied as I - 2vv'/v'v.
        std::vector<double> v(n - k);
        v[0] = a[k][k] - alpha;
        for (std::size_t i = k + 1; i < n; ++i) v[i - k] = a[k][i];
        double vtv = 0.0;
        for (const double x : v) vtv += x * x;

        a[k][k] = alpha;
        for (std::size_t i = k + 1; i < n; ++i) a[k][i] = 0.0;
        for (std::size_t j = k + 1; j < p; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i - k] * a[j][i];
            const double f = 2.0 * dot / vtv;
            for (std::size_t i = k; i < n; ++i) a[j][i] -= f * v[i - k];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < n; ++i) dot += v[i - k] * qty[i];
        const double f = 2.0 * dot / vtv;
        for (std::size_t i = k; i < n; ++i) qty[i] -= f * v[i - k];

        for (std::size_t j = k; j < p; ++j) r[j][k] = a[j][k]; // row k of R
    }

    RegressionResult result;
    result.names = names;
    result.n = n;
    result.coef.assign(p, 0.0);
    for (std::size_t k = p; k-- > 0;) {
        double s = qty[k];
        for (std::size_t j = k + 1; j < p; ++j) s -= r[j][k] * result.coef[j];
        result.coef[k] = s / r[k][k];
    }

    double ssr = 0.0;
    for (std::size_t i = p; i < n; ++i) ssr += qty[i] * qty[i];
    double mean = 0.0;
    for (const double v : y) mean += v;
    mean /= static_cast<double>(n);
    double sst = 0.0;
    for (const double v : y) sst += (v - mean) * (v - mean);
    result.r2 = sst > 0.0 ? 1.0 - ssr / sst : 1.0;

    // (X'X)^-1 = R^-1 R^-T; invert the p-by-p upper triangle.
    std::vector<std::vector<double>> rinv(p, std::vector<double>(p, 0.0));
    for (std::size_t j = p; j-- > 0;) {
        rinv[j][j] = 1.0 / r[j][j];
        for (std::size_t i = j; i-- > 0;) {
            double s = 0.0;
            for (std::size_t k = i + 1; k <= j; ++k) s += r[k][i] * rinv[j][k];
            rinv[j][i] = -s / r[i][i];
        }
    }
    const double sigma2 = ssr / static_cast<double>(n - p);
    result.std_err.assign(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        double s = 0.0;
        for (std::size_t j = i; j < p; ++j) s += rinv[j][i] * rinv[j][i];
        result.std_err[i] = std::sqrt(sigma2 * s);
    }
    return result;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

std::optional<double> loglog_corr(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) return std::nullopt;
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx[i] = std::log1p(x[i]);
        ly[i] = std::log1p(y[i]);
    }
    return pearson(lx, ly);
}

namespace {

std::vector<double> ln1p_series(const std::vector<PetitionStats>& stats,
                                std::uint64_t PetitionStats::* field) {
    std::vector<double> out(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i)
        out[i] = std::log1p(static_cast<double>(stats[i].*field));
    return out;
}

} // namespace

std::vector<RegressionResult> signature_regressions(const std::vector<PetitionStats>& stats) {
    const std::vector<double> sig = ln1p_series(stats, &PetitionStats::signatures);
    const std::vector<double> tweets = ln1p_series(stats, &PetitionStats::tweet_count);
    const std::vector<double> users = ln1p_series(stats, &PetitionStats::user_count);
    const std::vector<double> audience = ln1p_series(stats, &PetitionStats::unique_audience);
    const std::vector<double> exposure = ln1p_series(stats, &PetitionStats::total_exposure);
    const std::vector<double> intercept(stats.size(), 1.0);

    std::vector<RegressionResult> out;
    out.push_back(ols({intercept, tweets}, {"intercept", "ln1p_tweets"}, sig));
    out.push_back(ols({intercept, tweets, users},
                      {"intercept", "ln1p_tweets", "ln1p_users"}, sig));
    out.push_back(ols({intercept, audience}, {"intercept", "ln1p_unique_audience"}, sig));
    out.push_back(ols({intercept, exposure}, {"intercept", "ln1p_total_exposure"}, sig));

    // Department one-hot dummies, reference category = most frequent
    // department (ties broken lexicographically).
    std::map<std::string, std::uint64_t> dept_count;
    for (const PetitionStats& st : stats) ++dept_count[st.department];
    std::string reference;
    std::uint64_t best = 0;
    for (const auto& [dept, count] : dept_count) {
        if (count > best) {
            best = count;
            reference = dept;
        }
    }
    std::vector<std::vector<double>> columns{intercept, tweets, users};
    std::vector<std::string> names{"intercept", "ln1p_tweets", "ln1p_users"};
    for (const auto& [dept, count] : dept_count) {
        if (dept == reference) continue;
        std::vector<double> dummy(stats.size(), 0.0);
        for (std::size_t i = 0; i < stats.size(); ++i)
            if (stats[i].department == dept) dummy[i] = 1.0;
        columns.push_back(std::move(dummy));
        names.push_back("dept:" + dept);
    }
    out.push_back(ols(columns, names, sig));
    return out;
}

std::size_t Histogram::bin_of(double value) const {
    const auto it = std::upper_bound(edges.begin(), edges.end(), value);
    if (it == edges.begin()) return 0;
    return std::min(counts.size() - 1,
                    static_cast<std::size_t>(it - edges.begin()) - 1);
}

namespace {

Histogram build_histogram(std::span<const double> values, std::vector<double> edges) {
    Histogram h;
    h.edges = std::move(edges);
    h.counts.assign(h.edges.size() - 1, 0);
    for (const double v : values) ++h.counts[h.bin_of(v)];
    h.total = values.size();
    return h;
}

} // namespace

Histogram log2_histogram(std::span<const double> values) {
    double max_v = 0.0;
    for (const double v : values) max_v = std::max(max_v, v);
    std::vector<double> edges{0.0, 1.0};
    while (edges.back() <= max_v) edges.push_back(edges.back() * 2.0);
    return build_histogram(values, std::move(edges));
}

Histogram log10_histogram(std::span<const double> values) {
    double max_v = 0.0;
    for (const double v : values) max_v = std::max(max_v, v);
    std::vector<double> edges{0.0};
    // Quarter-decade steps; whole decades accumulated exactly so the 1e4 and
    // 1e5 threshold markers are edge values.
    double decade = 1.0;
    for (int k = 0;; ++k) {
        const double e = (k % 4 == 0) ? decade : decade * std::pow(10.0, 0.25 * (k % 4));
        if (k % 4 == 3) decade *= 10.0;
        edges.push_back(e);
        if (e > max_v) break;
    }
    return build_histogram(values, std::move(edges));
}

std::vector<std::size_t> local_maxima(const Histogram& hist, int smooth_window) {
    const std::size_t n = hist.counts.size();
    if (n == 0) return {};
    std::vector<double> smooth(n, 0.0);
    const int half = smooth_window / 2;
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        int cnt = 0;
        for (int d = -half; d <= half; ++d) {
            const std::int64_t j = static_cast<std::int64_t>(i) + d;
            if (j < 0 || j >= static_cast<std::int64_t>(n)) continue;
            sum += static_cast<double>(hist.counts[static_cast<std::size_t>(j)]);
            ++cnt;
        }
        smooth[i] = sum / cnt;
    }
    std::vector<std::size_t> maxima;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i > 0 ? smooth[i - 1] : -1.0;
        const double right = i + 1 < n ? smooth[i + 1] : -1.0;
        if (smooth[i] > 0.0 && smooth[i] > left && smooth[i] > right)
            maxima.push_back(i);
    }
    return maxima;
}

DelayAnalysis delay_histogram(const Dataset& dataset) {
    DelayAnalysis out;
    std::vector<double> delays;
    delays.reserve(dataset.matched);
    std::unordered_map<std::uint32_t, std::vector<double>> per_item;
    for (std::size_t s = 0; s < dataset.shares.size(); ++s) {
        const std::uint32_t item = dataset.share_item[s];
        if (item == kNoItem) continue;
        const std::int64_t delay =
            dataset.shares[s].posted_at - dataset.items[item].created_at;
        if (delay < 0) {
            ++out.negative_excluded;
            continue;
        }
        delays.push_back(static_cast<double>(delay));
        per_item[item].push_back(static_cast<double>(delay));
    }
    out.hist = log2_histogram(delays);

    std::vector<std::uint32_t> items;
    items.reserve(per_item.size());
    for (const auto& [item, _] : per_item) items.push_back(item);
    std::sort(items.begin(), items.end());
    for (const std::uint32_t item : items) {
        auto& d = per_item[item];
        std::sort(d.begin(), d.end());
        const std::size_t n = d.size();
        const double median =
            n % 2 == 1 ? d[n / 2] : (d[n / 2 - 1] + d[n / 2]) / 2.0;
        out.per_item_median_delay.push_back(median);
        out.per_item_tweet_count.push_back(static_cast<double>(n));
    }
    out.delay_tweets_corr = loglog_corr(out.per_item_median_delay, out.per_item_tweet_count);
    return out;
}

ThresholdProfile threshold_profile(const Dataset& dataset) {
    ThresholdProfile out;
    std::vector<double> sigs;
    sigs.reserve(dataset.matched);
    for (std::size_t s = 0; s < dataset.shares.size(); ++s) {
        const std::uint32_t item = dataset.share_item[s];
        if (item == kNoItem) continue;
        sigs.push_back(static_cast<double>(dataset.items[item].signature_count));
    }
    out.hist = log10_histogram(sigs);
    if (!sigs.empty()) {
        std::sort(sigs.begin(), sigs.end());
        const std::size_t n = sigs.size();
        out.median = n % 2 == 1 ? sigs[n / 2] : (sigs[n / 2 - 1] + sigs[n / 2]) / 2.0;
        std::uint64_t ge_10k = 0, ge_100k = 0;
        for (const double v : sigs) {
            if (v >= 1e4) ++ge_10k;
            if (v >= 1e5) ++ge_100k;
        }
        out.frac_ge_10k = static_cast<double>(ge_10k) / static_cast<double>(n);
        out.frac_ge_100k = static_cast<double>(ge_100k) / static_cast<double>(n);
    }
    return out;
}

namespace {

// Fixed English stopword list (Figures imply one but never specify it;
// this list ships with the artifact and is part of its contract).
const std::unordered_set<std::string_view>& stopwords() {
    static const std::unordered_set<std::string_view> words{
        "the", "and", "for", "are", "but", "not", "you", "all", "any", "can",
        "had", "her", "was", "one", "our", "out", "day", "get", "has", "him",
        "his", "how", "man", "new", "now", "old", "see", "two", "way", "who",
        "its", "did", "yes", "she", "may", "say", "each", "which", "their",
        "will", "other", "about", "many", "then", "them", "these", "some",
        "would", "into", "more", "your", "than", "that", "this", "they",
        "have", "from", "with", "been", "were", "what", "when", "where",
        "there", "here", "also", "just", "only", "over", "such", "very",
        "too", "own", "same", "after", "before", "under", "while", "does",
        "doing", "being", "because", "between", "both", "during", "few",
        "most", "off", "once", "should", "could", "against", "above",
        "below", "down", "further", "until", "again", "those", "through",
        "itself", "himself", "herself", "myself", "yourself", "themselves",
        "ourselves", "having", "don", "isn", "aren", "wasn", "weren", "won",
        "didn", "doesn", "hasn", "haven", "hadn", "shouldn", "wouldn",
        "couldn", "per", "via",
    };
    return words;
}

} // namespace

bool is_stopword(std::string_view token) { return stopwords().contains(token); }

std::vector<TokenCount> word_freq(std::span<const std::string> texts) {
    std::unordered_map<std::string, std::uint64_t> counts;
    std::string token;
    for (const std::string& text : texts) {
        token.clear();
        for (const char c : text) {
            const unsigned char uc = static_cast<unsigned char>(c);
            if (std::isalnum(uc)) {
                token.push_back(static_cast<char>(std::tolower(uc)));
            } else if (!token.empty()) {
                if (token.size() >= 2 && !is_stopword(token)) ++counts[token];
                token.clear();
            }
        }
        if (token.size() >= 2 && !is_stopword(token)) ++counts[token];
        token.clear();
    }
    std::vector<TokenCount> out;
    out.reserve(counts.size());
    for (auto& [tok, count] : counts)
        out.push_back({tok, count, std::log1p(static_cast<double>(count))});
    std::sort(out.begin(), out.end(), [](const TokenCount& l, const TokenCount& r) {
        if (l.count != r.count) return l.count > r.count;
        return l.token < r.token;
    });
    return out;
}

std::vector<Dataset> temporal_split(const Dataset& dataset,
                                    std::span<const std::int64_t> boundaries) {
    for (std::size_t i = 1; i < boundaries.size(); ++i)
        if (boundaries[i] <= boundaries[i - 1])
            throw std::invalid_argument("temporal boundaries must be strictly increasing");

    const std::size_t buckets = boundaries.size() + 1;
    std::vector<std::vector<ItemRecord>> items(buckets);
    std::vector<std::size_t> item_bucket(dataset.items.size());
    for (std::size_t p = 0; p < dataset.items.size(); ++p) {
        const std::size_t b = static_cast<std::size_t>(
            std::upper_bound(boundaries.begin(), boundaries.end(),
                             dataset.items[p].created_at) -
            boundaries.begin());
        item_bucket[p] = b;
        items[b].push_back(dataset.items[p]);
    }
    std::vector<std::vector<ShareRecord>> shares(buckets);
    for (std::size_t s = 0; s < dataset.shares.size(); ++s) {
        const std::uint32_t item = dataset.share_item[s];
        if (item == kNoItem) continue; // no item date to follow
        shares[item_bucket[item]].push_back(dataset.shares[s]);
    }
    std::vector<Dataset> out;
    out.reserve(buckets);
    for (std::size_t b = 0; b < buckets; ++b)
        out.push_back(join_dataset(std::move(shares[b]), std::move(items[b])));
    return out;
}

CorrelationReport scalar_correlates(const Dataset& dataset,
                                    const std::vector<PetitionStats>& stats,
                                    const Projection& item_projection,
                                    const CentralityScores& item_scores) {
    CorrelationReport report;

    std::vector<double> sig(stats.size()), tweets(stats.size()), users(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) {
        sig[i] = static_cast<double>(stats[i].signatures);
        tweets[i] = static_cast<double>(stats[i].tweet_count);
        users[i] = static_cast<double>(stats[i].user_count);
    }
    report.signatures_vs_tweets = {loglog_corr(sig, tweets), sig.size()};
    report.signatures_vs_users = {loglog_corr(sig, users), sig.size()};

    // (i) edge weight vs product of the endpoints' signatures.
    {
        std::vector<double> w, prod;
        w.reserve(item_projection.edges.size());
        prod.reserve(item_projection.edges.size());
        for (const ProjectionEdge& e : item_projection.edges) {
            w.push_back(e.weight);
            prod.push_back(static_cast<double>(stats[e.a].signatures) *
                           static_cast<double>(stats[e.b].signatures));
        }
        report.weight_vs_sig_product = {loglog_corr(w, prod), w.size()};
    }

    // (ii) PageRank vs signatures, all scored items and the >=10k subset.
    {
        std::vector<double> pr, s_all, pr_10k, s_10k;
        for (std::size_t i = 0; i < item_scores.nodes.size(); ++i) {
            const double s = static_cast<double>(stats[item_scores.nodes[i]].signatures);
            pr.push_back(item_scores.score[i]);
            s_all.push_back(s);
            if (s >= 1e4) {
                pr_10k.push_back(item_scores.score[i]);
                s_10k.push_back(s);
            }
        }
        report.pagerank_vs_signatures = {loglog_corr(pr, s_all), pr.size()};
        report.pagerank_vs_signatures_ge_10k = {loglog_corr(pr_10k, s_10k), pr_10k.size()};
    }

    // (iii) per-item favorite/retweet sums, (iv) verified-actor tweet counts.
    {
        std::vector<double> favorites(stats.size(), 0.0), retweets(stats.size(), 0.0),
            verified(stats.size(), 0.0);
        for (std::size_t s = 0; s < dataset.shares.size(); ++s) {
            const std::uint32_t item = dataset.share_item[s];
            if (item == kNoItem) continue;
            favorites[item] += dataset.shares[s].favorite_count;
            retweets[item] += dataset.shares[s].retweet_count;
            if (dataset.shares[s].verified) verified[item] += 1.0;
        }
        report.favorites_vs_signatures = {loglog_corr(favorites, sig), sig.size()};
        report.retweets_vs_signatures = {loglog_corr(retweets, sig), sig.size()};
        report.verified_tweets_vs_signatures = {loglog_corr(verified, sig), sig.size()};
    }
    return report;
}

} // namespace copet
