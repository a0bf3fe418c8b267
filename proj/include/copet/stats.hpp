#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "copet/bigraph.hpp"
#include "copet/centrality.hpp"
#include "copet/community.hpp"
#include "copet/projection.hpp"
#include "copet/records.hpp"

namespace copet {

// Per-item tallies feeding the regressions and correlations.
// unique_audience sums follower counts over distinct actors who tweeted the
// item (follower count taken from the actor's first share record);
// total_exposure sums per-tweet follower counts, so an actor tweeting twice
// counts twice.
struct PetitionStats {
    std::uint32_t item = 0; // dense id == dataset item index
    std::uint64_t signatures = 0;
    std::uint64_t tweet_count = 0; // with multiplicity
    std::uint64_t user_count = 0;  // distinct actors
    std::uint64_t unique_audience = 0;
    std::uint64_t total_exposure = 0;
    std::string department;
    std::int64_t created_at = 0;
};

std::vector<PetitionStats> petition_stats(const BipartiteGraph& graph,
                                          const Dataset& dataset);

struct RegressionResult {
    std::vector<std::string> names;
    std::vector<double> coef;
    std::vector<double> std_err;
    double r2 = 0.0;
    std::size_t n = 0;
};

struct CollinearityError : std::runtime_error {
    explicit CollinearityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Ordinary least squares via Householder QR; the caller includes the
// intercept column. Standard errors come from the residual variance,
// R^2 = 1 - SSR/SST. Rank deficiency throws CollinearityError naming the
// offending column.
RegressionResult ols(const std::vector<std::vector<double>>& columns,
                     const std::vector<std::string>& names,
                     std::span<const double> y);

// Pearson correlation (two-pass). nullopt when either series has zero
// variance or fewer than 2 points.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

// Pearson of ln(1+x) vs ln(1+y); the transform used throughout, since many
// count features are 0 or 1.
std::optional<double> loglog_corr(std::span<const double> x, std::span<const double> y);

// The five signature regressions: 1) ln(1+sig) ~ ln(1+tweets); 2) adds
// ln(1+users); 3) ln(1+unique_audience) alone; 4) ln(1+total_exposure)
// alone; 5) tweets + users + department one-hot dummies with the most
// frequent department as reference category (single-department data reduces
// to regression 2).
std::vector<RegressionResult> signature_regressions(const std::vector<PetitionStats>& stats);

struct Histogram {
    std::vector<double> edges; // strictly increasing, counts.size()+1
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    std::size_t bin_of(double value) const;
};

// Log-scaled bins doubling from 1 (first bin [0,1) holds zero delays).
Histogram log2_histogram(std::span<const double> values);
// Decade bins with 4 sub-steps; edges land exactly on 1e4 and 1e5.
Histogram log10_histogram(std::span<const double> values);

// Bin indices of local maxima after moving-average smoothing (window 3).
std::vector<std::size_t> local_maxima(const Histogram& hist, int smooth_window = 3);

struct DelayAnalysis {
    Histogram hist;                   // per-tweet delay in seconds (matched shares)
    std::uint64_t negative_excluded = 0; // tweets predating their petition
    std::vector<double> per_item_median_delay; // items with >= 1 valid tweet
    std::vector<double> per_item_tweet_count;  // parallel
    std::optional<double> delay_tweets_corr;   // loglog over the per-item series
};

DelayAnalysis delay_histogram(const Dataset& dataset);

struct ThresholdProfile {
    Histogram hist;      // per-tweet final signatures of the tweeted petition
    std::optional<double> median; // midpoint convention
    double frac_ge_10k = 0.0;
    double frac_ge_100k = 0.0;
};

ThresholdProfile threshold_profile(const Dataset& dataset);

// Lowercases, splits on non-alphanumerics, drops tokens shorter than 2 and
// a fixed English stopword list; log_weight = ln(1+count). Sorted by count
// descending, ties by token.
std::vector<TokenCount> word_freq(std::span<const std::string> texts);

bool is_stopword(std::string_view token);

// Items partitioned by created_at into [-inf,b1), [b1,b2), ...; matched
// shares follow their item (unmatched shares have no item date and are not
// carried into any split). Boundaries must be strictly increasing.
std::vector<Dataset> temporal_split(const Dataset& dataset,
                                    std::span<const std::int64_t> boundaries);

struct CorrelationEntry {
    std::optional<double> value;
    std::size_t n = 0;
};

// The scalar correlation battery, all via loglog_corr:
//  - filtered item-projection edge weight vs product of endpoint signatures
//  - item PageRank vs signatures, over all scored items and the >=10k subset
//  - per-item favorite / retweet sums vs signatures
//  - per-item verified-actor tweet counts vs signatures
struct CorrelationReport {
    CorrelationEntry signatures_vs_tweets;
    CorrelationEntry signatures_vs_users;
    CorrelationEntry weight_vs_sig_product;
    CorrelationEntry pagerank_vs_signatures;
    CorrelationEntry pagerank_vs_signatures_ge_10k;
    CorrelationEntry favorites_vs_signatures;
    CorrelationEntry retweets_vs_signatures;
    CorrelationEntry verified_tweets_vs_signatures;
};

CorrelationReport scalar_correlates(const Dataset& dataset,
                                    const std::vector<PetitionStats>& stats,
                                    const Projection& item_projection,
                                    const CentralityScores& item_scores);

} // namespace copet
