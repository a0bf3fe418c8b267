#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "copet/records.hpp"

namespace copet {

// Planted-structure generator spec; the verification oracle for the rest of
// the pipeline. Requires 0 <= p_out < p_in <= 1, communities >= 1,
// signature_sigma >= 0.
struct PlantedSpec {
    std::uint32_t communities = 4;
    std::uint32_t actors_per_community = 100;
    std::uint32_t items_per_community = 50;
    double p_in = 0.3;  // within-community tweet probability
    double p_out = 0.01;

    // ln(1+signatures) = alpha + beta*ln(1+tweets) + N(0, sigma)
    double signature_alpha = 4.0;
    double signature_beta = 1.13;
    double signature_sigma = 0.1;

    // Two-component lognormal delay mixture (seconds).
    double delay_fast_weight = 0.5;
    double delay_fast_median = 300.0; // ~minutes
    double delay_fast_sigma = 0.7;
    double delay_slow_median = 5.0e6; // ~months
    double delay_slow_sigma = 0.7;

    // Follower counts are lognormal to exercise audience metrics with
    // realistic skew.
    double follower_log_mean = 4.0;
    double follower_log_sigma = 1.5;
    double verified_prob = 0.005;
    double repeat_prob = 0.0; // chance of one extra tweet per (actor,item)

    std::uint32_t departments = 5;
    std::uint32_t bio_tokens = 8;
    std::vector<std::vector<std::string>> bio_vocab; // per community; autogenerated if empty

    std::int64_t item_time_start = 1372636800; // 2013-07-01
    std::int64_t item_time_span = 52000000;    // ~20 months

    std::uint64_t seed = 1;
};

struct GroundTruth {
    std::vector<std::uint32_t> actor_community; // by actor index
    std::vector<std::uint32_t> item_community;  // by item index
    std::vector<std::uint8_t> delay_component;  // per share: 0 fast, 1 slow
    double alpha = 0.0, beta = 0.0, sigma = 0.0;
    double p_in = 0.0, p_out = 0.0;
};

struct SynthResult {
    Dataset dataset; // already joined
    GroundTruth truth;
};

// Deterministic per seed: identical spec+seed reproduce a byte-identical
// dataset. Throws std::invalid_argument on invariant violations.
SynthResult generate(const PlantedSpec& spec);

// Writes shares.jsonl, items.csv, ground_truth.json in the ingest formats.
void write_synth(const SynthResult& result, const std::string& dir);

// Adjusted Rand index via the contingency-table formula; degenerate
// agreement (both sides constant) is 1.
double ari(std::span<const std::uint32_t> labels_a, std::span<const std::uint32_t> labels_b);

} // namespace copet
