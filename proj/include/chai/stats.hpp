#pragma once
// Metrics over simulated records: accuracy/length/vocabulary curves, MAP
// meaning levels, alignment, partner-swap statistics, t-tests and bootstrap
// intervals.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chai/harness.hpp"

namespace chai {

struct BlockSummary {
    int block = 0;
    double accuracy = 0;
    double length = 0;
    double vocabulary = 0;  // distinct primitives per (trajectory, pair, block), averaged
    int trials = 0;
};

// One entry per block present in `records`, in block order.
std::vector<BlockSummary> block_metrics(std::span<const TrialRecord> records);

// Highest-probability meaning of one primitive; ties go to the smaller
// extension, then the lower node id. `marginal` is [node..., Empty].
Meaning map_meaning(std::span<const double> marginal, const Taxonomy& tax);

// Proportions of primitives whose MAP meaning is subordinate, basic,
// superordinate or empty.
struct LevelShares {
    double subordinate = 0, basic = 0, superordinate = 0, empty = 0;
};
LevelShares map_levels(const std::vector<std::vector<double>>& marginals, const Taxonomy& tax);

// Per-round alignment for one network trajectory.
struct AlignmentRound {
    int round = 0;
    double within = 0;  // NaN when no currently-paired agents share a target
    double across = 0;  // NaN when no other agent pairs share a target
};
std::vector<AlignmentRound> alignment(std::span<const TrialRecord> records, int trials_per_round);

// 1 iff the two utterances share a primitive.
double utterance_overlap(const Utterance& a, const Utterance& b);

struct SwapStats {
    double reversion = 0;           // P(first trial, round 2) - P(after last trial, round 1)
    double generalization = 0;      // P(first trial, round 1) - P(first trial, round 3)
    double reversion_pretrial = 0;  // P(first trial, round 2) - P(before last trial, round 1)
};

// Averaged over the network's agents. Throws DomainError when a required
// trial is missing.
SwapStats swap_stats(std::span<const SpeakerSnapshot> snapshots, int trials_per_round);

struct TTest {
    double t = 0;
    double p = 1;
    int n = 0;
    bool degenerate = false;  // zero variance: t and p undefined
};

// Two-sided one-sample t-test against zero.
TTest one_sample_t(std::span<const double> values);

double mean(std::span<const double> values);

// Percentile interval of `statistic` over `reps` resamples.
std::pair<double, double> bootstrap_ci(std::span<const double> values,
                                       const std::function<double(std::span<const double>)>& statistic,
                                       int reps = 1000, double level = 0.95, std::uint64_t seed = 0);

struct SummaryRow {
    std::string sim, condition, model;
    int block = 0;  // block, trial or round index depending on the metric
    std::string metric;
    double value = 0, ci_lo = 0, ci_hi = 0;  // NaN bounds where no interval applies
};

// Metrics, in deterministic order:
//   accuracy, length, vocabulary      per block
//   map_<level>                       per trial (sim31; final snapshots of each agent)
//   long_prob                         per trial (candidate sets with pairs)
//   align_within, align_across        per round (sim21)
//   reversion, generalization,
//   reversion_pretrial                block -1, with *_t and *_p companions (sim21)
std::vector<SummaryRow> summarize_batch(const BatchResult& batch, int bootstrap_reps = 1000,
                                        std::uint64_t seed = 0);

// Finds a row; nullopt when absent.
std::optional<SummaryRow> find_row(std::span<const SummaryRow> rows, std::string_view metric, int block);

}  // namespace chai
