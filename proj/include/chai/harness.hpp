#pragma once
// Trial schedules, trajectory execution and batches for the four
// simulations: dyadic conventions (sim11), reduction (sim12), partner
// networks (sim21) and context-sensitive lexicons (sim31).

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chai/agent.hpp"

namespace chai {

enum class SimId { sim11, sim12, sim21, sim31 };
enum class Condition { none, coarse, fine, mixed };

std::string_view to_string(SimId sim);
std::string_view to_string(Condition condition);
SimId sim_from_string(std::string_view name);
Condition condition_from_string(std::string_view name);

struct TrialSpec {
    int trial = 0;  // per-agent trial index; in sim21 both pairs share it
    int block = 0;
    int round = 0;  // partner round; always 0 for dyads
    int speaker = 0;
    int listener = 1;
    Referent target = 0;
    Context context;
    bool fine_context = false;  // distractor is a sibling of the target
};

struct Schedule {
    SimId sim = SimId::sim11;
    Condition condition = Condition::none;
    int agent_count = 2;
    int trials_per_round = 0;
    std::vector<TrialSpec> trials;  // ordered by trial, then pair
};

// Condition must be none except for sim31, where it must not be.
Schedule build_schedule(SimId sim, Condition condition, const Taxonomy& tax, Rng& rng);

// "a-b" with the smaller id first.
std::string pair_label(int a, int b);

// Everything needed to run one simulation under one pooling model.
struct ExperimentSpec {
    SimId sim = SimId::sim11;
    Condition condition = Condition::none;
    Pooling pooling = Pooling::complete;
    SimParams params;
    PriorSpec prior;
    GibbsOptions gibbs;
    DomainSpec domain{Taxonomy::flat(2), Vocabulary::numbered(2)};

    void validate() const;
};

// Headline settings for each simulation.
ExperimentSpec default_spec(SimId sim, Condition condition = Condition::none, Pooling pooling = Pooling::complete);

struct BeliefSnapshot {
    int trajectory = 0;
    int trial = 0;
    int agent = 0;
    int partner = 0;
    std::vector<std::vector<double>> marginals;  // [primitive][node..., Empty]
};

// Probability of producing a two-word utterance toward the current partner,
// averaged over the context's objects, before and after the trial.
struct SpeakerSnapshot {
    int trajectory = 0;
    int trial = 0;
    int round = 0;
    int agent = 0;
    int partner = 0;
    double long_prob = 0.0;        // before the trial
    double long_prob_after = 0.0;  // toward the same partner, after observing the trial
};

struct TrajectoryResult {
    std::vector<TrialRecord> records;
    std::vector<BeliefSnapshot> beliefs;
    std::vector<SpeakerSnapshot> speaker;
};

struct BatchResult {
    ExperimentSpec spec;
    std::uint64_t seed = 0;
    std::vector<TrajectoryResult> trajectories;
};

class Experiment {
public:
    explicit Experiment(ExperimentSpec spec);

    const ExperimentSpec& spec() const { return spec_; }
    const Game& game() const { return *game_; }
    std::shared_ptr<const LexiconSpace> space() const { return space_; }

    TrajectoryResult run_trajectory(int trajectory, std::uint64_t master_seed) const;

    // Trajectories 0..n-1 spread over `threads` workers (0 = CHAI_THREADS or
    // hardware concurrency). Results are identical for any worker count.
    BatchResult run_batch(int n, std::uint64_t master_seed, int threads = 0) const;

private:
    ExperimentSpec spec_;
    std::shared_ptr<const Game> game_;
    std::shared_ptr<const LexiconSpace> space_;
};

// Worker count from CHAI_THREADS (0 or unset = hardware concurrency).
int resolve_threads(int requested);

struct SweepAxes {
    std::vector<double> alpha{1, 2, 4, 8, 16};
    std::vector<double> beta{0.5, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> w_c{0, 0.12, 0.24, 0.48};
    std::vector<PriorSpec> priors;  // empty = keep each base spec's prior
};

struct SweepRow {
    double alpha = 0, beta = 0, w_c = 0;
    std::string metric;
    double mean = 0, t = 0, p = 0;  // t and p are NaN where no test applies
};

// Runs every cell of the grid for each base spec (one per pooling model).
// alpha sets both speaker and listener optimality.
std::vector<SweepRow> sweep_grid(const std::vector<ExperimentSpec>& bases, const SweepAxes& axes, int n,
                                 std::uint64_t master_seed, int threads = 0);

}  // namespace chai
