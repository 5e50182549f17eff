#include "chai/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "chai/stats.hpp"

namespace chai {

std::string_view to_string(SimId sim) {
    switch (sim) {
        case SimId::sim11: return "sim11";
        case SimId::sim12: return "sim12";
        case SimId::sim21: return "sim21";
        case SimId::sim31: return "sim31";
    }
    return "?";
}

std::string_view to_string(Condition condition) {
    switch (condition) {
        case Condition::none: return "none";
        case Condition::coarse: return "coarse";
        case Condition::fine: return "fine";
        case Condition::mixed: return "mixed";
    }
    return "?";
}

SimId sim_from_string(std::string_view name) {
    for (SimId s : {SimId::sim11, SimId::sim12, SimId::sim21, SimId::sim31})
        if (to_string(s) == name) return s;
    throw DomainError("unknown sim '" + std::string(name) + "'");
}

Condition condition_from_string(std::string_view name) {
    for (Condition c : {Condition::none, Condition::coarse, Condition::fine, Condition::mixed})
        if (to_string(c) == name) return c;
    throw DomainError("unknown condition '" + std::string(name) + "'");
}

std::string pair_label(int a, int b) {
    if (a > b) std::swap(a, b);
    return std::to_string(a) + "-" + std::to_string(b);
}

namespace {

constexpr int kDyadBlocks = 15;
constexpr int kNetworkBlocksPerPartner = 4;
constexpr int kTaxonomyBlocks = 6;
constexpr int kTaxonomyRepeats = 2;

std::vector<Referent> shuffled_leaves(const Taxonomy& tax, int repeats, Rng& rng) {
    std::vector<Referent> out;
    for (int r = 0; r < repeats; ++r)
        for (int o = 0; o < tax.leaf_count(); ++o) out.push_back(o);
    rng.shuffle(std::span<Referent>(out));
    return out;
}

Schedule dyad_schedule(SimId sim, const Taxonomy& tax, Rng& rng) {
    if (tax.leaf_count() < 2) throw DomainError("dyadic games need at least two objects");
    Schedule s{sim, Condition::none, 2, 0, {}};
    int t = 0;
    for (int b = 0; b < kDyadBlocks; ++b) {
        for (Referent o : shuffled_leaves(tax, 1, rng)) {
            TrialSpec ts;
            ts.trial = t++;
            ts.block = b;
            ts.speaker = b % 2;
            ts.listener = 1 - b % 2;
            ts.target = o;
            ts.context.real = tax.universe();
            s.trials.push_back(ts);
        }
    }
    s.trials_per_round = t;
    return s;
}

Schedule network_schedule(const Taxonomy& tax, Rng& rng) {
    if (tax.leaf_count() < 2) throw DomainError("network games need at least two objects");
    static const int kRounds[3][2][2] = {{{0, 1}, {2, 3}}, {{0, 2}, {1, 3}}, {{0, 3}, {1, 2}}};
    const int per_round = kNetworkBlocksPerPartner * tax.leaf_count();
    Schedule s{SimId::sim21, Condition::none, 4, per_round, {}};
    for (int r = 0; r < 3; ++r) {
        std::vector<TrialSpec> pair_trials[2];
        for (int k = 0; k < 2; ++k) {
            int first = kRounds[r][k][0], second = kRounds[r][k][1];
            if (rng.coin()) std::swap(first, second);
            int t = r * per_round;
            for (int b = 0; b < kNetworkBlocksPerPartner; ++b) {
                for (Referent o : shuffled_leaves(tax, 1, rng)) {
                    TrialSpec ts;
                    ts.trial = t;
                    ts.block = t / tax.leaf_count();
                    ts.round = r;
                    ts.speaker = b % 2 == 0 ? first : second;
                    ts.listener = b % 2 == 0 ? second : first;
                    ts.target = o;
                    ts.context.real = tax.universe();
                    pair_trials[k].push_back(ts);
                    ++t;
                }
            }
        }
        for (std::size_t i = 0; i < pair_trials[0].size(); ++i) {
            s.trials.push_back(pair_trials[0][i]);
            s.trials.push_back(pair_trials[1][i]);
        }
    }
    return s;
}

Schedule taxonomy_schedule(Condition condition, const Taxonomy& tax, Rng& rng) {
    Schedule s{SimId::sim31, condition, 2, 0, {}};
    int t = 0;
    for (int b = 0; b < kTaxonomyBlocks; ++b) {
        for (Referent o : shuffled_leaves(tax, kTaxonomyRepeats, rng)) {
            bool fine = condition == Condition::fine;
            if (condition == Condition::mixed) fine = rng.coin();
            const NodeId parent = tax.parent(o);
            std::vector<Referent> pool;
            for (Referent d = 0; d < tax.leaf_count(); ++d) {
                if (d == o) continue;
                const bool sibling = parent >= 0 && tax.parent(d) == parent;
                if (sibling == fine) pool.push_back(d);
            }
            if (pool.empty()) throw DomainError("taxonomy offers no distractor of the requested kind");
            const Referent distractor = pool[static_cast<std::size_t>(rng.below(static_cast<int>(pool.size())))];
            TrialSpec ts;
            ts.trial = t;
            ts.block = b;
            ts.speaker = t % 2;
            ts.listener = 1 - t % 2;
            ts.target = o;
            ts.context.real = ReferentSet{o, distractor};
            ts.fine_context = fine;
            s.trials.push_back(ts);
            ++t;
        }
    }
    s.trials_per_round = t;
    return s;
}

}  // namespace

Schedule build_schedule(SimId sim, Condition condition, const Taxonomy& tax, Rng& rng) {
    if ((sim == SimId::sim31) != (condition != Condition::none))
        throw DomainError("a context condition is required for sim31 and only for sim31");
    switch (sim) {
        case SimId::sim11:
        case SimId::sim12: return dyad_schedule(sim, tax, rng);
        case SimId::sim21: return network_schedule(tax, rng);
        case SimId::sim31: return taxonomy_schedule(condition, tax, rng);
    }
    throw DomainError("bad sim id");
}

void ExperimentSpec::validate() const {
    params.validate();
    if ((sim == SimId::sim31) != (condition != Condition::none))
        throw DomainError("condition: required for sim31 and only for sim31");
    if (domain.vocabulary.size() < 1) throw DomainError("domain: vocabulary is empty");
    validate_prior(prior, domain.vocabulary.size(), domain.taxonomy);
    if (pooling == Pooling::partial && !std::holds_alternative<HierarchicalDM>(prior))
        throw DomainError("pooling: partial pooling needs a hierarchical prior");
    if (!(gibbs.sweeps > gibbs.burn_in && gibbs.burn_in >= 0))
        throw DomainError("gibbs: sweeps must exceed burn-in >= 0");
    if (sim == SimId::sim31 && domain.taxonomy.nodes_at(Level::basic).size() < 2)
        throw DomainError("domain: sim31 needs at least two basic-level nodes");
}

ExperimentSpec default_spec(SimId sim, Condition condition, Pooling pooling) {
    ExperimentSpec s;
    s.sim = sim;
    s.pooling = pooling;
    s.condition = condition;
    switch (sim) {
        case SimId::sim11:
            s.prior = BiasedCategorical{{{0.5, 0.5}, {0.5, 0.5}}};
            break;
        case SimId::sim12:
            s.domain = {Taxonomy::flat(2), Vocabulary::numbered(4)};
            s.params.w_c = 0.24;
            s.params.candidates = CandidateSet::singles_and_pairs;
            s.prior = BiasedCategorical{{{0.55, 0.45}, {0.55, 0.45}, {0.45, 0.55}, {0.45, 0.55}}};
            break;
        case SimId::sim21:
            s.domain = {Taxonomy::flat(2), Vocabulary::numbered(4)};
            s.params.alpha_s = s.params.alpha_l = 4.0;
            s.params.w_c = 0.24;
            s.params.candidates = CandidateSet::singles_and_pairs;
            s.prior = HierarchicalDM{2.0, {{1.0, 1.5}, {1.0, 1.5}, {1.5, 1.0}, {1.5, 1.0}}, 21};
            break;
        case SimId::sim31:
            if (condition == Condition::none) s.condition = Condition::coarse;
            s.domain = {Taxonomy::single_branch(), Vocabulary::numbered(8)};
            s.prior = TaxonomyPartition{};
            break;
    }
    return s;
}

Experiment::Experiment(ExperimentSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    game_ = std::make_shared<Game>(spec_.domain.taxonomy, spec_.domain.vocabulary, spec_.params.candidates);
    space_ = std::make_shared<LexiconSpace>(
        enumerate_space(spec_.prior, spec_.domain.vocabulary.size(), spec_.domain.taxonomy));
}

namespace {

std::uint64_t seed_for(std::uint64_t master, int traj, int agent, int trial, StreamPurpose purpose) {
    return stream_seed(master, {static_cast<std::uint64_t>(traj), static_cast<std::uint64_t>(agent),
                                static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(purpose)});
}

}  // namespace

TrajectoryResult Experiment::run_trajectory(int trajectory, std::uint64_t master_seed) const {
    Rng sched_rng(seed_for(master_seed, trajectory, 0, 0, StreamPurpose::schedule));
    const Schedule schedule = build_schedule(spec_.sim, spec_.condition, spec_.domain.taxonomy, sched_rng);

    AgentConfig cfg{spec_.params, spec_.prior, spec_.pooling, spec_.gibbs};
    std::vector<Agent> agents;
    for (int a = 0; a < schedule.agent_count; ++a) agents.emplace_back(a, cfg, game_, space_);

    const bool track_long = spec_.params.candidates == CandidateSet::singles_and_pairs;
    const int nodes = spec_.domain.taxonomy.node_count();
    TrajectoryResult out;
    for (const TrialSpec& ts : schedule.trials) {
        Agent& sp = agents[static_cast<std::size_t>(ts.speaker)];
        Agent& li = agents[static_cast<std::size_t>(ts.listener)];
        const auto long_prob = [&](int self, int partner) {
            const Agent& a = agents[static_cast<std::size_t>(self)];
            double p = 0.0;
            const auto objs = ts.context.real.members();
            for (Referent o : objs) p += a.long_utterance_prob(o, ts.context, partner);
            return p / static_cast<double>(objs.size());
        };
        const std::size_t first_snapshot = out.speaker.size();
        if (track_long) {
            for (const auto& [self, partner] : {std::pair{ts.speaker, ts.listener}, std::pair{ts.listener, ts.speaker}})
                out.speaker.push_back({trajectory, ts.trial, ts.round, self, partner, long_prob(self, partner), 0.0});
        }

        Rng srng(seed_for(master_seed, trajectory, ts.speaker, ts.trial, StreamPurpose::speak));
        const Utterance u = sp.speak(ts.target, ts.context, ts.listener, srng);
        Rng lrng(seed_for(master_seed, trajectory, ts.listener, ts.trial, StreamPurpose::listen));
        const Referent response = li.listen(u, ts.context, ts.speaker, lrng);

        TrialRecord rec;
        rec.trajectory = trajectory;
        rec.partner_pair = pair_label(ts.speaker, ts.listener);
        rec.speaker = ts.speaker;
        rec.listener = ts.listener;
        rec.trial = ts.trial;
        rec.block = ts.block;
        rec.target = ts.target;
        rec.utterance = u;
        rec.response = response;
        rec.correct = response == ts.target;

        sp.observe(rec, ts.context, ts.listener, Role::speaker,
                   seed_for(master_seed, trajectory, ts.speaker, ts.trial, StreamPurpose::inference));
        li.observe(rec, ts.context, ts.speaker, Role::listener,
                   seed_for(master_seed, trajectory, ts.listener, ts.trial, StreamPurpose::inference));
        out.records.push_back(rec);
        for (std::size_t i = first_snapshot; i < out.speaker.size(); ++i)
            out.speaker[i].long_prob_after = long_prob(out.speaker[i].agent, out.speaker[i].partner);

        for (const auto& [self, partner] : {std::pair{ts.speaker, ts.listener}, std::pair{ts.listener, ts.speaker}}) {
            const Agent& a = agents[static_cast<std::size_t>(self)];
            out.beliefs.push_back({trajectory, ts.trial, self, partner, meaning_marginals(a.beliefs_about(partner), nodes)});
        }
    }
    return out;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CHAI_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

BatchResult Experiment::run_batch(int n, std::uint64_t master_seed, int threads) const {
    if (n < 1) throw DomainError("trajectory count must be >= 1");
    BatchResult out{spec_, master_seed, std::vector<TrajectoryResult>(static_cast<std::size_t>(n))};
    const int workers = std::min(resolve_threads(threads), n);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (int i = next++; i < n && !failed; i = next++) {
            try {
                out.trajectories[static_cast<std::size_t>(i)] = run_trajectory(i, master_seed);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::vector<SweepRow> sweep_grid(const std::vector<ExperimentSpec>& bases, const SweepAxes& axes, int n,
                                 std::uint64_t master_seed, int threads) {
    if (axes.alpha.empty() || axes.beta.empty() || axes.w_c.empty())
        throw DomainError("every sweep axis needs at least one value");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<SweepRow> rows;
    std::vector<std::optional<PriorSpec>> priors;
    if (axes.priors.empty()) priors.push_back(std::nullopt);
    for (const auto& p : axes.priors) priors.emplace_back(p);

    for (double a : axes.alpha)
        for (double b : axes.beta)
            for (double w : axes.w_c)
                for (const auto& prior : priors)
                    for (const ExperimentSpec& base : bases) {
                        ExperimentSpec spec = base;
                        spec.params.alpha_s = spec.params.alpha_l = a;
                        spec.params.beta = b;
                        spec.params.w_c = w;
                        std::string prefix;
                        if (prior) {
                            spec.prior = *prior;
                            prefix = prior_name(*prior) + ".";
                        }
                        prefix += std::string(to_string(spec.pooling)) + ".";
                        const BatchResult batch = Experiment(spec).run_batch(n, master_seed, threads);

                        if (spec.sim == SimId::sim21) {
                            std::vector<double> rev, gen;
                            for (const auto& tr : batch.trajectories) {
                                const int per_round = kNetworkBlocksPerPartner * spec.domain.taxonomy.leaf_count();
                                const SwapStats s = swap_stats(tr.speaker, per_round);
                                rev.push_back(s.reversion);
                                gen.push_back(s.generalization);
                            }
                            for (const auto& [name, vals] : {std::pair{"reversion", &rev}, std::pair{"generalization", &gen}}) {
                                const TTest tt = one_sample_t(*vals);
                                rows.push_back({a, b, w, prefix + name, mean(*vals), tt.degenerate ? nan : tt.t,
                                                tt.degenerate ? nan : tt.p});
                            }
                        } else {
                            std::vector<TrialRecord> all;
                            for (const auto& tr : batch.trajectories) all.insert(all.end(), tr.records.begin(), tr.records.end());
                            const auto blocks = block_metrics(all);
                            rows.push_back({a, b, w, prefix + "first_accuracy", blocks.front().accuracy, nan, nan});
                            rows.push_back({a, b, w, prefix + "final_accuracy", blocks.back().accuracy, nan, nan});
                            rows.push_back({a, b, w, prefix + "first_length", blocks.front().length, nan, nan});
                            rows.push_back({a, b, w, prefix + "final_length", blocks.back().length, nan, nan});
                            rows.push_back({a, b, w, prefix + "final_vocabulary", blocks.back().vocabulary, nan, nan});
                        }
                    }
    return rows;
}

}  // namespace chai
