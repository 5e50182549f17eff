#pragma once
// Independent reference computations used by the unit and acceptance tests.
// They deliberately avoid the library's inference code paths.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "chai/inference.hpp"

namespace oracle {

// ---- 2x2 signaling game, written out by hand --------------------------------

// lexicon index i: bit 0 = meaning of u1 (0 -> o1, 1 -> o2), bit 1 = meaning of u2
inline int meaning(int lex, int word) { return (lex >> word) & 1; }

// L0^eps(o | u) over {o1, o2, null}; the null referent is always true.
inline double l0(int lex, int word, int o, double eps) {
    const double truth = (o == 2 || meaning(lex, word) == o) ? 1.0 : 0.0;
    return eps / 3.0 + (1.0 - eps) * truth / 2.0;
}

// S1^eps(u | o) over {u1, u2} with no cost.
inline double s1(int lex, int word, int o, double alpha, double eps) {
    const double a = std::pow(l0(lex, 0, o, eps), alpha);
    const double b = std::pow(l0(lex, 1, o, eps), alpha);
    const double base = (word == 0 ? a : b) / (a + b);
    return eps / 2.0 + (1.0 - eps) * base;
}

struct PathDependence {
    std::vector<double> listener;  // posterior over the 4 lexicons
    std::vector<double> speaker;
};

// Uniform prior; one trial where the speaker said u1 for o1 and the listener chose o1.
inline PathDependence first_success(double alpha, double eps) {
    PathDependence out{std::vector<double>(4), std::vector<double>(4)};
    double zl = 0, zs = 0;
    for (int i = 0; i < 4; ++i) {
        out.listener[static_cast<std::size_t>(i)] = 0.25 * s1(i, 0, 0, alpha, eps);
        out.speaker[static_cast<std::size_t>(i)] = 0.25 * l0(i, 0, 0, eps);
        zl += out.listener[static_cast<std::size_t>(i)];
        zs += out.speaker[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < 4; ++i) {
        out.listener[static_cast<std::size_t>(i)] /= zl;
        out.speaker[static_cast<std::size_t>(i)] /= zs;
    }
    return out;
}

// P(word -> o1) under a posterior over the 4 hand-indexed lexicons.
inline double prob_word_o1(const std::vector<double>& post, int word) {
    double s = 0;
    for (int i = 0; i < 4; ++i)
        if (meaning(i, word) == 0) s += post[static_cast<std::size_t>(i)];
    return s;
}

// ---- hierarchical model by full-joint enumeration ---------------------------

struct HierFixture {
    std::string name;
    chai::HierarchicalDM prior;
    int leaves = 2;
    int words = 2;
    std::map<int, std::vector<double>> loglik;  // per partner, indexed like the space
};

struct HierExact {
    std::map<int, std::vector<double>> partners;
    std::vector<double> stranger;  // empty unless requested
};

// Leaf of primitive p in lexicon i, for spaces enumerated over leaf assignments.
inline int leaf_of(const chai::LexiconSpace& space, std::size_t i, int p) {
    return space.lexicon(i).at(p).node_id();
}

// log of the Dirichlet-multinomial sequence probability via Gamma functions.
inline double dm_log(const std::vector<double>& alpha, double lambda, const std::vector<int>& counts) {
    double n = 0, out = std::lgamma(lambda);
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        out += std::lgamma(lambda * alpha[j] + counts[j]) - std::lgamma(lambda * alpha[j]);
        n += counts[j];
    }
    return out - std::lgamma(lambda + n);
}

// Marginalizes alpha on its grid for every primitive and sums over every joint
// assignment of partner lexicons. With `stranger`, an extra unobserved partner
// is enumerated too; its marginal is the predictive for a new partner.
inline HierExact exact_hierarchical(const HierFixture& f, const chai::LexiconSpace& space, bool stranger) {
    std::vector<int> ids;
    std::vector<const std::vector<double>*> lls;
    for (const auto& [k, ll] : f.loglik) {
        ids.push_back(k);
        lls.push_back(&ll);
    }
    const std::size_t n = space.size();
    const std::size_t slots = ids.size() + (stranger ? 1 : 0);
    std::vector<chai::AlphaGrid> grids;
    for (const auto& h : f.prior.hyper) grids.push_back(chai::make_alpha_grid(h, f.prior.grid));

    std::vector<std::vector<double>> marg(slots, std::vector<double>(n, 0.0));
    std::vector<std::size_t> pick(slots, 0);
    std::vector<double> logs;
    std::vector<std::vector<std::size_t>> combos;
    const auto total = static_cast<std::size_t>(std::pow(static_cast<double>(n), static_cast<double>(slots)));
    logs.reserve(total);
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t rest = c;
        for (std::size_t s = 0; s < slots; ++s) {
            pick[s] = rest % n;
            rest /= n;
        }
        double lw = 0;
        for (std::size_t s = 0; s < ids.size(); ++s) lw += (*lls[s])[pick[s]];
        for (int p = 0; p < f.words; ++p) {
            std::vector<int> counts(static_cast<std::size_t>(f.leaves), 0);
            for (std::size_t s = 0; s < slots; ++s) ++counts[static_cast<std::size_t>(leaf_of(space, pick[s], p))];
            const auto& g = grids[static_cast<std::size_t>(p)];
            double m = -INFINITY;
            std::vector<double> terms;
            for (std::size_t gi = 0; gi < g.points.size(); ++gi)
                terms.push_back(g.log_weights[gi] + dm_log(g.points[gi], f.prior.lambda, counts));
            for (double t : terms) m = std::max(m, t);
            double acc = 0;
            for (double t : terms) acc += std::exp(t - m);
            lw += m + std::log(acc);
        }
        logs.push_back(lw);
    }
    double m = -INFINITY;
    for (double l : logs) m = std::max(m, l);
    double z = 0;
    for (double& l : logs) {
        l = std::exp(l - m);
        z += l;
    }
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t rest = c;
        for (std::size_t s = 0; s < slots; ++s) {
            marg[s][rest % n] += logs[c] / z;
            rest /= n;
        }
    }
    HierExact out;
    for (std::size_t s = 0; s < ids.size(); ++s) out.partners[ids[s]] = marg[s];
    if (stranger) out.stranger = marg.back();
    return out;
}

inline std::shared_ptr<const chai::LexiconSpace> fixture_space(const HierFixture& f) {
    return std::make_shared<const chai::LexiconSpace>(
        chai::enumerate_space(f.prior, f.words, chai::Taxonomy::flat(f.leaves)));
}

// Decayed log-likelihoods of a partner who used word w for leaf w on each trial.
inline std::vector<double> convention_loglik(const chai::LexiconSpace& space, int leaves, int words, int trials,
                                             int shift, double beta) {
    const chai::Game game(chai::Taxonomy::flat(leaves), chai::Vocabulary::numbered(words),
                          chai::CandidateSet::singles);
    chai::SimParams params;
    params.alpha_s = params.alpha_l = 4.0;
    params.beta = beta;
    std::vector<double> acc(space.size(), 0.0);
    for (int t = 0; t < trials; ++t) {
        chai::Observation obs;
        const int target = t % leaves;
        obs.record.trial = t;
        obs.record.target = target;
        obs.record.utterance = chai::Utterance{(target + shift) % words};
        obs.record.response = target;
        obs.record.correct = true;
        obs.own_role = t % 2 == 0 ? chai::Role::listener : chai::Role::speaker;
        obs.context.real = chai::ReferentSet::first_n(leaves);
        chai::accumulate_decayed(acc, chai::trial_loglik_vector(space, obs, game, params), beta);
    }
    return acc;
}

// Three hand-built fixtures plus `random_count` random ones, all on spaces of
// at most 64 lexicons.
inline std::vector<HierFixture> gibbs_fixtures(int random_count = 20, std::uint64_t seed = 2024) {
    std::vector<HierFixture> out;
    {
        HierFixture f{"2x2, two partners agreeing", chai::HierarchicalDM{2.0, {{1, 1}, {1, 1}}, 21}, 2, 2, {}};
        const auto space = fixture_space(f);
        f.loglik[0] = convention_loglik(*space, 2, 2, 6, 0, 0.8);
        f.loglik[1] = convention_loglik(*space, 2, 2, 6, 0, 0.8);
        out.push_back(f);
    }
    {
        HierFixture f{"4 words x 2 leaves, biased hyper, three partners",
                      chai::HierarchicalDM{2.0, {{1, 1.5}, {1, 1.5}, {1.5, 1}, {1.5, 1}}, 21}, 2, 4, {}};
        const auto space = fixture_space(f);
        f.loglik[0] = convention_loglik(*space, 2, 4, 8, 0, 0.8);
        f.loglik[1] = convention_loglik(*space, 2, 4, 8, 2, 0.8);
        f.loglik[2] = convention_loglik(*space, 2, 4, 4, 0, 0.8);
        out.push_back(f);
    }
    {
        HierFixture f{"3x3, two partners disagreeing", chai::HierarchicalDM{3.0, {{1, 1, 1}, {2, 1, 1}, {1, 1, 2}}, 9},
                      3, 3, {}};
        const auto space = fixture_space(f);
        f.loglik[0] = convention_loglik(*space, 3, 3, 6, 0, 0.9);
        f.loglik[1] = convention_loglik(*space, 3, 3, 6, 1, 0.9);
        out.push_back(f);
    }
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::vector<std::pair<int, int>> shapes{{2, 2}, {2, 3}, {2, 4}, {2, 5}, {2, 6}, {3, 2}, {3, 3}, {4, 2}, {4, 3}, {8, 2}};
    for (int r = 0; r < random_count; ++r) {
        const auto [leaves, words] = shapes[static_cast<std::size_t>(gen() % shapes.size())];
        HierFixture f;
        f.name = "random " + std::to_string(r);
        f.leaves = leaves;
        f.words = words;
        f.prior.lambda = 0.5 + 4.0 * unit(gen);
        f.prior.grid = leaves == 2 ? 21 : (leaves == 3 ? 9 : 5);
        for (int p = 0; p < words; ++p) {
            std::vector<double> row;
            for (int j = 0; j < leaves; ++j) row.push_back(0.5 + 2.0 * unit(gen));
            f.prior.hyper.push_back(row);
        }
        const std::size_t n = static_cast<std::size_t>(std::pow(leaves, words));
        // keep the joint enumeration (with a stranger slot) tractable
        const int max_partners = n <= 9 ? 3 : (n <= 27 ? 2 : 1);
        const int partners = 1 + static_cast<int>(gen() % static_cast<std::uint64_t>(max_partners));
        for (int k = 0; k < partners; ++k) {
            std::vector<double> ll(n);
            const double scale = 4.0 * unit(gen);
            for (double& x : ll) x = -scale * unit(gen) * unit(gen) * 3.0;
            f.loglik[k * 3 + 1] = ll;
        }
        out.push_back(f);
    }
    return out;
}

}  // namespace oracle
