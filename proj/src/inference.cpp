#include "chai/inference.hpp"

#include <cmath>

#include "chai/numeric.hpp"
#include "chai/random.hpp"

namespace chai {

void ObservationLog::append(int partner, Observation obs) {
    auto& s = by_partner_[partner];
    if (!s.empty() && s.back().record.trial >= obs.record.trial)
        throw DomainError("trial indices must increase within a partner's stream");
    s.push_back(obs);
    merged_.push_back(std::move(obs));
}

const std::vector<Observation>& ObservationLog::stream(int partner) const {
    static const std::vector<Observation> kEmpty;
    auto it = by_partner_.find(partner);
    return it == by_partner_.end() ? kEmpty : it->second;
}

std::vector<int> ObservationLog::partners() const {
    std::vector<int> out;
    for (const auto& [k, _] : by_partner_) out.push_back(k);
    return out;
}

double trial_loglik(const Lexicon& lex, const Observation& obs, const Game& game, const SimParams& params) {
    const TrialRecord& r = obs.record;
    if (obs.own_role == Role::listener) {
        const auto ci = game.candidate_index(r.utterance);
        if (!ci) throw DomainError("observed utterance is not a candidate");
        std::vector<double> logs(game.candidates().size());
        speaker_log_probs(lex, r.target, obs.context, game, params, logs);
        return logs[static_cast<std::size_t>(*ci)];
    }
    return std::log(literal_prob(denote(lex, r.utterance, game), obs.context, r.response, params.epsilon));
}

std::vector<double> trial_loglik_vector(const LexiconSpace& space, const Observation& obs, const Game& game,
                                        const SimParams& params) {
    std::vector<double> out(space.size());
    for (std::size_t i = 0; i < space.size(); ++i) out[i] = trial_loglik(space.lexicon(i), obs, game, params);
    return out;
}

double decayed_loglik(const Lexicon& lex, std::span<const Observation> stream, const Game& game,
                      const SimParams& params) {
    double total = 0.0;
    const std::size_t n = stream.size();
    for (std::size_t t = 0; t < n; ++t) {
        const double lag = static_cast<double>(n - 1 - t);
        total += std::pow(params.beta, lag) * trial_loglik(lex, stream[t], game, params);
    }
    return total;
}

void accumulate_decayed(std::vector<double>& acc, std::span<const double> trial_ll, double beta) {
    if (acc.empty()) acc.assign(trial_ll.size(), 0.0);
    if (acc.size() != trial_ll.size()) throw DomainError("log-likelihood vectors differ in length");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = beta * acc[i] + trial_ll[i];
}

FlatPosterior flat_posterior(std::shared_ptr<const LexiconSpace> space, std::span<const double> loglik) {
    if (!space) throw DomainError("posterior needs a lexicon space");
    const auto lp = space->log_prior();
    std::vector<double> w(lp.begin(), lp.end());
    if (!loglik.empty()) {
        if (loglik.size() != w.size()) throw DomainError("log-likelihood does not match the space");
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += loglik[i];
    }
    return {std::move(space), normalize_log(w)};
}

FlatPosterior exact_posterior(std::shared_ptr<const LexiconSpace> space, std::span<const Observation> stream,
                              const Game& game, const SimParams& params, std::size_t cap) {
    if (!space) throw DomainError("posterior needs a lexicon space");
    if (space->size() > cap)
        throw SpaceTooLarge("lexicon space of " + std::to_string(space->size()) + " exceeds the enumeration cap");
    std::vector<double> ll(space->size(), 0.0);
    for (std::size_t i = 0; i < ll.size(); ++i) ll[i] = decayed_loglik(space->lexicon(i), stream, game, params);
    return flat_posterior(std::move(space), ll);
}

HierarchicalPosterior gibbs_posterior(const HierarchicalDM& prior, std::shared_ptr<const LexiconSpace> space,
                                      const ObservationLog& log, const Game& game, const SimParams& params,
                                      const GibbsOptions& options, std::uint64_t seed) {
    if (!space) throw DomainError("posterior needs a lexicon space");
    std::map<int, std::vector<double>> ll;
    for (int k : log.partners()) {
        auto& v = ll[k];
        v.resize(space->size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = decayed_loglik(space->lexicon(i), log.stream(k), game, params);
    }
    return gibbs_from_loglik(prior, std::move(space), ll, options, seed);
}

namespace {

// Index arithmetic for the sampler's lookup tables.
struct Tables {
    int P, L, K;
    std::vector<int> grid_size;                        // per primitive
    std::vector<std::vector<double>> grid_logw;        // [p][g]
    std::vector<std::vector<double>> lam_alpha;        // [p][g*L + j]
    std::vector<std::vector<double>> logterm;          // [p][(g*L + j)*K + c], c < K
    std::vector<std::vector<double>> cumlog;           // [p][(g*L + j)*(K+1) + n]
};

Tables build_tables(const HierarchicalDM& prior, int P, int L, int K) {
    Tables t{P, L, K, {}, {}, {}, {}, {}};
    for (int p = 0; p < P; ++p) {
        const AlphaGrid grid = make_alpha_grid(prior.hyper[static_cast<std::size_t>(p)], prior.grid);
        const int G = static_cast<int>(grid.points.size());
        t.grid_size.push_back(G);
        t.grid_logw.push_back(grid.log_weights);
        std::vector<double> la(static_cast<std::size_t>(G * L)), lt(static_cast<std::size_t>(G * L * K)),
            cl(static_cast<std::size_t>(G * L * (K + 1)));
        for (int g = 0; g < G; ++g) {
            for (int j = 0; j < L; ++j) {
                const double a = prior.lambda * grid.points[static_cast<std::size_t>(g)][static_cast<std::size_t>(j)];
                const int gj = g * L + j;
                la[static_cast<std::size_t>(gj)] = a;
                double run = 0.0;
                for (int c = 0; c <= K; ++c) {
                    cl[static_cast<std::size_t>(gj * (K + 1) + c)] = run;
                    if (c < K) {
                        lt[static_cast<std::size_t>(gj * K + c)] = std::log(a + c);
                        run += std::log(a + c);
                    }
                }
            }
        }
        t.lam_alpha.push_back(std::move(la));
        t.logterm.push_back(std::move(lt));
        t.cumlog.push_back(std::move(cl));
    }
    return t;
}

// Normalizes log weights in place into probabilities.
void to_probs(std::vector<double>& lw) { softmax_inplace(lw); }

}  // namespace

HierarchicalPosterior gibbs_from_loglik(const HierarchicalDM& prior, std::shared_ptr<const LexiconSpace> space,
                                        const std::map<int, std::vector<double>>& partner_loglik,
                                        const GibbsOptions& options, std::uint64_t seed) {
    if (!space) throw DomainError("posterior needs a lexicon space");
    if (!(options.sweeps > options.burn_in && options.burn_in >= 0))
        throw DomainError("gibbs sweeps must exceed burn-in, and burn-in must be >= 0");
    const int P = space->primitive_count();
    if (static_cast<int>(prior.hyper.size()) != P) throw DomainError("hyper-prior rows must match the primitives");
    const int L = static_cast<int>(prior.hyper.front().size());
    const std::size_t N = space->size();
    if (static_cast<double>(N) != std::pow(static_cast<double>(L), P))
        throw DomainError("gibbs needs the full leaf-assignment space");

    std::vector<int> leaf(N * static_cast<std::size_t>(P));
    for (std::size_t i = 0; i < N; ++i)
        for (int p = 0; p < P; ++p) {
            const Meaning m = space->lexicon(i)[p];
            if (m.is_empty() || m.node_id() >= L) throw DomainError("gibbs lexicons must map every word to a leaf");
            leaf[i * static_cast<std::size_t>(P) + static_cast<std::size_t>(p)] = m.node_id();
        }

    std::vector<int> ids;
    std::vector<const std::vector<double>*> lls;
    for (const auto& [k, v] : partner_loglik) {
        if (v.size() != N) throw DomainError("partner log-likelihood does not match the space");
        ids.push_back(k);
        lls.push_back(&v);
    }
    const int K = static_cast<int>(ids.size());
    const int R = options.sweeps - options.burn_in;

    HierarchicalPosterior out;
    out.space = space;
    out.retained_sweeps = R;
    if (K == 0) {
        out.stranger = space->prior_probs();
        for (int p = 0; p < P; ++p) {
            const AlphaGrid grid = make_alpha_grid(prior.hyper[static_cast<std::size_t>(p)], prior.grid);
            out.alpha_weights.push_back(normalize_log(grid.log_weights));
        }
        return out;
    }

    const Tables tab = build_tables(prior, P, L, K);
    Rng rng(seed);
    auto at = [&](std::size_t lex, int p) { return leaf[lex * static_cast<std::size_t>(P) + static_cast<std::size_t>(p)]; };

    std::vector<int> g(static_cast<std::size_t>(P));
    for (int p = 0; p < P; ++p) {
        auto w = normalize_log(tab.grid_logw[static_cast<std::size_t>(p)]);
        g[static_cast<std::size_t>(p)] = static_cast<int>(rng.categorical(w));
    }
    std::vector<std::size_t> phi(static_cast<std::size_t>(K));
    std::vector<int> cnt(static_cast<std::size_t>(P * L), 0);
    const auto lp = space->log_prior();
    std::vector<double> lw(N);
    for (int k = 0; k < K; ++k) {
        for (std::size_t i = 0; i < N; ++i) lw[i] = lp[i] + (*lls[static_cast<std::size_t>(k)])[i];
        to_probs(lw);
        phi[static_cast<std::size_t>(k)] = rng.categorical(lw);
        for (int p = 0; p < P; ++p) ++cnt[static_cast<std::size_t>(p * L + at(phi[static_cast<std::size_t>(k)], p))];
    }

    std::vector<std::vector<double>> acc_partner(static_cast<std::size_t>(K), std::vector<double>(N, 0.0));
    std::vector<std::vector<double>> acc_alpha(static_cast<std::size_t>(P));
    for (int p = 0; p < P; ++p) acc_alpha[static_cast<std::size_t>(p)].assign(static_cast<std::size_t>(tab.grid_size[static_cast<std::size_t>(p)]), 0.0);
    std::vector<double> acc_stranger(N, 0.0);
    std::vector<double> t(static_cast<std::size_t>(P * L)), pred(static_cast<std::size_t>(P * L)), gw;

    for (int s = 0; s < options.sweeps; ++s) {
        const bool keep = s >= options.burn_in;
        for (int k = 0; k < K; ++k) {
            const std::size_t cur = phi[static_cast<std::size_t>(k)];
            for (int p = 0; p < P; ++p) --cnt[static_cast<std::size_t>(p * L + at(cur, p))];
            for (int p = 0; p < P; ++p) {
                const auto& lt = tab.logterm[static_cast<std::size_t>(p)];
                const int gp = g[static_cast<std::size_t>(p)];
                for (int j = 0; j < L; ++j)
                    t[static_cast<std::size_t>(p * L + j)] =
                        lt[static_cast<std::size_t>((gp * L + j) * K + cnt[static_cast<std::size_t>(p * L + j)])];
            }
            const auto& ll = *lls[static_cast<std::size_t>(k)];
            for (std::size_t i = 0; i < N; ++i) {
                double v = ll[i];
                for (int p = 0; p < P; ++p) v += t[static_cast<std::size_t>(p * L + at(i, p))];
                lw[i] = v;
            }
            to_probs(lw);
            const std::size_t next = rng.categorical(lw);
            phi[static_cast<std::size_t>(k)] = next;
            for (int p = 0; p < P; ++p) ++cnt[static_cast<std::size_t>(p * L + at(next, p))];
            if (keep) {
                auto& a = acc_partner[static_cast<std::size_t>(k)];
                for (std::size_t i = 0; i < N; ++i) a[i] += lw[i];
            }
        }
        for (int p = 0; p < P; ++p) {
            const int G = tab.grid_size[static_cast<std::size_t>(p)];
            const auto& cl = tab.cumlog[static_cast<std::size_t>(p)];
            gw.assign(tab.grid_logw[static_cast<std::size_t>(p)].begin(), tab.grid_logw[static_cast<std::size_t>(p)].end());
            for (int gi = 0; gi < G; ++gi)
                for (int j = 0; j < L; ++j)
                    gw[static_cast<std::size_t>(gi)] +=
                        cl[static_cast<std::size_t>((gi * L + j) * (K + 1) + cnt[static_cast<std::size_t>(p * L + j)])];
            to_probs(gw);
            g[static_cast<std::size_t>(p)] = static_cast<int>(rng.categorical(gw));
            if (keep) {
                auto& aa = acc_alpha[static_cast<std::size_t>(p)];
                const auto& la = tab.lam_alpha[static_cast<std::size_t>(p)];
                for (int j = 0; j < L; ++j) pred[static_cast<std::size_t>(p * L + j)] = 0.0;
                for (int gi = 0; gi < G; ++gi) {
                    aa[static_cast<std::size_t>(gi)] += gw[static_cast<std::size_t>(gi)];
                    for (int j = 0; j < L; ++j)
                        pred[static_cast<std::size_t>(p * L + j)] +=
                            gw[static_cast<std::size_t>(gi)] *
                            (la[static_cast<std::size_t>(gi * L + j)] + cnt[static_cast<std::size_t>(p * L + j)]) /
                            (prior.lambda + K);
                }
            }
        }
        if (keep) {
            for (std::size_t i = 0; i < N; ++i) {
                double v = 1.0;
                for (int p = 0; p < P; ++p) v *= pred[static_cast<std::size_t>(p * L + at(i, p))];
                acc_stranger[i] += v;
            }
        }
    }

    for (int k = 0; k < K; ++k) {
        auto& a = acc_partner[static_cast<std::size_t>(k)];
        for (double& x : a) x /= R;
        out.partners[ids[static_cast<std::size_t>(k)]] = std::move(a);
    }
    for (auto& a : acc_alpha)
        for (double& x : a) x /= R;
    out.alpha_weights = std::move(acc_alpha);
    for (double& x : acc_stranger) x /= R;
    out.stranger = std::move(acc_stranger);
    return out;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

LexiconBeliefs partner_marginal(const Posterior& post, std::optional<int> partner) {
    return std::visit(
        overloaded{
            [](const FlatPosterior& f) { return LexiconBeliefs{f.space, f.probs}; },
            [&](const PerPartnerPosterior& pp) {
                if (!partner) return LexiconBeliefs::prior(pp.space);
                auto it = pp.partners.find(*partner);
                if (it == pp.partners.end()) throw DomainError("unknown partner " + std::to_string(*partner));
                return LexiconBeliefs{pp.space, it->second};
            },
            [&](const HierarchicalPosterior& h) {
                if (!partner) return LexiconBeliefs{h.space, h.stranger};
                auto it = h.partners.find(*partner);
                if (it == h.partners.end()) throw DomainError("unknown partner " + std::to_string(*partner));
                return LexiconBeliefs{h.space, it->second};
            },
        },
        post);
}

LexiconBeliefs stranger_predictive(const Posterior& post) {
    return std::visit(overloaded{
                          [](const FlatPosterior& f) { return LexiconBeliefs{f.space, f.probs}; },
                          [](const PerPartnerPosterior& pp) { return LexiconBeliefs::prior(pp.space); },
                          [](const HierarchicalPosterior& h) { return LexiconBeliefs{h.space, h.stranger}; },
                      },
                      post);
}

std::vector<std::vector<double>> meaning_marginals(const LexiconBeliefs& beliefs, int node_count) {
    std::vector<std::vector<double>> out;
    for (int p = 0; p < beliefs.space->primitive_count(); ++p) out.push_back(beliefs.primitive_marginal(p, node_count));
    return out;
}

}  // namespace chai
