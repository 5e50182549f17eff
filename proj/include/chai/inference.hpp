#pragma once
// Beliefs about partners' lexicons: decayed likelihoods, exact enumeration,
// and a systematic-scan Gibbs sampler for the hierarchical model.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "chai/domain.hpp"
#include "chai/prior.hpp"
#include "chai/rsa.hpp"

namespace chai {

enum class Role { speaker, listener };

// One trial as seen by one agent.
struct Observation {
    TrialRecord record;
    Role own_role = Role::listener;
    Context context;
};

// Per-partner observation streams, in the order they happened.
class ObservationLog {
public:
    // Trial indices must increase strictly within a partner's stream.
    void append(int partner, Observation obs);

    const std::vector<Observation>& stream(int partner) const;
    const std::vector<Observation>& merged() const { return merged_; }
    bool has_partner(int partner) const { return by_partner_.count(partner) != 0; }
    std::vector<int> partners() const;
    bool empty() const { return merged_.empty(); }

private:
    std::map<int, std::vector<Observation>> by_partner_;
    std::vector<Observation> merged_;
};

// Likelihood of one trial under the partner's lexicon: a listener scores the
// partner's utterance with S1^eps(u'|o*), a speaker scores the partner's
// response with L0^eps(o'|u').
double trial_loglik(const Lexicon& lex, const Observation& obs, const Game& game, const SimParams& params);

// trial_loglik for every lexicon in a space.
std::vector<double> trial_loglik_vector(const LexiconSpace& space, const Observation& obs, const Game& game,
                                        const SimParams& params);

// Σ_τ beta^τ log l_{T-τ}, where τ = 0 is the last element of `stream`.
double decayed_loglik(const Lexicon& lex, std::span<const Observation> stream, const Game& game,
                      const SimParams& params);

// Running form of decayed_loglik over a whole space: acc <- beta*acc + ll.
void accumulate_decayed(std::vector<double>& acc, std::span<const double> trial_ll, double beta);

struct FlatPosterior {
    std::shared_ptr<const LexiconSpace> space;
    std::vector<double> probs;
};

// Independent flat posteriors per partner; unseen partners get the prior.
struct PerPartnerPosterior {
    std::shared_ptr<const LexiconSpace> space;
    std::map<int, std::vector<double>> partners;
};

struct HierarchicalPosterior {
    std::shared_ptr<const LexiconSpace> space;
    std::map<int, std::vector<double>> partners;     // P(phi_k | D)
    std::vector<double> stranger;                    // P(phi_new | D)
    std::vector<std::vector<double>> alpha_weights;  // [primitive][grid point]
    int retained_sweeps = 0;
};

using Posterior = std::variant<FlatPosterior, PerPartnerPosterior, HierarchicalPosterior>;

// prior + loglik, normalized.
FlatPosterior flat_posterior(std::shared_ptr<const LexiconSpace> space, std::span<const double> loglik);

FlatPosterior exact_posterior(std::shared_ptr<const LexiconSpace> space, std::span<const Observation> stream,
                              const Game& game, const SimParams& params,
                              std::size_t cap = kDefaultEnumerationCap);

struct GibbsOptions {
    int sweeps = 5000;
    int burn_in = 1000;
};

// `space` must be enumerate_space(prior, ...): every leaf assignment, with
// the prior predictive as its log prior. Partner marginals, the stranger
// predictive and alpha weights are Rao-Blackwellised: each retained sweep
// contributes the exact conditional it sampled from.
HierarchicalPosterior gibbs_posterior(const HierarchicalDM& prior, std::shared_ptr<const LexiconSpace> space,
                                      const ObservationLog& log, const Game& game, const SimParams& params,
                                      const GibbsOptions& options, std::uint64_t seed);

// Same sampler, fed with precomputed decayed log-likelihood vectors per partner.
HierarchicalPosterior gibbs_from_loglik(const HierarchicalDM& prior, std::shared_ptr<const LexiconSpace> space,
                                        const std::map<int, std::vector<double>>& partner_loglik,
                                        const GibbsOptions& options, std::uint64_t seed);

// Beliefs about partner k; std::nullopt asks about a new partner.
LexiconBeliefs partner_marginal(const Posterior& post, std::optional<int> partner);

// Beliefs about an unseen partner: pooled beliefs for Flat, the prior for
// PerPartner, the collapsed predictive for Hierarchical.
LexiconBeliefs stranger_predictive(const Posterior& post);

// Per-primitive meaning marginals of some beliefs: [primitive][node..., Empty].
std::vector<std::vector<double>> meaning_marginals(const LexiconBeliefs& beliefs, int node_count);

}  // namespace chai
