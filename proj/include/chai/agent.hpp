#pragma once
// An adaptive agent: speaks and listens by marginalizing over its beliefs
// about the current partner's lexicon, then updates those beliefs from the
// partner's behavior.

#include <cstdint>
#include <map>
#include <memory>
#include <string_view>
#include <vector>

#include "chai/inference.hpp"
#include "chai/random.hpp"

namespace chai {

// How evidence from different partners is shared.
enum class Pooling { complete, none, partial };

std::string_view to_string(Pooling pooling);
Pooling pooling_from_string(std::string_view name);

struct AgentConfig {
    SimParams params;
    PriorSpec prior = UnconstrainedExtension{};
    Pooling pooling = Pooling::complete;
    GibbsOptions gibbs;
};

class Agent {
public:
    // `space` must be enumerate_space(config.prior, ...) for `game`.
    Agent(int id, AgentConfig config, std::shared_ptr<const Game> game, std::shared_ptr<const LexiconSpace> space);

    int id() const { return id_; }
    const AgentConfig& config() const { return config_; }
    const ObservationLog& log() const { return log_; }
    const Posterior& posterior() const { return posterior_; }

    Utterance speak(Referent target, const Context& ctx, int partner, Rng& rng) const;
    Referent listen(const Utterance& u, const Context& ctx, int partner, Rng& rng) const;

    // Conditions on the partner's half of the trial. `gibbs_seed` is used
    // only under partial pooling.
    void observe(const TrialRecord& record, const Context& ctx, int partner, Role own_role,
                 std::uint64_t gibbs_seed = 0);

    LexiconBeliefs beliefs_about(int partner) const;
    LexiconBeliefs stranger_beliefs() const { return stranger_predictive(posterior_); }

    // Marginal speaker probability of any two-word utterance.
    double long_utterance_prob(Referent target, const Context& ctx, int partner) const;

private:
    int id_;
    AgentConfig config_;
    std::shared_ptr<const Game> game_;
    std::shared_ptr<const LexiconSpace> space_;
    ObservationLog log_;
    Posterior posterior_;
    // Decayed log-likelihood per stream: key -1 holds the pooled stream.
    std::map<int, std::vector<double>> acc_;
};

}  // namespace chai
