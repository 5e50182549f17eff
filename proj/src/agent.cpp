#include "chai/agent.hpp"

namespace chai {

std::string_view to_string(Pooling pooling) {
    switch (pooling) {
        case Pooling::complete: return "complete";
        case Pooling::none: return "none";
        case Pooling::partial: return "partial";
    }
    return "?";
}

Pooling pooling_from_string(std::string_view name) {
    if (name == "complete") return Pooling::complete;
    if (name == "none") return Pooling::none;
    if (name == "partial") return Pooling::partial;
    throw DomainError("unknown pooling model '" + std::string(name) + "'");
}

namespace {

constexpr int kPooledStream = -1;

Posterior initial_posterior(const AgentConfig& cfg, const std::shared_ptr<const LexiconSpace>& space) {
    switch (cfg.pooling) {
        case Pooling::complete: return flat_posterior(space, {});
        case Pooling::none: return PerPartnerPosterior{space, {}};
        case Pooling::partial: {
            const auto* h = std::get_if<HierarchicalDM>(&cfg.prior);
            if (!h) throw DomainError("partial pooling needs a hierarchical prior");
            return gibbs_from_loglik(*h, space, {}, cfg.gibbs, 0);
        }
    }
    throw DomainError("bad pooling mode");
}

}  // namespace

Agent::Agent(int id, AgentConfig config, std::shared_ptr<const Game> game, std::shared_ptr<const LexiconSpace> space)
    : id_(id), config_(std::move(config)), game_(std::move(game)), space_(std::move(space)) {
    if (!game_ || !space_) throw DomainError("agent needs a game and a lexicon space");
    if (space_->primitive_count() != game_->primitive_count())
        throw DomainError("lexicon space and game disagree on the vocabulary");
    config_.params.validate();
    posterior_ = initial_posterior(config_, space_);
}

LexiconBeliefs Agent::beliefs_about(int partner) const {
    switch (config_.pooling) {
        case Pooling::complete: return partner_marginal(posterior_, std::nullopt);
        case Pooling::none:
        case Pooling::partial:
            return partner_marginal(posterior_, log_.has_partner(partner) ? std::optional<int>(partner) : std::nullopt);
    }
    throw DomainError("bad pooling mode");
}

Utterance Agent::speak(Referent target, const Context& ctx, int partner, Rng& rng) const {
    const auto d = marginal_speaker(beliefs_about(partner), target, ctx, *game_, config_.params);
    return d.support[rng.categorical(d.probs)];
}

Referent Agent::listen(const Utterance& u, const Context& ctx, int partner, Rng& rng) const {
    const auto d = marginal_listener(beliefs_about(partner), u, ctx, *game_, config_.params);
    return d.support[rng.categorical(d.probs)];
}

double Agent::long_utterance_prob(Referent target, const Context& ctx, int partner) const {
    const auto d = marginal_speaker(beliefs_about(partner), target, ctx, *game_, config_.params);
    double p = 0.0;
    for (std::size_t i = 0; i < d.support.size(); ++i)
        if (d.support[i].length() == 2) p += d.probs[i];
    return p;
}

void Agent::observe(const TrialRecord& record, const Context& ctx, int partner, Role own_role,
                    std::uint64_t gibbs_seed) {
    const int self = own_role == Role::speaker ? record.speaker : record.listener;
    const int other = own_role == Role::speaker ? record.listener : record.speaker;
    if (self != id_ || other != partner) throw DomainError("trial record does not match the agent's role");

    Observation obs{record, own_role, ctx};
    const auto ll = trial_loglik_vector(*space_, obs, *game_, config_.params);
    log_.append(partner, std::move(obs));

    const int key = config_.pooling == Pooling::complete ? kPooledStream : partner;
    auto& acc = acc_[key];
    accumulate_decayed(acc, ll, config_.params.beta);

    switch (config_.pooling) {
        case Pooling::complete: posterior_ = flat_posterior(space_, acc); break;
        case Pooling::none: {
            auto& pp = std::get<PerPartnerPosterior>(posterior_);
            pp.partners[partner] = flat_posterior(space_, acc).probs;
            break;
        }
        case Pooling::partial:
            posterior_ = gibbs_from_loglik(std::get<HierarchicalDM>(config_.prior), space_, acc_, config_.gibbs,
                                           gibbs_seed);
            break;
    }
}

}  // namespace chai
