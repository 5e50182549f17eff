#include "chai/rsa.hpp"

#include <cmath>

#include "chai/numeric.hpp"

namespace chai {

void SimParams::validate() const {
    if (!(alpha_s >= 0.0)) throw DomainError("alpha_s must be >= 0");
    if (!(alpha_l >= 0.0)) throw DomainError("alpha_l must be >= 0");
    if (!(w_c >= 0.0 && w_c <= 1.0)) throw DomainError("w_c must lie in [0,1]");
    if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0,1]");
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in [0,1)");
}

Game::Game(Taxonomy taxonomy, Vocabulary vocabulary, CandidateSet candidates)
    : taxonomy_(std::move(taxonomy)),
      vocabulary_(std::move(vocabulary)),
      candidate_set_(candidates),
      candidates_(candidate_utterances(vocabulary_.size(), candidates)) {
    for (const auto& n : taxonomy_.nodes()) node_ext_.push_back(n.extension);
}

std::optional<int> Game::candidate_index(const Utterance& u) const {
    for (std::size_t i = 0; i < candidates_.size(); ++i)
        if (candidates_[i] == u) return static_cast<int>(i);
    return std::nullopt;
}

Denotation denote(const Lexicon& lex, const Utterance& u, const Game& game) {
    const ReferentSet universe = game.universe();
    Denotation d{universe, false};
    bool every_conjunct_satisfiable = true;
    for (PrimitiveId p : u.primitives()) {
        const ReferentSet ext = game.node_extension(lex.at(p)) & universe;
        every_conjunct_satisfiable = every_conjunct_satisfiable && !ext.empty();
        d.extension = d.extension & ext;
    }
    d.contradiction = u.length() > 1 && every_conjunct_satisfiable && d.extension.empty();
    return d;
}

double literal_prob(const Denotation& d, const Context& ctx, Referent o, double epsilon) {
    const int n = ctx.real.size() + 1;
    double base;
    if (d.contradiction) {
        base = 1.0 / n;
    } else {
        const int true_count = (d.extension & ctx.real).size() + 1;  // +1: the null referent
        const bool is_true = o == kNullReferent || (ctx.real.contains(o) && d.extension.contains(o));
        base = is_true ? 1.0 / true_count : 0.0;
    }
    return epsilon / n + (1.0 - epsilon) * base;
}

namespace {

void check_context(const Context& ctx, const Game& game) {
    if (ctx.real.empty()) throw DomainError("context has no real referents");
    if (!game.universe().includes(ctx.real)) throw DomainError("context referents outside the universe");
}

void check_beliefs(const LexiconBeliefs& beliefs) {
    if (!beliefs.space || beliefs.probs.empty()) throw DomainError("beliefs have empty support");
    if (beliefs.probs.size() != beliefs.space->size()) throw DomainError("beliefs do not match their space");
    double mass = 0.0;
    for (double w : beliefs.probs) mass += w;
    if (!(mass > 0.0)) throw DomainError("beliefs have empty support");
}

}  // namespace

void speaker_utilities(const Lexicon& lex, Referent target, const Context& ctx, const Game& game,
                       const SimParams& params, std::span<double> out) {
    const auto& cands = game.candidates();
    for (std::size_t c = 0; c < cands.size(); ++c) {
        const double l0 = literal_prob(denote(lex, cands[c], game), ctx, target, params.epsilon);
        out[c] = (1.0 - params.w_c) * std::log(l0) - params.w_c * utterance_cost(cands[c]);
    }
}

void speaker_log_probs(const Lexicon& lex, Referent target, const Context& ctx, const Game& game,
                       const SimParams& params, std::span<double> out) {
    speaker_utilities(lex, target, ctx, game, params, out);
    softmax_inplace(out, params.alpha_s);
    mix_uniform(out, params.epsilon);
    for (double& x : out) x = std::log(x);
}

Distribution<Referent> literal_listener(const Utterance& u, const Lexicon& lex, const Context& ctx,
                                        const Game& game, double epsilon) {
    check_context(ctx, game);
    const Denotation d = denote(lex, u, game);
    Distribution<Referent> out;
    out.support = ctx.real.members();
    out.support.push_back(kNullReferent);
    for (Referent o : out.support) out.probs.push_back(literal_prob(d, ctx, o, epsilon));
    return out;
}

Distribution<Utterance> pragmatic_speaker(Referent target, const Lexicon& lex, const Context& ctx,
                                          const Game& game, const SimParams& params) {
    check_context(ctx, game);
    if (!ctx.real.contains(target)) throw DomainError("speaker target not in context");
    Distribution<Utterance> out;
    out.support = game.candidates();
    out.probs.resize(out.support.size());
    speaker_utilities(lex, target, ctx, game, params, out.probs);
    softmax_inplace(out.probs, params.alpha_s);
    mix_uniform(out.probs, params.epsilon);
    return out;
}

Distribution<Utterance> marginal_speaker(const LexiconBeliefs& beliefs, Referent target, const Context& ctx,
                                         const Game& game, const SimParams& params) {
    check_beliefs(beliefs);
    check_context(ctx, game);
    if (!ctx.real.contains(target)) throw DomainError("speaker target not in context");
    const std::size_t nc = game.candidates().size();
    std::vector<double> expected(nc, 0.0), u(nc);
    for (std::size_t i = 0; i < beliefs.probs.size(); ++i) {
        const double w = beliefs.probs[i];
        if (w == 0.0) continue;
        speaker_utilities(beliefs.space->lexicon(i), target, ctx, game, params, u);
        for (std::size_t c = 0; c < nc; ++c) expected[c] += w * u[c];
    }
    softmax_inplace(expected, params.alpha_s);
    mix_uniform(expected, params.epsilon);
    return {game.candidates(), std::move(expected)};
}

Distribution<Referent> marginal_listener(const LexiconBeliefs& beliefs, const Utterance& u, const Context& ctx,
                                         const Game& game, const SimParams& params) {
    check_beliefs(beliefs);
    check_context(ctx, game);
    const auto ci = game.candidate_index(u);
    if (!ci) throw DomainError("utterance is not among the speaker's candidates");
    const std::vector<Referent> objects = ctx.real.members();
    std::vector<double> score(objects.size(), 0.0), logs(game.candidates().size());
    for (std::size_t i = 0; i < beliefs.probs.size(); ++i) {
        const double w = beliefs.probs[i];
        if (w == 0.0) continue;
        for (std::size_t k = 0; k < objects.size(); ++k) {
            speaker_log_probs(beliefs.space->lexicon(i), objects[k], ctx, game, params, logs);
            score[k] += w * logs[static_cast<std::size_t>(*ci)];
        }
    }
    softmax_inplace(score, params.alpha_l);
    mix_uniform(score, params.epsilon);
    return {objects, std::move(score)};
}

}  // namespace chai
