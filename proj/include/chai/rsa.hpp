#pragma once
// Literal listener, pragmatic speaker, and the speaker/listener that act on
// expected utility under uncertainty about the partner's lexicon.
//
// Every level mixes in an epsilon share of uniform noise over its support,
// so all log-probabilities stay finite.

#include <optional>
#include <span>
#include <vector>

#include "chai/domain.hpp"
#include "chai/prior.hpp"

namespace chai {

struct SimParams {
    double alpha_s = 8.0;  // speaker soft-max optimality
    double alpha_l = 8.0;  // listener soft-max optimality
    double w_c = 0.0;      // weight of utterance cost against informativity
    double beta = 0.8;     // memory decay per trial
    double epsilon = 0.01;
    CandidateSet candidates = CandidateSet::singles;

    void validate() const;
};

template <class T>
struct Distribution {
    std::vector<T> support;
    std::vector<double> probs;

    double prob(const T& x) const {
        for (std::size_t i = 0; i < support.size(); ++i)
            if (support[i] == x) return probs[i];
        return 0.0;
    }
    double total() const {
        double s = 0.0;
        for (double p : probs) s += p;
        return s;
    }
};

// Immutable description of one reference game: the referent universe, the
// primitive vocabulary and the utterances a speaker may choose from.
class Game {
public:
    Game(Taxonomy taxonomy, Vocabulary vocabulary, CandidateSet candidates);

    const Taxonomy& taxonomy() const { return taxonomy_; }
    const Vocabulary& vocabulary() const { return vocabulary_; }
    int primitive_count() const { return vocabulary_.size(); }
    ReferentSet universe() const { return taxonomy_.universe(); }
    CandidateSet candidate_set() const { return candidate_set_; }
    const std::vector<Utterance>& candidates() const { return candidates_; }
    std::optional<int> candidate_index(const Utterance& u) const;
    ReferentSet node_extension(Meaning m) const {
        return m.is_empty() ? ReferentSet() : node_ext_[static_cast<std::size_t>(m.node_id())];
    }

private:
    Taxonomy taxonomy_;
    Vocabulary vocabulary_;
    CandidateSet candidate_set_;
    std::vector<Utterance> candidates_;
    std::vector<ReferentSet> node_ext_;
};

// What an utterance picks out under one lexicon.
struct Denotation {
    ReferentSet extension;
    bool contradiction = false;
};

Denotation denote(const Lexicon& lex, const Utterance& u, const Game& game);

// L0^eps(o | u) for o in ctx.real or the null referent.
double literal_prob(const Denotation& d, const Context& ctx, Referent o, double epsilon);

// U(u; o, lex) for every candidate, written into `out`.
void speaker_utilities(const Lexicon& lex, Referent target, const Context& ctx, const Game& game,
                       const SimParams& params, std::span<double> out);

// log S1^eps(u | o, lex) for every candidate, written into `out`.
void speaker_log_probs(const Lexicon& lex, Referent target, const Context& ctx, const Game& game,
                       const SimParams& params, std::span<double> out);

// Distribution over ctx.real followed by the null referent.
Distribution<Referent> literal_listener(const Utterance& u, const Lexicon& lex, const Context& ctx,
                                        const Game& game, double epsilon);

Distribution<Utterance> pragmatic_speaker(Referent target, const Lexicon& lex, const Context& ctx,
                                          const Game& game, const SimParams& params);

// Soft-max of expected utility under `beliefs`, then the epsilon mixture.
Distribution<Utterance> marginal_speaker(const LexiconBeliefs& beliefs, Referent target, const Context& ctx,
                                         const Game& game, const SimParams& params);

// Soft-max over ctx.real of the expected log S1^eps(u | o, lex). Never
// returns the null referent.
Distribution<Referent> marginal_listener(const LexiconBeliefs& beliefs, const Utterance& u, const Context& ctx,
                                         const Game& game, const SimParams& params);

}  // namespace chai
