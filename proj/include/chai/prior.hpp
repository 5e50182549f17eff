#pragma once
// Enumerable lexicon spaces and the priors placed over them.

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "chai/domain.hpp"

namespace chai {

// Independent categorical over leaves for each primitive.
struct BiasedCategorical {
    std::vector<std::vector<double>> probs;  // [primitive][leaf], rows sum to 1
};

// Non-empty words exactly partition the universe into taxonomy-node cells,
// one distinct word per cell. P(lex) ∝ exp(-#non-empty words).
struct TaxonomyPartition {};

// Any node or Empty per word. P(lex) ∝ exp(-Σ extension sizes).
struct UnconstrainedExtension {};

// UnconstrainedExtension restricted to lexicons covering every referent.
struct FullCoverage {};

// phi_k(u) ~ Categorical(Theta_u), Theta_u ~ Dirichlet(lambda * alpha_u),
// alpha_u ~ Dirichlet(hyper_u) discretised on a simplex grid.
struct HierarchicalDM {
    double lambda = 2.0;
    std::vector<std::vector<double>> hyper;  // [primitive][leaf] pseudo-counts
    int grid = 21;
};

using PriorSpec = std::variant<BiasedCategorical, TaxonomyPartition, UnconstrainedExtension, FullCoverage,
                               HierarchicalDM>;

std::string prior_name(const PriorSpec& spec);
void validate_prior(const PriorSpec& spec, int primitive_count, const Taxonomy& tax);

inline constexpr std::size_t kDefaultEnumerationCap = 100000;

class SpaceTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

// Finite support of lexicons with normalized log-prior weights.
class LexiconSpace {
public:
    // Weights may be unnormalized; -inf entries are dropped.
    LexiconSpace(std::vector<Lexicon> lexicons, std::vector<double> log_weights);

    std::size_t size() const { return lexicons_.size(); }
    int primitive_count() const { return primitive_count_; }
    const Lexicon& lexicon(std::size_t i) const { return lexicons_[i]; }
    const std::vector<Lexicon>& lexicons() const { return lexicons_; }
    std::span<const double> log_prior() const { return log_prior_; }
    std::vector<double> prior_probs() const;
    std::optional<std::size_t> index_of(const Lexicon& lex) const;

private:
    std::vector<Lexicon> lexicons_;
    std::vector<double> log_prior_;
    std::map<Lexicon, std::size_t> index_;
    int primitive_count_ = 0;
};

// Number of lexicons enumerate_space would produce (as a double, may be huge).
double space_size(const PriorSpec& spec, int primitive_count, const Taxonomy& tax);

// Throws SpaceTooLarge when the support exceeds `cap`.
LexiconSpace enumerate_space(const PriorSpec& spec, int primitive_count, const Taxonomy& tax,
                             std::size_t cap = kDefaultEnumerationCap);

// Unnormalized log prior; -inf outside the support. BiasedCategorical and
// HierarchicalDM return normalized values, the extension-size priors do not.
double log_prior(const PriorSpec& spec, const Lexicon& lex, const Taxonomy& tax);
bool log_prior_is_normalized(const PriorSpec& spec);

// All cell sets (lists of node ids) that exactly partition the universe.
std::vector<std::vector<NodeId>> taxonomy_partitions(const Taxonomy& tax);

// log[ B(lambda*alpha + counts) / B(lambda*alpha) ], with counts tallied from
// per-partner leaf choices. Exchangeable in `assignments`.
double collapsed_hier_logprior(std::span<const double> alpha, double lambda, std::span<const int> assignments);

// Discretised hyper-prior over alpha on the interior of the simplex.
struct AlphaGrid {
    std::vector<std::vector<double>> points;  // each sums to 1
    std::vector<double> log_weights;          // normalized
};

AlphaGrid make_alpha_grid(std::span<const double> hyper, int resolution);

// Single-partner prior predictive: per-primitive grid mean of alpha.
BiasedCategorical prior_predictive(const HierarchicalDM& spec);

// A distribution over the lexicons of one space.
struct LexiconBeliefs {
    std::shared_ptr<const LexiconSpace> space;
    std::vector<double> probs;

    static LexiconBeliefs prior(std::shared_ptr<const LexiconSpace> space);

    // Marginal over meanings of primitive p: entries 0..node_count-1 are
    // taxonomy nodes, the final entry is Empty.
    std::vector<double> primitive_marginal(PrimitiveId p, int node_count) const;
    double prob_meaning(PrimitiveId p, Meaning m) const;
    double entropy() const;
};

}  // namespace chai
