#include "chai/prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "chai/numeric.hpp"

namespace chai {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double ipow(double base, int exp) {
    double r = 1.0;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

double falling_factorial(int n, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= static_cast<double>(n - i);
    return r;
}

void check_cap(double count, std::size_t cap, const PriorSpec& spec) {
    if (count > static_cast<double>(cap)) {
        throw SpaceTooLarge(prior_name(spec) + " space has " + std::to_string(static_cast<long double>(count)) +
                            " lexicons, above the enumeration cap of " + std::to_string(cap) +
                            "; shrink the vocabulary or taxonomy, or use the hierarchical sampling path");
    }
}

// Visit every assignment primitive -> choice in mixed-radix order (primitive 0
// varies slowest).
template <class F>
void for_each_assignment(int primitive_count, int choices, F&& visit) {
    std::vector<int> digits(static_cast<std::size_t>(primitive_count), 0);
    while (true) {
        visit(digits);
        int p = primitive_count - 1;
        while (p >= 0 && ++digits[static_cast<std::size_t>(p)] == choices) digits[static_cast<std::size_t>(p--)] = 0;
        if (p < 0) return;
    }
}

double sum_extension_sizes(const Lexicon& lex, const Taxonomy& tax) {
    double total = 0.0;
    for (Meaning m : lex.assignment()) total += extension(m, tax).size();
    return total;
}

bool covers_universe(const Lexicon& lex, const Taxonomy& tax) {
    ReferentSet covered;
    for (Meaning m : lex.assignment()) covered = covered | extension(m, tax);
    return covered == tax.universe();
}

void check_meanings(const Lexicon& lex, const Taxonomy& tax) {
    for (Meaning m : lex.assignment())
        if (!m.is_empty()) tax.node(m.node_id());
}

}  // namespace

std::string prior_name(const PriorSpec& spec) {
    return std::visit(overloaded{
                          [](const BiasedCategorical&) { return std::string("biased_categorical"); },
                          [](const TaxonomyPartition&) { return std::string("taxonomy_partition"); },
                          [](const UnconstrainedExtension&) { return std::string("unconstrained_extension"); },
                          [](const FullCoverage&) { return std::string("full_coverage"); },
                          [](const HierarchicalDM&) { return std::string("hierarchical_dm"); },
                      },
                      spec);
}

void validate_prior(const PriorSpec& spec, int primitive_count, const Taxonomy& tax) {
    const auto check_rows = [&](const std::vector<std::vector<double>>& rows, const char* what) {
        if (static_cast<int>(rows.size()) != primitive_count)
            throw DomainError(std::string(what) + ": need one row per primitive");
        for (const auto& row : rows)
            if (static_cast<int>(row.size()) != tax.leaf_count())
                throw DomainError(std::string(what) + ": need one entry per leaf");
    };
    std::visit(overloaded{
                   [&](const BiasedCategorical& b) {
                       check_rows(b.probs, "biased_categorical.probs");
                       for (const auto& row : b.probs) {
                           double s = 0.0;
                           for (double p : row) {
                               if (!(p >= 0.0)) throw DomainError("biased_categorical: negative probability");
                               s += p;
                           }
                           if (std::abs(s - 1.0) > 1e-9) throw DomainError("biased_categorical: row must sum to 1");
                       }
                   },
                   [&](const HierarchicalDM& h) {
                       if (!(h.lambda > 0.0)) throw DomainError("hierarchical_dm.lambda must be > 0");
                       if (h.grid < 3) throw DomainError("hierarchical_dm.grid must be >= 3");
                       check_rows(h.hyper, "hierarchical_dm.hyper");
                       for (const auto& row : h.hyper)
                           for (double a : row)
                               if (!(a > 0.0)) throw DomainError("hierarchical_dm.hyper must be positive");
                   },
                   [](const auto&) {},
               },
               spec);
}

// ---------------------------------------------------------------------------

LexiconSpace::LexiconSpace(std::vector<Lexicon> lexicons, std::vector<double> log_weights) {
    if (lexicons.size() != log_weights.size()) throw DomainError("lexicon/weight length mismatch");
    for (std::size_t i = 0; i < lexicons.size(); ++i) {
        if (log_weights[i] == kNegInf) continue;
        if (!std::isfinite(log_weights[i])) throw DomainError("non-finite lexicon log weight");
        if (!lexicons_.empty() && lexicons[i].size() != lexicons_.front().size())
            throw DomainError("lexicons must share one primitive domain");
        if (!index_.emplace(lexicons[i], lexicons_.size()).second) throw DomainError("duplicate lexicon in space");
        lexicons_.push_back(std::move(lexicons[i]));
        log_prior_.push_back(log_weights[i]);
    }
    if (lexicons_.empty()) throw DomainError("lexicon space has empty support");
    primitive_count_ = lexicons_.front().size();
    const double z = log_sum_exp(log_prior_);
    for (double& w : log_prior_) w -= z;
}

std::vector<double> LexiconSpace::prior_probs() const {
    std::vector<double> p(log_prior_.size());
    std::transform(log_prior_.begin(), log_prior_.end(), p.begin(), [](double w) { return std::exp(w); });
    return p;
}

std::optional<std::size_t> LexiconSpace::index_of(const Lexicon& lex) const {
    auto it = index_.find(lex);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------

std::vector<std::vector<NodeId>> taxonomy_partitions(const Taxonomy& tax) {
    // partitions of the subtree under `id`: the node itself, or any
    // combination of partitions of its children.
    std::vector<std::vector<std::vector<NodeId>>> memo(static_cast<std::size_t>(tax.node_count()));
    const auto product = [](const std::vector<std::vector<NodeId>>& a, const std::vector<std::vector<NodeId>>& b) {
        std::vector<std::vector<NodeId>> out;
        for (const auto& x : a)
            for (const auto& y : b) {
                auto z = x;
                z.insert(z.end(), y.begin(), y.end());
                out.push_back(std::move(z));
            }
        return out;
    };
    // Children always have smaller ids than their parents.
    for (const auto& n : tax.nodes()) {
        auto& parts = memo[static_cast<std::size_t>(n.id)];
        parts.push_back({n.id});
        if (!n.children.empty()) {
            std::vector<std::vector<NodeId>> acc{{}};
            for (NodeId c : n.children) acc = product(acc, memo[static_cast<std::size_t>(c)]);
            parts.insert(parts.end(), acc.begin(), acc.end());
        }
    }
    std::vector<std::vector<NodeId>> out{{}};
    for (NodeId r : tax.roots()) out = product(out, memo[static_cast<std::size_t>(r)]);
    return out;
}

double space_size(const PriorSpec& spec, int primitive_count, const Taxonomy& tax) {
    const int leaves = tax.leaf_count();
    const int nodes = tax.node_count();
    return std::visit(overloaded{
                          [&](const BiasedCategorical&) { return ipow(leaves, primitive_count); },
                          [&](const HierarchicalDM&) { return ipow(leaves, primitive_count); },
                          [&](const TaxonomyPartition&) {
                              double total = 0.0;
                              for (const auto& cells : taxonomy_partitions(tax))
                                  total += falling_factorial(primitive_count, static_cast<int>(cells.size()));
                              return total;
                          },
                          [&](const UnconstrainedExtension&) { return ipow(nodes + 1, primitive_count); },
                          // Upper bound; coverage filtering happens after enumeration.
                          [&](const FullCoverage&) { return ipow(nodes + 1, primitive_count); },
                      },
                      spec);
}

LexiconSpace enumerate_space(const PriorSpec& spec, int primitive_count, const Taxonomy& tax, std::size_t cap) {
    validate_prior(spec, primitive_count, tax);
    check_cap(space_size(spec, primitive_count, tax), cap, spec);

    std::vector<Lexicon> lexicons;
    std::vector<double> weights;
    const auto leaf_assignments = [&](const std::vector<std::vector<double>>& probs) {
        for_each_assignment(primitive_count, tax.leaf_count(), [&](const std::vector<int>& digits) {
            std::vector<Meaning> m;
            double lw = 0.0;
            for (int p = 0; p < primitive_count; ++p) {
                const int leaf = digits[static_cast<std::size_t>(p)];
                m.push_back(Meaning::node(leaf));
                const double pr = probs[static_cast<std::size_t>(p)][static_cast<std::size_t>(leaf)];
                lw += pr > 0.0 ? std::log(pr) : kNegInf;
            }
            lexicons.emplace_back(std::move(m));
            weights.push_back(lw);
        });
    };
    const auto all_nodes = [&](bool require_coverage) {
        const int choices = tax.node_count() + 1;  // last choice = Empty
        for_each_assignment(primitive_count, choices, [&](const std::vector<int>& digits) {
            std::vector<Meaning> m;
            for (int d : digits) m.push_back(d == choices - 1 ? Meaning::empty() : Meaning::node(d));
            Lexicon lex(std::move(m));
            if (require_coverage && !covers_universe(lex, tax)) return;
            weights.push_back(-sum_extension_sizes(lex, tax));
            lexicons.push_back(std::move(lex));
        });
    };

    std::visit(overloaded{
                   [&](const BiasedCategorical& b) { leaf_assignments(b.probs); },
                   [&](const HierarchicalDM& h) { leaf_assignments(prior_predictive(h).probs); },
                   [&](const TaxonomyPartition&) {
                       for (const auto& cells : taxonomy_partitions(tax)) {
                           const int c = static_cast<int>(cells.size());
                           std::vector<Meaning> m(static_cast<std::size_t>(primitive_count), Meaning::empty());
                           std::vector<bool> used(static_cast<std::size_t>(primitive_count), false);
                           // Injectively assign a word to each cell.
                           auto assign = [&](auto&& self, int cell) -> void {
                               if (cell == c) {
                                   lexicons.emplace_back(m);
                                   weights.push_back(-static_cast<double>(c));
                                   return;
                               }
                               for (int w = 0; w < primitive_count; ++w) {
                                   if (used[static_cast<std::size_t>(w)]) continue;
                                   used[static_cast<std::size_t>(w)] = true;
                                   m[static_cast<std::size_t>(w)] = Meaning::node(cells[static_cast<std::size_t>(cell)]);
                                   self(self, cell + 1);
                                   m[static_cast<std::size_t>(w)] = Meaning::empty();
                                   used[static_cast<std::size_t>(w)] = false;
                               }
                           };
                           assign(assign, 0);
                       }
                   },
                   [&](const UnconstrainedExtension&) { all_nodes(false); },
                   [&](const FullCoverage&) { all_nodes(true); },
               },
               spec);
    return LexiconSpace(std::move(lexicons), std::move(weights));
}

double log_prior(const PriorSpec& spec, const Lexicon& lex, const Taxonomy& tax) {
    check_meanings(lex, tax);
    const auto leaf_weight = [&](const std::vector<std::vector<double>>& probs) {
        if (lex.size() != static_cast<int>(probs.size())) return kNegInf;
        double lw = 0.0;
        for (int p = 0; p < lex.size(); ++p) {
            const Meaning m = lex[p];
            if (m.is_empty() || m.node_id() >= tax.leaf_count()) return kNegInf;
            const double pr = probs[static_cast<std::size_t>(p)][static_cast<std::size_t>(m.node_id())];
            if (pr <= 0.0) return kNegInf;
            lw += std::log(pr);
        }
        return lw;
    };
    return std::visit(overloaded{
                          [&](const BiasedCategorical& b) { return leaf_weight(b.probs); },
                          [&](const HierarchicalDM& h) { return leaf_weight(prior_predictive(h).probs); },
                          [&](const TaxonomyPartition&) {
                              ReferentSet covered;
                              int words = 0;
                              for (Meaning m : lex.assignment()) {
                                  if (m.is_empty()) continue;
                                  const ReferentSet ext = extension(m, tax);
                                  if (!(covered & ext).empty()) return kNegInf;
                                  covered = covered | ext;
                                  ++words;
                              }
                              return covered == tax.universe() ? -static_cast<double>(words) : kNegInf;
                          },
                          [&](const UnconstrainedExtension&) { return -sum_extension_sizes(lex, tax); },
                          [&](const FullCoverage&) {
                              return covers_universe(lex, tax) ? -sum_extension_sizes(lex, tax) : kNegInf;
                          },
                      },
                      spec);
}

bool log_prior_is_normalized(const PriorSpec& spec) {
    return std::holds_alternative<BiasedCategorical>(spec) || std::holds_alternative<HierarchicalDM>(spec);
}

// ---------------------------------------------------------------------------

double collapsed_hier_logprior(std::span<const double> alpha, double lambda, std::span<const int> assignments) {
    if (!(lambda > 0.0)) throw DomainError("lambda must be positive");
    for (double a : alpha)
        if (!(a > 0.0)) throw DomainError("alpha must be strictly positive");
    // Sequential predictive: each draw contributes (lambda*a_j + n_j) / (lambda + n).
    std::vector<int> counts(alpha.size(), 0);
    double total = 0.0;
    int n = 0;
    for (int leaf : assignments) {
        if (leaf < 0 || leaf >= static_cast<int>(alpha.size())) throw DomainError("assignment outside the simplex");
        total += std::log(lambda * alpha[static_cast<std::size_t>(leaf)] + counts[static_cast<std::size_t>(leaf)]) -
                 std::log(lambda + n);
        ++counts[static_cast<std::size_t>(leaf)];
        ++n;
    }
    return total;
}

AlphaGrid make_alpha_grid(std::span<const double> hyper, int resolution) {
    if (resolution < 3) throw DomainError("alpha grid resolution must be >= 3");
    const int k = static_cast<int>(hyper.size());
    if (k < 2) throw DomainError("alpha grid needs at least two leaves");
    for (double h : hyper)
        if (!(h > 0.0)) throw DomainError("hyper pseudo-counts must be positive");

    // Compositions m of (resolution-1) into k parts, mapped to
    // alpha_j = (m_j + 1/2) / (resolution - 1 + k/2), which stays interior.
    AlphaGrid grid;
    const int total = resolution - 1;
    const double denom = total + 0.5 * k;
    std::vector<int> m(static_cast<std::size_t>(k), 0);
    auto recurse = [&](auto&& self, int j, int remaining) -> void {
        if (j == k - 1) {
            m[static_cast<std::size_t>(j)] = remaining;
            std::vector<double> point(static_cast<std::size_t>(k));
            double lw = 0.0;
            for (int i = 0; i < k; ++i) {
                point[static_cast<std::size_t>(i)] = (m[static_cast<std::size_t>(i)] + 0.5) / denom;
                lw += (hyper[static_cast<std::size_t>(i)] - 1.0) * std::log(point[static_cast<std::size_t>(i)]);
            }
            grid.points.push_back(std::move(point));
            grid.log_weights.push_back(lw);
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            m[static_cast<std::size_t>(j)] = v;
            self(self, j + 1, remaining - v);
        }
    };
    recurse(recurse, 0, total);
    const double z = log_sum_exp(grid.log_weights);
    for (double& w : grid.log_weights) w -= z;
    return grid;
}

BiasedCategorical prior_predictive(const HierarchicalDM& spec) {
    BiasedCategorical out;
    for (const auto& hyper : spec.hyper) {
        const AlphaGrid grid = make_alpha_grid(hyper, spec.grid);
        std::vector<double> mean(hyper.size(), 0.0);
        for (std::size_t g = 0; g < grid.points.size(); ++g) {
            const double w = std::exp(grid.log_weights[g]);
            for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += w * grid.points[g][j];
        }
        const double s = std::accumulate(mean.begin(), mean.end(), 0.0);
        for (double& x : mean) x /= s;
        out.probs.push_back(std::move(mean));
    }
    return out;
}

// ---------------------------------------------------------------------------

LexiconBeliefs LexiconBeliefs::prior(std::shared_ptr<const LexiconSpace> space) {
    LexiconBeliefs b;
    b.probs = space->prior_probs();
    b.space = std::move(space);
    return b;
}

std::vector<double> LexiconBeliefs::primitive_marginal(PrimitiveId p, int node_count) const {
    std::vector<double> out(static_cast<std::size_t>(node_count) + 1, 0.0);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const Meaning m = space->lexicon(i).at(p);
        out[m.is_empty() ? static_cast<std::size_t>(node_count) : static_cast<std::size_t>(m.node_id())] += probs[i];
    }
    return out;
}

double LexiconBeliefs::prob_meaning(PrimitiveId p, Meaning m) const {
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (space->lexicon(i).at(p) == m) total += probs[i];
    return total;
}

double LexiconBeliefs::entropy() const {
    double h = 0.0;
    for (double p : probs)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

}  // namespace chai
