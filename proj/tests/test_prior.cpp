#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "chai/prior.hpp"

using namespace chai;

namespace {

double sum_exp(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += std::exp(x);
    return s;
}

// Two leaves under one basic node, no superordinate.
Taxonomy pair_taxonomy() { return Taxonomy({"o1", "o2"}, {{0, 1}}, {}); }

BiasedCategorical reduction_prior() {
    return BiasedCategorical{{{0.55, 0.45}, {0.55, 0.45}, {0.45, 0.55}, {0.45, 0.55}}};
}

}  // namespace

TEST_CASE("uniform categorical over a 2x2 game gives four equiprobable lexicons") {
    const LexiconSpace s = enumerate_space(BiasedCategorical{{{0.5, 0.5}, {0.5, 0.5}}}, 2, Taxonomy::flat(2));
    REQUIRE(s.size() == 4);
    for (double p : s.prior_probs()) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("partition prior over the single branch with 8 words has 2416 lexicons") {
    const Taxonomy tax = Taxonomy::single_branch();
    CHECK(taxonomy_partitions(tax).size() == 5);
    // falling factorials of 8 over partitions with 1, 2, 3, 3 and 4 cells
    const double oracle = 8 + 8 * 7 + 8 * 7 * 6 * 2 + 8 * 7 * 6 * 5;
    CHECK(oracle == 2416);
    CHECK(space_size(TaxonomyPartition{}, 8, tax) == oracle);
    const LexiconSpace s = enumerate_space(TaxonomyPartition{}, 8, tax);
    CHECK(s.size() == 2416);
}

TEST_CASE("partition lexicons cover every referent exactly once") {
    const Taxonomy tax = Taxonomy::single_branch();
    const LexiconSpace s = enumerate_space(TaxonomyPartition{}, 5, tax);
    for (const Lexicon& lex : s.lexicons()) {
        for (Referent r = 0; r < tax.leaf_count(); ++r) {
            int hits = 0;
            for (const Meaning& m : lex.assignment()) hits += extension(m, tax).contains(r) ? 1 : 0;
            CHECK(hits == 1);
        }
    }
}

TEST_CASE("unconstrained extension prior weights") {
    const Taxonomy tax = pair_taxonomy();
    const LexiconSpace s = enumerate_space(UnconstrainedExtension{}, 1, tax);
    REQUIRE(s.size() == 4);
    // o1, o2, basic, Empty: exp(-{1,1,2,0}) normalized
    const double z = 2 * std::exp(-1.0) + std::exp(-2.0) + 1.0;
    const auto lp = s.log_prior();
    CHECK(lp[*s.index_of(Lexicon({Meaning::node(0)}))] == doctest::Approx(-1 - std::log(z)));
    CHECK(lp[*s.index_of(Lexicon({Meaning::node(1)}))] == doctest::Approx(-1 - std::log(z)));
    CHECK(lp[*s.index_of(Lexicon({Meaning::node(2)}))] == doctest::Approx(-2 - std::log(z)));
    CHECK(lp[*s.index_of(Lexicon({Meaning::empty()}))] == doctest::Approx(-std::log(z)));
}

TEST_CASE("full coverage keeps only covering lexicons") {
    const Taxonomy tax = Taxonomy::flat(2);
    const LexiconSpace s = enumerate_space(FullCoverage{}, 2, tax);
    // {o1,o2} and {o2,o1}
    CHECK(s.size() == 2);
    const LexiconSpace u = enumerate_space(UnconstrainedExtension{}, 2, tax);
    CHECK(u.size() == 9);
}

TEST_CASE("enumerated priors are normalized") {
    const Taxonomy sb = Taxonomy::single_branch();
    const std::vector<std::pair<PriorSpec, int>> cases = {
        {BiasedCategorical{{{0.3, 0.7}, {0.5, 0.5}}}, 2},
        {TaxonomyPartition{}, 4},
        {UnconstrainedExtension{}, 3},
        {FullCoverage{}, 3},
        {HierarchicalDM{2.0, {{1, 1.5}, {1.5, 1}}, 21}, 2},
    };
    for (const auto& [spec, words] : cases) {
        const Taxonomy tax = std::holds_alternative<BiasedCategorical>(spec) || std::holds_alternative<HierarchicalDM>(spec)
                                 ? Taxonomy::flat(2)
                                 : sb;
        const LexiconSpace s = enumerate_space(spec, words, tax);
        CHECK(sum_exp(s.log_prior()) == doctest::Approx(1.0).epsilon(1e-9));
        // log_prior agrees with the enumerated weights up to one constant
        const double shift = s.log_prior()[0] - log_prior(spec, s.lexicon(0), tax);
        for (std::size_t i = 0; i < s.size(); ++i)
            CHECK(s.log_prior()[i] - log_prior(spec, s.lexicon(i), tax) == doctest::Approx(shift).epsilon(1e-9));
    }
}

TEST_CASE("log prior examples") {
    const Taxonomy tax = Taxonomy::single_branch();
    const Lexicon four({Meaning::node(0), Meaning::node(1), Meaning::node(2), Meaning::node(3), Meaning::empty()});
    CHECK(log_prior(TaxonomyPartition{}, four, tax) == -4.0);
    const Lexicon clash({Meaning::node(4), Meaning::node(0), Meaning::node(5), Meaning::empty(), Meaning::empty()});
    CHECK(std::isinf(log_prior(TaxonomyPartition{}, clash, tax)));
    const Lexicon l11({Meaning::node(0), Meaning::node(0), Meaning::node(1), Meaning::node(1)});
    CHECK(log_prior(reduction_prior(), l11, Taxonomy::flat(2)) ==
          doctest::Approx(2 * std::log(0.55) + 2 * std::log(0.55)));
}

TEST_CASE("reduction prior identities") {
    const Taxonomy tax = Taxonomy::flat(2);
    const LexiconSpace s = enumerate_space(reduction_prior(), 4, tax);
    const auto probs = s.prior_probs();
    double both_to_target = 0.0, contradiction = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const Lexicon& lex = s.lexicon(i);
        if (lex[0] == Meaning::node(0) && lex[1] == Meaning::node(0)) both_to_target += probs[i];
        if (is_contradiction(lex, Utterance{0, 1}, tax.universe(), tax)) contradiction += probs[i];
    }
    CHECK(both_to_target == doctest::Approx(0.3025).epsilon(1e-12));
    CHECK(contradiction == doctest::Approx(0.495).epsilon(1e-12));
}

TEST_CASE("collapsed Dirichlet-multinomial prior") {
    const std::vector<double> half{0.5, 0.5};
    CHECK(collapsed_hier_logprior(half, 2.0, std::vector<int>{}) == 0.0);
    CHECK(collapsed_hier_logprior(half, 2.0, std::vector<int>{1}) == doctest::Approx(std::log(0.5)));
    const std::vector<double> a{1.0 / 2.5, 1.5 / 2.5};
    CHECK(collapsed_hier_logprior(a, 2.0, std::vector<int>{0}) == doctest::Approx(std::log(0.4)));
    CHECK_THROWS_AS(collapsed_hier_logprior(std::vector<double>{0.0, 1.0}, 2.0, std::vector<int>{0}), DomainError);
    CHECK_THROWS_AS(collapsed_hier_logprior(half, 0.0, std::vector<int>{0}), DomainError);
}

TEST_CASE("collapsed prior matches a Monte Carlo oracle sampling Theta") {
    // P(phi_1 = 0, phi_2 = 0, phi_3 = 1) with Theta ~ Dirichlet(lambda * alpha)
    const std::vector<double> a{0.4, 0.6};
    const double lambda = 2.0;
    std::mt19937_64 gen(7);
    std::gamma_distribution<double> g0(lambda * a[0]), g1(lambda * a[1]);
    const int draws = 400000;
    double first = 0.0, seq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double x = g0(gen), y = g1(gen);
        const double t = x / (x + y);
        first += t;
        seq += t * t * (1 - t);
    }
    CHECK(first / draws == doctest::Approx(std::exp(collapsed_hier_logprior(a, lambda, std::vector<int>{0}))).epsilon(0.01));
    CHECK(seq / draws == doctest::Approx(std::exp(collapsed_hier_logprior(a, lambda, std::vector<int>{0, 0, 1}))).epsilon(0.02));
}

TEST_CASE("collapsed prior is exchangeable and rich-get-richer") {
    const std::vector<double> a{0.2, 0.3, 0.5};
    std::vector<int> xs{0, 2, 2, 1, 0};
    const double base = collapsed_hier_logprior(a, 1.7, xs);
    std::sort(xs.begin(), xs.end());
    do {
        CHECK(collapsed_hier_logprior(a, 1.7, xs) == doctest::Approx(base).epsilon(1e-12));
    } while (std::next_permutation(xs.begin(), xs.end()));

    for (int n0 = 0; n0 < 3; ++n0)
        for (int n1 = 0; n1 < 3; ++n1)
            for (int j = 0; j < 3; ++j) {
                std::vector<int> d;
                d.insert(d.end(), static_cast<std::size_t>(n0), 0);
                d.insert(d.end(), static_cast<std::size_t>(n1), 1);
                auto pred = [&](std::vector<int> data) {
                    const double before = collapsed_hier_logprior(a, 1.7, data);
                    data.push_back(j);
                    return std::exp(collapsed_hier_logprior(a, 1.7, data) - before);
                };
                std::vector<int> more = d;
                more.push_back(j);
                CHECK(pred(more) > pred(d));
            }
}

TEST_CASE("alpha grid") {
    const std::vector<double> hyper{1.0, 1.5};
    const AlphaGrid g = make_alpha_grid(hyper, 21);
    CHECK(g.points.size() == 21);
    CHECK(sum_exp(g.log_weights) == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& p : g.points) {
        CHECK(p[0] > 0.0);
        CHECK(p[1] > 0.0);
        CHECK(p[0] + p[1] == doctest::Approx(1.0));
    }
    // the grid mean approximates the Dirichlet(1, 1.5) mean of 0.4
    const BiasedCategorical pp = prior_predictive(HierarchicalDM{2.0, {{1.0, 1.5}}, 21});
    CHECK(pp.probs[0][0] == doctest::Approx(0.4).epsilon(0.02));
    CHECK(make_alpha_grid(std::vector<double>{1, 1, 1}, 5).points.size() == 15);
    CHECK_THROWS_AS(make_alpha_grid(hyper, 2), DomainError);
}

TEST_CASE("enumeration cap") {
    CHECK_THROWS_AS(enumerate_space(UnconstrainedExtension{}, 8, Taxonomy::single_branch(), 1000), SpaceTooLarge);
}

TEST_CASE("invalid priors are rejected") {
    CHECK_THROWS_AS(validate_prior(BiasedCategorical{{{0.6, 0.6}}}, 1, Taxonomy::flat(2)), DomainError);
    CHECK_THROWS_AS(validate_prior(BiasedCategorical{{{0.5, 0.5}}}, 2, Taxonomy::flat(2)), DomainError);
    CHECK_THROWS_AS(validate_prior(HierarchicalDM{0.0, {{1, 1}}, 21}, 1, Taxonomy::flat(2)), DomainError);
    CHECK_THROWS_AS(validate_prior(HierarchicalDM{2.0, {{1, 1}}, 2}, 1, Taxonomy::flat(2)), DomainError);
}

TEST_CASE("belief marginals") {
    const auto space = std::make_shared<const LexiconSpace>(
        enumerate_space(BiasedCategorical{{{0.7, 0.3}, {0.5, 0.5}}}, 2, Taxonomy::flat(2)));
    const LexiconBeliefs b = LexiconBeliefs::prior(space);
    const auto m = b.primitive_marginal(0, 2);
    REQUIRE(m.size() == 3);
    CHECK(m[0] == doctest::Approx(0.7));
    CHECK(m[1] == doctest::Approx(0.3));
    CHECK(m[2] == 0.0);
    CHECK(b.prob_meaning(0, Meaning::node(0)) == doctest::Approx(0.7));
    CHECK(b.entropy() > 0.0);
}
