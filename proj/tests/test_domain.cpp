#include <doctest.h>

#include "chai/domain.hpp"

using namespace chai;

namespace {

Lexicon lex(std::initializer_list<int> nodes) {
    std::vector<Meaning> m;
    for (int n : nodes) m.push_back(n < 0 ? Meaning::empty() : Meaning::node(n));
    return Lexicon(m);
}

}  // namespace

TEST_CASE("truth values follow conjunctive semantics") {
    const Taxonomy tax = Taxonomy::flat(2);
    CHECK(truth_value(lex({0, 1}), Utterance{0}, 0, tax) == 1);
    CHECK(truth_value(lex({0, 1}), Utterance{0}, 1, tax) == 0);
    CHECK(truth_value(lex({0, 1}), Utterance{0, 1}, 0, tax) == 0);
    CHECK(truth_value(lex({0, 0}), Utterance{0, 1}, 0, tax) == 1);
    // the null referent satisfies everything
    CHECK(truth_value(lex({0, 1}), Utterance{0, 1}, kNullReferent, tax) == 1);
    CHECK(truth_value(lex({-1, -1}), Utterance{0}, kNullReferent, tax) == 1);
}

TEST_CASE("unknown primitive is a domain error") {
    const Taxonomy tax = Taxonomy::flat(2);
    CHECK_THROWS_AS(truth_value(lex({0}), Utterance{3}, 0, tax), DomainError);
}

TEST_CASE("extensions of taxonomy nodes") {
    const Taxonomy tax = Taxonomy::single_branch();
    CHECK(tax.leaf_count() == 4);
    CHECK(tax.node_count() == 7);
    CHECK(extension(Meaning::empty(), tax).empty());
    const NodeId root = tax.nodes_at(Level::superordinate).at(0);
    CHECK(extension(Meaning::node(root), tax) == tax.universe());
    const auto basics = tax.nodes_at(Level::basic);
    REQUIRE(basics.size() == 2);
    CHECK(tax.node(basics[0]).name == "blue_square");
    CHECK(extension(Meaning::node(basics[0]), tax) == ReferentSet{0, 1});
    CHECK(extension(Meaning::node(basics[1]), tax) == ReferentSet{2, 3});
    CHECK(extension(Meaning::node(2), tax) == ReferentSet{2});
    CHECK_THROWS_AS(extension(Meaning::node(99), tax), DomainError);
}

TEST_CASE("parent extensions include child extensions") {
    for (const Taxonomy& tax : {Taxonomy::single_branch(), Taxonomy::two_branch(), Taxonomy::flat(3)}) {
        for (const auto& n : tax.nodes())
            for (NodeId c : n.children) {
                CHECK(n.extension.includes(tax.node(c).extension));
                CHECK(tax.parent(c) == n.id);
            }
    }
}

TEST_CASE("contradictions") {
    const Taxonomy tax = Taxonomy::flat(2);
    const ReferentSet uni = tax.universe();
    CHECK(is_contradiction(lex({0, 1}), Utterance{0, 1}, uni, tax));
    CHECK_FALSE(is_contradiction(lex({0, 0}), Utterance{0, 1}, uni, tax));
    CHECK_FALSE(is_contradiction(lex({0, 0, 1}), Utterance{2}, uni, tax));
    // an empty conjunct is a failure to refer, not a contradiction
    CHECK_FALSE(is_contradiction(lex({0, -1}), Utterance{0, 1}, uni, tax));
    CHECK_FALSE(is_contradiction(lex({-1}), Utterance{0}, uni, tax));
}

TEST_CASE("utterances are unordered with cost equal to length") {
    CHECK(Utterance{0, 1} == Utterance{1, 0});
    CHECK(utterance_cost(Utterance{0}) == 1.0);
    CHECK(utterance_cost(Utterance{0, 1}) == 2.0);
    CHECK(utterance_cost(Utterance{1, 0}) == utterance_cost(Utterance{0, 1}));
    CHECK_THROWS_AS(Utterance({1, 1}), DomainError);
    CHECK_THROWS_AS(Utterance({0, 1, 2}), DomainError);
    CHECK_THROWS_AS(Utterance(std::span<const PrimitiveId>{}), DomainError);
}

TEST_CASE("candidate sets") {
    CHECK(candidate_utterances(4, CandidateSet::singles).size() == 4);
    const auto all = candidate_utterances(4, CandidateSet::singles_and_pairs);
    REQUIRE(all.size() == 10);
    CHECK(all[4] == Utterance{0, 1});
    CHECK(all[9] == Utterance{2, 3});
}

TEST_CASE("vocabulary encoding round-trips") {
    const Vocabulary v = Vocabulary::numbered(4);
    CHECK(v.name(0) == "u1");
    CHECK(v.encode(Utterance{2, 0}) == "u1+u3");
    CHECK(v.decode("u1+u3") == Utterance{0, 2});
    CHECK(v.decode("u4") == Utterance{3});
    CHECK_THROWS_AS(v.decode("u9"), DomainError);
}

TEST_CASE("domain documents round-trip") {
    const DomainSpec spec{Taxonomy::single_branch(), Vocabulary::numbered(8)};
    const DomainSpec back = domain_from_json(domain_to_json(spec));
    CHECK(back.taxonomy.node_count() == spec.taxonomy.node_count());
    CHECK(back.vocabulary.size() == 8);
    for (const auto& n : spec.taxonomy.nodes()) {
        CHECK(back.taxonomy.node(n.id).name == n.name);
        CHECK(back.taxonomy.node(n.id).extension == n.extension);
        CHECK(back.taxonomy.node(n.id).level == n.level);
    }
    CHECK_THROWS_AS(domain_from_json(nlohmann::json{{"leaves", {"a"}}}), DomainError);
}
