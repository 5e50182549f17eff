#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "chai/stats.hpp"

using namespace chai;

namespace {

TrialRecord rec(int traj, int trial, int block, int speaker, int listener, Referent target, Utterance u,
                Referent response) {
    TrialRecord r;
    r.trajectory = traj;
    r.trial = trial;
    r.block = block;
    r.speaker = speaker;
    r.listener = listener;
    r.partner_pair = pair_label(speaker, listener);
    r.target = target;
    r.utterance = u;
    r.response = response;
    r.correct = target == response;
    return r;
}

std::vector<double> point_mass(int nodes, int at) {
    std::vector<double> m(static_cast<std::size_t>(nodes) + 1, 0.0);
    m[static_cast<std::size_t>(at < 0 ? nodes : at)] = 1.0;
    return m;
}

SpeakerSnapshot snap(int trial, int agent, double before, double after) {
    SpeakerSnapshot s;
    s.trial = trial;
    s.agent = agent;
    s.long_prob = before;
    s.long_prob_after = after;
    return s;
}

}  // namespace

TEST_CASE("block metrics") {
    std::vector<TrialRecord> rs{
        rec(0, 0, 0, 0, 1, 0, Utterance{0, 1}, 0), rec(0, 1, 0, 0, 1, 1, Utterance{2}, 0),
        rec(0, 2, 1, 1, 0, 0, Utterance{0}, 0),    rec(0, 3, 1, 1, 0, 1, Utterance{0}, 1),
        rec(1, 0, 0, 0, 1, 0, Utterance{3}, 0),    rec(1, 1, 0, 0, 1, 1, Utterance{3}, 1),
    };
    const auto b = block_metrics(rs);
    REQUIRE(b.size() == 2);
    CHECK(b[0].accuracy == doctest::Approx(0.75));
    CHECK(b[0].length == doctest::Approx(5.0 / 4));
    CHECK(b[0].vocabulary == doctest::Approx((3 + 1) / 2.0));
    CHECK(b[1].accuracy == 1.0);
    CHECK(b[1].vocabulary == 1.0);
    CHECK(b[0].trials == 4);

    std::reverse(rs.begin(), rs.end());
    const auto r = block_metrics(rs);
    CHECK(r[0].accuracy == b[0].accuracy);
    CHECK(r[0].length == b[0].length);
    CHECK(r[0].vocabulary == b[0].vocabulary);
}

TEST_CASE("MAP meanings and levels") {
    const Taxonomy tax = Taxonomy::single_branch();
    const int nodes = tax.node_count();
    // ties go to the smaller extension, then the lower id
    std::vector<double> tie(static_cast<std::size_t>(nodes) + 1, 0.0);
    tie[6] = tie[4] = tie[1] = 0.3;
    CHECK(map_meaning(tie, tax) == Meaning::node(1));
    tie[1] = 0.0;
    CHECK(map_meaning(tie, tax) == Meaning::node(4));
    std::vector<double> empty_tie(static_cast<std::size_t>(nodes) + 1, 0.0);
    empty_tie[0] = empty_tie[static_cast<std::size_t>(nodes)] = 0.5;
    CHECK(map_meaning(empty_tie, tax).is_empty());

    // four words on the leaves and four empty words
    std::vector<std::vector<double>> lex;
    for (int p = 0; p < 8; ++p) lex.push_back(point_mass(nodes, p < 4 ? p : -1));
    const LevelShares sh = map_levels(lex, tax);
    CHECK(sh.subordinate == 0.5);
    CHECK(sh.empty == 0.5);
    CHECK(sh.basic == 0.0);
    CHECK(sh.superordinate == 0.0);
}

TEST_CASE("alignment") {
    CHECK(utterance_overlap(Utterance{0}, Utterance{0}) == 1.0);
    CHECK(utterance_overlap(Utterance{0}, Utterance{1}) == 0.0);
    CHECK(utterance_overlap(Utterance{0, 1}, Utterance{1, 2}) == 1.0);

    // round 0: pairs 0-1 and 2-3; 0 and 1 agree, 2 and 3 agree, dyads differ
    std::vector<TrialRecord> rs{
        rec(0, 0, 0, 0, 1, 0, Utterance{0}, 0), rec(0, 0, 0, 2, 3, 0, Utterance{1}, 0),
        rec(0, 1, 0, 1, 0, 0, Utterance{0}, 0), rec(0, 1, 0, 3, 2, 0, Utterance{1}, 0),
    };
    const auto a = alignment(rs, 8);
    REQUIRE(a.size() == 1);
    CHECK(a[0].within == 1.0);
    CHECK(a[0].across == 0.0);

    // swapping every record's speaker and listener labels within a pair leaves alignment unchanged
    std::vector<TrialRecord> mirrored = rs;
    for (auto& r : mirrored) std::swap(r.speaker, r.listener);
    const auto m = alignment(mirrored, 8);
    CHECK(m[0].within == a[0].within);
    CHECK(m[0].across == a[0].across);
}

TEST_CASE("swap statistics") {
    // one agent: P(long) drops to 0.2 with partner 1, jumps to 0.6 with partner 2
    std::vector<SpeakerSnapshot> s;
    for (int t = 0; t < 24; ++t) s.push_back(snap(t, 0, t == 8 ? 0.6 : (t == 16 ? 0.5 : (t == 0 ? 0.9 : 0.3)), 0.2));
    const SwapStats st = swap_stats(s, 8);
    CHECK(st.reversion == doctest::Approx(0.6 - 0.2));
    CHECK(st.reversion_pretrial == doctest::Approx(0.6 - 0.3));
    CHECK(st.generalization == doctest::Approx(0.9 - 0.5));
    CHECK(st.reversion > 0);

    s.erase(s.begin() + 16);
    CHECK_THROWS_AS(swap_stats(s, 8), DomainError);
    CHECK_THROWS_AS(swap_stats({}, 8), DomainError);
}

TEST_CASE("one-sample t-test") {
    const std::vector<double> v{1, 2, 3, 4, 5};
    const TTest t = one_sample_t(v);
    // reference values from scipy.stats.ttest_1samp
    CHECK(t.t == doctest::Approx(4.242640687119285).epsilon(1e-12));
    CHECK(t.p == doctest::Approx(0.013235599563682695).epsilon(1e-9));
    CHECK(t.n == 5);

    const TTest z = one_sample_t(std::vector<double>{-2, -1, 1, 2});
    CHECK(z.t == doctest::Approx(0.0));
    CHECK(z.p == doctest::Approx(1.0));

    const TTest d = one_sample_t(std::vector<double>{3, 3, 3});
    CHECK(d.degenerate);
    CHECK(std::isnan(d.t));
    CHECK_THROWS_AS(one_sample_t(std::vector<double>{1}), DomainError);
}

TEST_CASE("bootstrap intervals") {
    const auto stat = [](std::span<const double> xs) { return mean(xs); };
    const std::vector<double> c(10, 2.5);
    const auto [lo, hi] = bootstrap_ci(c, stat, 1000, 0.95, 1);
    CHECK(lo == 2.5);
    CHECK(hi == 2.5);

    const std::vector<double> v{0.1, 0.9, 0.4, 0.3, 0.8, 0.5, 0.2, 0.7};
    const auto a = bootstrap_ci(v, stat, 1000, 0.95, 7);
    const auto b = bootstrap_ci(v, stat, 1000, 0.95, 7);
    CHECK(a == b);
    CHECK(a.first <= mean(v));
    CHECK(a.second >= mean(v));
    CHECK(a.first < a.second);
    CHECK_THROWS_AS(bootstrap_ci({}, stat), DomainError);
}

TEST_CASE("batch summaries") {
    const Experiment e(default_spec(SimId::sim21, Condition::none, Pooling::none));
    const BatchResult batch = e.run_batch(3, 0, 1);
    const auto rows = summarize_batch(batch, 50, 0);
    for (const char* m : {"accuracy", "length", "vocabulary"}) CHECK(find_row(rows, m, 0).has_value());
    CHECK(find_row(rows, "long_prob", 23).has_value());
    CHECK(find_row(rows, "align_within", 2).has_value());
    CHECK(find_row(rows, "align_across", 0).has_value());
    const auto gen = find_row(rows, "generalization", -1);
    REQUIRE(gen.has_value());
    CHECK(gen->value == 0.0);  // no pooling never generalizes
    CHECK(find_row(rows, "reversion_p", -1).has_value());
    CHECK(find_row(rows, "reversion_pretrial", -1).has_value());
    for (const auto& r : rows) {
        CHECK(r.sim == "sim21");
        CHECK(r.model == "none");
    }

    const Experiment t(default_spec(SimId::sim31, Condition::fine));
    const auto trows = summarize_batch(t.run_batch(2, 0, 1), 20, 0);
    const auto sub = find_row(trows, "map_subordinate", 47);
    REQUIRE(sub.has_value());
    const auto basic = find_row(trows, "map_basic", 47), sup = find_row(trows, "map_superordinate", 47),
               emp = find_row(trows, "map_empty", 47);
    CHECK(sub->value + basic->value + sup->value + emp->value == doctest::Approx(1.0));
}
