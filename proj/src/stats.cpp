#include "chai/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

#include <boost/math/special_functions/beta.hpp>

#include "chai/random.hpp"

namespace chai {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double mean(std::span<const double> values) {
    if (values.empty()) return kNaN;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

std::vector<BlockSummary> block_metrics(std::span<const TrialRecord> records) {
    if (records.empty()) throw DomainError("block_metrics needs at least one record");
    struct Acc {
        double correct = 0, length = 0;
        int trials = 0;
        std::map<std::pair<int, std::string>, std::set<PrimitiveId>> vocab;
    };
    std::map<int, Acc> by_block;
    for (const auto& r : records) {
        Acc& a = by_block[r.block];
        a.correct += r.correct ? 1.0 : 0.0;
        a.length += r.utterance.length();
        ++a.trials;
        auto& v = a.vocab[{r.trajectory, r.partner_pair}];
        for (PrimitiveId p : r.utterance.primitives()) v.insert(p);
    }
    std::vector<BlockSummary> out;
    for (const auto& [b, a] : by_block) {
        double vocab = 0.0;
        for (const auto& [_, s] : a.vocab) vocab += static_cast<double>(s.size());
        out.push_back({b, a.correct / a.trials, a.length / a.trials, vocab / static_cast<double>(a.vocab.size()),
                       a.trials});
    }
    return out;
}

Meaning map_meaning(std::span<const double> marginal, const Taxonomy& tax) {
    const int nodes = tax.node_count();
    if (static_cast<int>(marginal.size()) != nodes + 1) throw DomainError("marginal must cover every node plus Empty");
    int best = nodes;  // Empty
    auto key = [&](int i) {
        const int ext = i == nodes ? 0 : tax.node(i).extension.size();
        // higher probability first, then smaller extension, then lower node id (Empty last)
        return std::tuple(-marginal[static_cast<std::size_t>(i)], ext, i == nodes ? nodes : i);
    };
    for (int i = 0; i < nodes; ++i)
        if (key(i) < key(best)) best = i;
    return best == nodes ? Meaning::empty() : Meaning::node(best);
}

LevelShares map_levels(const std::vector<std::vector<double>>& marginals, const Taxonomy& tax) {
    LevelShares s;
    if (marginals.empty()) return s;
    for (const auto& m : marginals) {
        const Meaning best = map_meaning(m, tax);
        if (best.is_empty()) {
            s.empty += 1;
            continue;
        }
        switch (tax.node(best.node_id()).level) {
            case Level::subordinate: s.subordinate += 1; break;
            case Level::basic: s.basic += 1; break;
            case Level::superordinate: s.superordinate += 1; break;
        }
    }
    const double n = static_cast<double>(marginals.size());
    s.subordinate /= n;
    s.basic /= n;
    s.superordinate /= n;
    s.empty /= n;
    return s;
}

double utterance_overlap(const Utterance& a, const Utterance& b) {
    for (PrimitiveId x : a.primitives())
        for (PrimitiveId y : b.primitives())
            if (x == y) return 1.0;
    return 0.0;
}

std::vector<AlignmentRound> alignment(std::span<const TrialRecord> records, int trials_per_round) {
    if (trials_per_round < 1) throw DomainError("trials_per_round must be >= 1");
    // round -> agent -> target -> last utterance produced
    std::map<int, std::map<int, std::map<Referent, Utterance>>> said;
    std::map<int, std::set<std::pair<int, int>>> paired;
    for (const auto& r : records) {
        const int round = r.trial / trials_per_round;
        said[round][r.speaker].insert_or_assign(r.target, r.utterance);
        paired[round].insert({std::min(r.speaker, r.listener), std::max(r.speaker, r.listener)});
    }
    std::vector<AlignmentRound> out;
    for (const auto& [round, agents] : said) {
        double w_sum = 0, a_sum = 0;
        int w_n = 0, a_n = 0;
        for (auto i = agents.begin(); i != agents.end(); ++i) {
            for (auto j = std::next(i); j != agents.end(); ++j) {
                double sum = 0;
                int n = 0;
                for (const auto& [target, u] : i->second) {
                    auto it = j->second.find(target);
                    if (it == j->second.end()) continue;
                    sum += utterance_overlap(u, it->second);
                    ++n;
                }
                if (n == 0) continue;
                const bool within = paired[round].count({i->first, j->first}) != 0;
                (within ? w_sum : a_sum) += sum / n;
                ++(within ? w_n : a_n);
            }
        }
        out.push_back({round, w_n ? w_sum / w_n : kNaN, a_n ? a_sum / a_n : kNaN});
    }
    return out;
}

SwapStats swap_stats(std::span<const SpeakerSnapshot> snapshots, int trials_per_round) {
    std::map<int, std::map<int, double>> by_agent, after;  // agent -> trial -> P(long)
    for (const auto& s : snapshots) {
        by_agent[s.agent][s.trial] = s.long_prob;
        after[s.agent][s.trial] = s.long_prob_after;
    }
    if (by_agent.empty()) throw DomainError("swap_stats needs speaker snapshots");
    auto get = [](const std::map<int, double>& m, int trial) {
        auto it = m.find(trial);
        if (it == m.end()) throw DomainError("swap_stats is missing trial " + std::to_string(trial));
        return it->second;
    };
    SwapStats out;
    for (const auto& [agent, m] : by_agent) {
        const double first2 = get(m, trials_per_round);
        out.reversion += first2 - get(after[agent], trials_per_round - 1);
        out.reversion_pretrial += first2 - get(m, trials_per_round - 1);
        out.generalization += get(m, 0) - get(m, 2 * trials_per_round);
    }
    const double k = static_cast<double>(by_agent.size());
    out.reversion /= k;
    out.reversion_pretrial /= k;
    out.generalization /= k;
    return out;
}

TTest one_sample_t(std::span<const double> values) {
    const int n = static_cast<int>(values.size());
    if (n < 2) throw DomainError("t-test needs at least two values");
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    const double sd = std::sqrt(ss / (n - 1));
    TTest out;
    out.n = n;
    if (sd == 0.0 || sd <= 1e-14 * std::abs(m)) {
        out.degenerate = true;
        out.t = kNaN;
        out.p = kNaN;
        return out;
    }
    out.t = m / (sd / std::sqrt(static_cast<double>(n)));
    const double df = n - 1;
    out.p = boost::math::ibeta(df / 2.0, 0.5, df / (df + out.t * out.t));
    return out;
}

std::pair<double, double> bootstrap_ci(std::span<const double> values,
                                       const std::function<double(std::span<const double>)>& statistic, int reps,
                                       double level, std::uint64_t seed) {
    if (values.empty()) throw DomainError("bootstrap needs at least one value");
    if (reps < 1 || !(level > 0.0 && level < 1.0)) throw DomainError("bootstrap needs reps >= 1 and level in (0,1)");
    Rng rng(stream_seed(seed, {static_cast<std::uint64_t>(StreamPurpose::bootstrap)}));
    const int n = static_cast<int>(values.size());
    std::vector<double> stats(static_cast<std::size_t>(reps)), sample(values.size());
    for (int r = 0; r < reps; ++r) {
        for (int i = 0; i < n; ++i) sample[static_cast<std::size_t>(i)] = values[static_cast<std::size_t>(rng.below(n))];
        stats[static_cast<std::size_t>(r)] = statistic(sample);
    }
    std::sort(stats.begin(), stats.end());
    auto quantile = [&](double q) {
        const double pos = q * (reps - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, stats.size() - 1);
        return stats[lo] + (pos - static_cast<double>(lo)) * (stats[hi] - stats[lo]);
    };
    const double tail = (1.0 - level) / 2.0;
    return {quantile(tail), quantile(1.0 - tail)};
}

namespace {

// Collects per-trajectory values under (metric, index) keys.
class Collector {
public:
    void add(const std::string& metric, int index, double v) {
        if (std::isnan(v)) return;
        auto key = std::pair(metric, index);
        if (!values_.count(key)) order_.push_back(key);
        values_[key].push_back(v);
    }

    void emit(std::vector<SummaryRow>& rows, const SummaryRow& base, int reps, std::uint64_t seed) const {
        const std::function<double(std::span<const double>)> stat = [](std::span<const double> v) { return mean(v); };
        for (const auto& key : order_) {
            const auto& v = values_.at(key);
            SummaryRow r = base;
            r.metric = key.first;
            r.block = key.second;
            r.value = mean(v);
            std::tie(r.ci_lo, r.ci_hi) = bootstrap_ci(v, stat, reps, 0.95, seed);
            rows.push_back(r);
        }
    }

private:
    std::map<std::pair<std::string, int>, std::vector<double>> values_;
    std::vector<std::pair<std::string, int>> order_;
};

}  // namespace

std::vector<SummaryRow> summarize_batch(const BatchResult& batch, int bootstrap_reps, std::uint64_t seed) {
    const ExperimentSpec& spec = batch.spec;
    const Taxonomy& tax = spec.domain.taxonomy;
    SummaryRow base;
    base.sim = to_string(spec.sim);
    base.condition = to_string(spec.condition);
    base.model = to_string(spec.pooling);

    Collector blocks, maps, longp, align;
    std::vector<double> rev, gen, rev_pre;
    const int per_round = spec.sim == SimId::sim21 ? 4 * tax.leaf_count() : 0;
    for (const auto& tr : batch.trajectories) {
        if (tr.records.empty()) continue;
        for (const auto& b : block_metrics(tr.records)) {
            blocks.add("accuracy", b.block, b.accuracy);
            blocks.add("length", b.block, b.length);
            blocks.add("vocabulary", b.block, b.vocabulary);
        }
        if (spec.sim == SimId::sim31) {
            std::map<int, std::vector<std::vector<double>>> by_trial;
            for (const auto& s : tr.beliefs)
                for (const auto& m : s.marginals) by_trial[s.trial].push_back(m);
            for (const auto& [t, ms] : by_trial) {
                const LevelShares sh = map_levels(ms, tax);
                maps.add("map_subordinate", t, sh.subordinate);
                maps.add("map_basic", t, sh.basic);
                maps.add("map_superordinate", t, sh.superordinate);
                maps.add("map_empty", t, sh.empty);
            }
        }
        if (!tr.speaker.empty()) {
            std::map<int, std::pair<double, int>> by_trial;
            for (const auto& s : tr.speaker) {
                by_trial[s.trial].first += s.long_prob;
                ++by_trial[s.trial].second;
            }
            for (const auto& [t, sc] : by_trial) longp.add("long_prob", t, sc.first / sc.second);
        }
        if (spec.sim == SimId::sim21) {
            for (const auto& a : alignment(tr.records, per_round)) {
                align.add("align_within", a.round, a.within);
                align.add("align_across", a.round, a.across);
            }
            if (!tr.speaker.empty()) {
                const SwapStats s = swap_stats(tr.speaker, per_round);
                rev.push_back(s.reversion);
                gen.push_back(s.generalization);
                rev_pre.push_back(s.reversion_pretrial);
            }
        }
    }

    std::vector<SummaryRow> rows;
    blocks.emit(rows, base, bootstrap_reps, seed);
    maps.emit(rows, base, bootstrap_reps, seed);
    longp.emit(rows, base, bootstrap_reps, seed);
    align.emit(rows, base, bootstrap_reps, seed);
    if (spec.sim == SimId::sim21 && !rev.empty()) {
        Collector swaps;
        for (double v : rev) swaps.add("reversion", -1, v);
        for (double v : gen) swaps.add("generalization", -1, v);
        for (double v : rev_pre) swaps.add("reversion_pretrial", -1, v);
        swaps.emit(rows, base, bootstrap_reps, seed);
        for (const auto& [name, vals] : {std::pair{"reversion", &rev}, std::pair{"generalization", &gen},
                                       std::pair{"reversion_pretrial", &rev_pre}}) {
            if (vals->size() < 2) continue;
            const TTest tt = one_sample_t(*vals);
            SummaryRow r = base;
            r.block = -1;
            r.ci_lo = r.ci_hi = kNaN;
            r.metric = std::string(name) + "_t";
            r.value = tt.t;
            rows.push_back(r);
            r.metric = std::string(name) + "_p";
            r.value = tt.p;
            rows.push_back(r);
        }
    }
    return rows;
}

std::optional<SummaryRow> find_row(std::span<const SummaryRow> rows, std::string_view metric, int block) {
    for (const auto& r : rows)
        if (r.metric == metric && r.block == block) return r;
    return std::nullopt;
}

}  // namespace chai
