#include "chai/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace chai {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
T get_field(const json& obj, const std::string& key, const std::string& path) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(path, std::string("expected ") + (std::is_same_v<T, std::string> ? "a string" : "a number"));
    }
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "config" : path, "expected an object");
    for (const auto& [k, _] : obj.items())
        if (!known.count(k)) throw ConfigError(path.empty() ? k : path + "." + k, "unknown key");
}

std::string candidates_name(CandidateSet c) { return c == CandidateSet::singles ? "singles" : "singles_and_pairs"; }

std::string beliefs_name(BeliefRows b) {
    switch (b) {
        case BeliefRows::all: return "all";
        case BeliefRows::final: return "final";
        case BeliefRows::none: return "none";
    }
    return "?";
}

std::vector<std::vector<double>> matrix_field(const json& obj, const std::string& key, const std::string& path) {
    try {
        return obj.at(key).get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
        throw ConfigError(path, "expected an array of number arrays");
    }
}

std::vector<double> vector_field(const json& obj, const std::string& key, const std::string& path) {
    try {
        return obj.at(key).get<std::vector<double>>();
    } catch (const json::exception&) {
        throw ConfigError(path, "expected an array of numbers");
    }
}

int default_n(SimId sim) {
    switch (sim) {
        case SimId::sim11:
        case SimId::sim12: return 1000;
        case SimId::sim21: return 48;
        case SimId::sim31: return 400;
    }
    return 1;
}

}  // namespace

nlohmann::json prior_to_json(const PriorSpec& prior) {
    struct V {
        json operator()(const BiasedCategorical& b) const { return {{"type", "biased_categorical"}, {"probs", b.probs}}; }
        json operator()(const TaxonomyPartition&) const { return {{"type", "taxonomy_partition"}}; }
        json operator()(const UnconstrainedExtension&) const { return {{"type", "unconstrained_extension"}}; }
        json operator()(const FullCoverage&) const { return {{"type", "full_coverage"}}; }
        json operator()(const HierarchicalDM& h) const {
            return {{"type", "hierarchical_dm"}, {"lambda", h.lambda}, {"hyper", h.hyper}, {"grid", h.grid}};
        }
    };
    return std::visit(V{}, prior);
}

PriorSpec prior_from_json(const nlohmann::json& doc, const std::string& field) {
    if (!doc.is_object() || !doc.contains("type")) throw ConfigError(field + ".type", "missing prior type");
    const auto type = get_field<std::string>(doc, "type", field + ".type");
    if (type == "biased_categorical") {
        reject_unknown(doc, {"type", "probs"}, field);
        return BiasedCategorical{matrix_field(doc, "probs", field + ".probs")};
    }
    if (type == "taxonomy_partition") {
        reject_unknown(doc, {"type"}, field);
        return TaxonomyPartition{};
    }
    if (type == "unconstrained_extension") {
        reject_unknown(doc, {"type"}, field);
        return UnconstrainedExtension{};
    }
    if (type == "full_coverage") {
        reject_unknown(doc, {"type"}, field);
        return FullCoverage{};
    }
    if (type == "hierarchical_dm") {
        reject_unknown(doc, {"type", "lambda", "hyper", "grid"}, field);
        HierarchicalDM h;
        if (doc.contains("lambda")) h.lambda = get_field<double>(doc, "lambda", field + ".lambda");
        if (doc.contains("grid")) h.grid = get_field<int>(doc, "grid", field + ".grid");
        h.hyper = matrix_field(doc, "hyper", field + ".hyper");
        return h;
    }
    throw ConfigError(field + ".type", "unknown prior type '" + type + "'");
}

RunConfig default_config(SimId sim, Condition condition) {
    const ExperimentSpec s = default_spec(sim, condition);
    RunConfig c;
    c.sim = sim;
    c.condition = s.condition;
    c.models = {sim == SimId::sim21 ? Pooling::partial : Pooling::complete};
    c.params = s.params;
    c.prior = s.prior;
    c.gibbs = s.gibbs;
    c.domain = s.domain;
    c.n = default_n(sim);
    return c;
}

RunConfig config_from_json(const nlohmann::json& doc) {
    reject_unknown(doc, {"sim", "condition", "models", "params", "prior", "gibbs", "domain", "n", "seed", "out_dir",
                         "bootstrap_reps", "beliefs", "sweep"},
                   "");
    SimId sim = SimId::sim11;
    Condition condition = Condition::none;
    try {
        if (doc.contains("sim")) sim = sim_from_string(get_field<std::string>(doc, "sim", "sim"));
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        throw ConfigError("sim", e.what());
    }
    try {
        if (doc.contains("condition")) condition = condition_from_string(get_field<std::string>(doc, "condition", "condition"));
    } catch (const ConfigError&) {
        throw;
    } catch (const DomainError& e) {
        throw ConfigError("condition", e.what());
    }
    if ((sim == SimId::sim31) != (condition != Condition::none) && doc.contains("condition"))
        throw ConfigError("condition", "sim31 needs coarse, fine or mixed; other sims need none");
    RunConfig c = default_config(sim, condition);

    if (doc.contains("models")) {
        c.models.clear();
        if (!doc["models"].is_array() || doc["models"].empty()) throw ConfigError("models", "expected a nonempty array");
        for (const auto& m : doc["models"]) {
            if (!m.is_string()) throw ConfigError("models", "expected model names");
            try {
                c.models.push_back(pooling_from_string(m.get<std::string>()));
            } catch (const DomainError& e) {
                throw ConfigError("models", e.what());
            }
        }
    }
    if (doc.contains("params")) {
        const json& p = doc["params"];
        reject_unknown(p, {"alpha_s", "alpha_l", "w_c", "beta", "epsilon", "candidates"}, "params");
        for (auto [key, dst] : {std::pair{"alpha_s", &c.params.alpha_s}, std::pair{"alpha_l", &c.params.alpha_l},
                                std::pair{"w_c", &c.params.w_c}, std::pair{"beta", &c.params.beta},
                                std::pair{"epsilon", &c.params.epsilon}})
            if (p.contains(key)) *dst = get_field<double>(p, key, std::string("params.") + key);
        if (p.contains("candidates")) {
            const auto name = get_field<std::string>(p, "candidates", "params.candidates");
            if (name == "singles") c.params.candidates = CandidateSet::singles;
            else if (name == "singles_and_pairs") c.params.candidates = CandidateSet::singles_and_pairs;
            else throw ConfigError("params.candidates", "expected singles or singles_and_pairs");
        }
    }
    try {
        c.params.validate();
    } catch (const DomainError& e) {
        throw ConfigError("params", e.what());
    }
    if (doc.contains("domain")) {
        try {
            c.domain = domain_from_json(doc["domain"]);
        } catch (const std::exception& e) {
            throw ConfigError("domain", e.what());
        }
    }
    if (doc.contains("prior")) c.prior = prior_from_json(doc["prior"]);
    if (doc.contains("gibbs")) {
        const json& g = doc["gibbs"];
        reject_unknown(g, {"sweeps", "burn_in"}, "gibbs");
        if (g.contains("sweeps")) c.gibbs.sweeps = get_field<int>(g, "sweeps", "gibbs.sweeps");
        if (g.contains("burn_in")) c.gibbs.burn_in = get_field<int>(g, "burn_in", "gibbs.burn_in");
        if (!(c.gibbs.sweeps > c.gibbs.burn_in && c.gibbs.burn_in >= 0))
            throw ConfigError("gibbs", "sweeps must exceed burn_in, and burn_in must be >= 0");
    }
    if (doc.contains("n")) c.n = get_field<int>(doc, "n", "n");
    if (c.n < 1) throw ConfigError("n", "must be >= 1");
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned() && !(doc["seed"].is_number_integer() && doc["seed"].get<long long>() >= 0))
            throw ConfigError("seed", "expected a non-negative integer");
        c.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("out_dir")) c.out_dir = get_field<std::string>(doc, "out_dir", "out_dir");
    if (doc.contains("bootstrap_reps")) c.bootstrap_reps = get_field<int>(doc, "bootstrap_reps", "bootstrap_reps");
    if (c.bootstrap_reps < 1) throw ConfigError("bootstrap_reps", "must be >= 1");
    if (doc.contains("beliefs")) {
        const auto b = get_field<std::string>(doc, "beliefs", "beliefs");
        if (b == "all") c.beliefs = BeliefRows::all;
        else if (b == "final") c.beliefs = BeliefRows::final;
        else if (b == "none") c.beliefs = BeliefRows::none;
        else throw ConfigError("beliefs", "expected all, final or none");
    }
    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        reject_unknown(s, {"alpha", "beta", "w_c", "priors"}, "sweep");
        SweepAxes axes;
        if (s.contains("alpha")) axes.alpha = vector_field(s, "alpha", "sweep.alpha");
        if (s.contains("beta")) axes.beta = vector_field(s, "beta", "sweep.beta");
        if (s.contains("w_c")) axes.w_c = vector_field(s, "w_c", "sweep.w_c");
        if (s.contains("priors")) {
            if (!s["priors"].is_array()) throw ConfigError("sweep.priors", "expected an array");
            for (std::size_t i = 0; i < s["priors"].size(); ++i)
                axes.priors.push_back(prior_from_json(s["priors"][i], "sweep.priors[" + std::to_string(i) + "]"));
        }
        for (auto [name, axis] : {std::pair{"alpha", &axes.alpha}, std::pair{"beta", &axes.beta}, std::pair{"w_c", &axes.w_c}})
            if (axis->empty()) throw ConfigError(std::string("sweep.") + name, "axis needs at least one value");
        c.sweep = axes;
    }
    experiment_specs(c);  // surfaces cross-field problems with a field name
    return c;
}

nlohmann::json config_to_json(const RunConfig& c) {
    json models = json::array();
    for (Pooling m : c.models) models.push_back(std::string(to_string(m)));
    json doc = {
        {"sim", std::string(to_string(c.sim))},
        {"condition", std::string(to_string(c.condition))},
        {"models", models},
        {"params",
         {{"alpha_s", c.params.alpha_s},
          {"alpha_l", c.params.alpha_l},
          {"w_c", c.params.w_c},
          {"beta", c.params.beta},
          {"epsilon", c.params.epsilon},
          {"candidates", candidates_name(c.params.candidates)}}},
        {"prior", prior_to_json(c.prior)},
        {"gibbs", {{"sweeps", c.gibbs.sweeps}, {"burn_in", c.gibbs.burn_in}}},
        {"domain", domain_to_json(c.domain)},
        {"n", c.n},
        {"seed", c.seed},
        {"out_dir", c.out_dir},
        {"bootstrap_reps", c.bootstrap_reps},
        {"beliefs", beliefs_name(c.beliefs)},
    };
    if (c.sweep) {
        json priors = json::array();
        for (const auto& p : c.sweep->priors) priors.push_back(prior_to_json(p));
        doc["sweep"] = {{"alpha", c.sweep->alpha}, {"beta", c.sweep->beta}, {"w_c", c.sweep->w_c}, {"priors", priors}};
    }
    return doc;
}

std::vector<ExperimentSpec> experiment_specs(const RunConfig& c) {
    std::vector<ExperimentSpec> out;
    for (Pooling m : c.models) {
        ExperimentSpec s;
        s.sim = c.sim;
        s.condition = c.condition;
        s.pooling = m;
        s.params = c.params;
        s.prior = c.prior;
        s.gibbs = c.gibbs;
        s.domain = c.domain;
        try {
            validate_prior(s.prior, s.domain.vocabulary.size(), s.domain.taxonomy);
        } catch (const std::exception& e) {
            throw ConfigError("prior", e.what());
        }
        try {
            s.validate();
        } catch (const std::exception& e) {
            const std::string msg = e.what();
            const auto colon = msg.find(':');
            throw ConfigError(colon == std::string::npos ? "config" : msg.substr(0, colon),
                              colon == std::string::npos ? msg : msg.substr(colon + 2));
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "";
    if (v == 0.0) return "0";  // also folds -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

const std::string& leaf_name(const Taxonomy& tax, Referent r) { return tax.node(r).name; }

Referent leaf_by_name(const Taxonomy& tax, const std::string& name) {
    for (int i = 0; i < tax.leaf_count(); ++i)
        if (tax.node(i).name == name) return i;
    throw DomainError("unknown referent '" + name + "'");
}

std::string meaning_name(const Taxonomy& tax, Meaning m) { return m.is_empty() ? "empty" : tax.node(m.node_id()).name; }

Meaning meaning_by_name(const Taxonomy& tax, const std::string& name) {
    if (name == "empty") return Meaning::empty();
    for (const auto& n : tax.nodes())
        if (n.name == name) return Meaning::node(n.id);
    throw DomainError("unknown meaning '" + name + "'");
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

void expect_header(std::istream& is, const std::string& header) {
    std::string line;
    if (!std::getline(is, line)) throw DomainError("missing CSV header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != header) throw DomainError("unexpected CSV header '" + line + "'");
}

int to_int(const std::string& s) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DomainError("bad integer '" + s + "'");
    return v;
}

double to_double(const std::string& s) {
    if (s.empty()) return kNaN;
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw DomainError("bad number '" + s + "'");
    return v;
}

void check_field(const std::string& s) {
    if (s.find_first_of(",\n\r\"") != std::string::npos) throw DomainError("CSV field contains a separator: " + s);
}

constexpr const char* kTrialsHeader =
    "sim,condition,model,trajectory,partner_pair,trial,block,speaker,listener,target,utterance,response,correct,utt_len";
constexpr const char* kBeliefsHeader = "trajectory,trial,agent,primitive,meaning,prob";
constexpr const char* kSummaryHeader = "sim,condition,model,block,metric,value,ci_lo,ci_hi";
constexpr const char* kSweepHeader = "alpha,beta,w_c,metric,mean,t,p";

}  // namespace

void write_trials_csv(std::ostream& os, const BatchResult& batch, bool header) {
    const auto& spec = batch.spec;
    const Taxonomy& tax = spec.domain.taxonomy;
    const std::string prefix = std::string(to_string(spec.sim)) + "," + std::string(to_string(spec.condition)) + "," +
                               std::string(to_string(spec.pooling)) + ",";
    if (header) os << kTrialsHeader << '\n';
    for (const auto& tr : batch.trajectories) {
        for (const auto& r : tr.records) {
            const std::string utt = spec.domain.vocabulary.encode(r.utterance);
            check_field(utt);
            check_field(leaf_name(tax, r.target));
            os << prefix << r.trajectory << ',' << r.partner_pair << ',' << r.trial << ',' << r.block << ','
               << r.speaker << ',' << r.listener << ',' << leaf_name(tax, r.target) << ',' << utt << ','
               << leaf_name(tax, r.response) << ',' << (r.correct ? 1 : 0) << ',' << r.utterance.length() << '\n';
        }
    }
}

void write_beliefs_csv(std::ostream& os, const BatchResult& batch, BeliefRows which, bool header) {
    const Taxonomy& tax = batch.spec.domain.taxonomy;
    const Vocabulary& vocab = batch.spec.domain.vocabulary;
    if (header) os << kBeliefsHeader << '\n';
    if (which == BeliefRows::none) return;
    for (const auto& tr : batch.trajectories) {
        int last = -1;
        for (const auto& s : tr.beliefs) last = std::max(last, s.trial);
        for (const auto& s : tr.beliefs) {
            if (which == BeliefRows::final && s.trial != last) continue;
            for (std::size_t p = 0; p < s.marginals.size(); ++p) {
                const auto& m = s.marginals[p];
                for (std::size_t i = 0; i < m.size(); ++i) {
                    const Meaning meaning = i + 1 == m.size() ? Meaning::empty() : Meaning::node(static_cast<NodeId>(i));
                    os << s.trajectory << ',' << s.trial << ',' << s.agent << ','
                       << vocab.name(static_cast<PrimitiveId>(p)) << ',' << meaning_name(tax, meaning) << ','
                       << format_number(m[i]) << '\n';
                }
            }
        }
    }
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << kSummaryHeader << '\n';
    for (const auto& r : rows)
        os << r.sim << ',' << r.condition << ',' << r.model << ',' << r.block << ',' << r.metric << ','
           << format_number(r.value) << ',' << format_number(r.ci_lo) << ',' << format_number(r.ci_hi) << '\n';
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kSweepHeader << '\n';
    for (const auto& r : rows) {
        check_field(r.metric);
        os << format_number(r.alpha) << ',' << format_number(r.beta) << ',' << format_number(r.w_c) << ','
           << r.metric << ',' << format_number(r.mean) << ',' << format_number(r.t) << ',' << format_number(r.p)
           << '\n';
    }
}

std::vector<TrialRow> read_trials_csv(std::istream& is, const DomainSpec& domain) {
    expect_header(is, kTrialsHeader);
    std::vector<TrialRow> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 14) throw DomainError("trials row has " + std::to_string(f.size()) + " fields");
        TrialRow row{f[0], f[1], f[2], {}};
        TrialRecord& r = row.record;
        r.trajectory = to_int(f[3]);
        r.partner_pair = f[4];
        r.trial = to_int(f[5]);
        r.block = to_int(f[6]);
        r.speaker = to_int(f[7]);
        r.listener = to_int(f[8]);
        r.target = leaf_by_name(domain.taxonomy, f[9]);
        r.utterance = domain.vocabulary.decode(f[10]);
        r.response = leaf_by_name(domain.taxonomy, f[11]);
        r.correct = to_int(f[12]) != 0;
        if (to_int(f[13]) != r.utterance.length()) throw DomainError("utt_len disagrees with the utterance");
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<BeliefRow> read_beliefs_csv(std::istream& is, const DomainSpec& domain) {
    expect_header(is, kBeliefsHeader);
    std::vector<BeliefRow> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 6) throw DomainError("beliefs row has " + std::to_string(f.size()) + " fields");
        out.push_back({to_int(f[0]), to_int(f[1]), to_int(f[2]), domain.vocabulary.id_of(f[3]),
                       meaning_by_name(domain.taxonomy, f[4]), to_double(f[5])});
    }
    return out;
}

std::vector<SummaryRow> read_summary_csv(std::istream& is) {
    expect_header(is, kSummaryHeader);
    std::vector<SummaryRow> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto f = split_csv(line);
        if (f.size() != 8) throw DomainError("summary row has " + std::to_string(f.size()) + " fields");
        out.push_back({f[0], f[1], f[2], to_int(f[3]), f[4], to_double(f[5]), to_double(f[6]), to_double(f[7])});
    }
    return out;
}

std::vector<SummaryRow> summarize_records(const std::vector<TrialRow>& trials, const std::vector<BeliefRow>& beliefs,
                                          const DomainSpec& domain, int bootstrap_reps, std::uint64_t seed) {
    // Regroup into one batch per (sim, condition, model).
    std::map<std::tuple<std::string, std::string, std::string>, std::map<int, TrajectoryResult>> groups;
    for (const auto& t : trials) groups[{t.sim, t.condition, t.model}][t.record.trajectory].records.push_back(t.record);

    const int nodes = domain.taxonomy.node_count();
    const int prims = domain.vocabulary.size();
    std::map<std::tuple<int, int, int>, BeliefSnapshot> snaps;
    for (const auto& b : beliefs) {
        auto& s = snaps[{b.trajectory, b.trial, b.agent}];
        if (s.marginals.empty()) {
            s = {b.trajectory, b.trial, b.agent, -1,
                 std::vector<std::vector<double>>(static_cast<std::size_t>(prims),
                                                  std::vector<double>(static_cast<std::size_t>(nodes + 1), 0.0))};
        }
        const int idx = b.meaning.is_empty() ? nodes : b.meaning.node_id();
        s.marginals[static_cast<std::size_t>(b.primitive)][static_cast<std::size_t>(idx)] = b.prob;
    }

    std::vector<SummaryRow> rows;
    for (auto& [key, trajs] : groups) {
        const auto& [sim, condition, model] = key;
        ExperimentSpec spec = default_spec(sim_from_string(sim), condition_from_string(condition),
                                           pooling_from_string(model));
        spec.domain = domain;
        BatchResult batch{spec, seed, {}};
        for (auto& [id, tr] : trajs) {
            for (const auto& [skey, s] : snaps)
                if (std::get<0>(skey) == id) tr.beliefs.push_back(s);
            batch.trajectories.push_back(std::move(tr));
        }
        auto part = summarize_batch(batch, bootstrap_reps, seed);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

std::vector<std::string> figure_ids() { return {"fig3a", "fig3b", "fig6a", "fig6b", "fig8a", "fig8b", "fig9"}; }

nlohmann::json emit_plotspec(const std::vector<SummaryRow>& rows, const std::string& figure) {
    struct Fig {
        std::string title, x_label, y_label, mark;
        std::vector<std::string> metrics;
        std::vector<std::string> sims;
        bool series_by_metric;  // one series per metric (and condition/model) rather than per model
    };
    static const std::map<std::string, Fig> figs = {
        {"fig3a", {"Listener accuracy by block", "repetition block", "accuracy", "line", {"accuracy"}, {"sim11", "sim12"}, false}},
        {"fig3b", {"Utterance length by block", "repetition block", "words per utterance", "line", {"length"}, {"sim11", "sim12"}, false}},
        {"fig6a", {"Probability of a two-word utterance", "trial", "P(two words)", "line", {"long_prob"}, {"sim21"}, false}},
        {"fig6b", {"Alignment within and across dyads", "partner round", "alignment", "line", {"align_within", "align_across"}, {"sim21"}, true}},
        {"fig8a", {"Listener accuracy by context condition", "repetition block", "accuracy", "line", {"accuracy"}, {"sim31"}, false}},
        {"fig8b", {"Effective vocabulary by context condition", "repetition block", "distinct words", "line", {"vocabulary"}, {"sim31"}, false}},
        {"fig9", {"MAP meaning level of each word", "trial", "share of words", "area",
                  {"map_subordinate", "map_basic", "map_superordinate", "map_empty"}, {"sim31"}, true}},
    };
    const auto it = figs.find(figure);
    if (it == figs.end()) throw DomainError("unknown figure id '" + figure + "'");
    const Fig& f = it->second;

    json data = json::array();
    std::vector<std::tuple<std::string, std::string, std::string, std::string>> series_keys;
    for (const auto& r : rows) {
        if (std::find(f.sims.begin(), f.sims.end(), r.sim) == f.sims.end()) continue;
        if (std::find(f.metrics.begin(), f.metrics.end(), r.metric) == f.metrics.end()) continue;
        json row = {{"sim", r.sim}, {"condition", r.condition}, {"model", r.model}, {"block", r.block},
                    {"metric", r.metric}, {"value", r.value}};
        if (!std::isnan(r.ci_lo)) row["ci_lo"] = r.ci_lo;
        if (!std::isnan(r.ci_hi)) row["ci_hi"] = r.ci_hi;
        data.push_back(row);
        auto key = std::tuple(r.sim, r.condition, r.model, r.metric);
        if (std::find(series_keys.begin(), series_keys.end(), key) == series_keys.end()) series_keys.push_back(key);
    }
    json series = json::array();
    for (const auto& [sim, condition, model, metric] : series_keys) {
        std::string name = sim;
        if (condition != "none") name += " " + condition;
        if (sim == "sim21") name += " " + model;
        if (f.series_by_metric) name += " " + metric;
        series.push_back({{"name", name},
                          {"filter", {{"sim", sim}, {"condition", condition}, {"model", model}, {"metric", metric}}}});
    }
    return {{"title", f.title},
            {"x", {{"field", "block"}, {"label", f.x_label}}},
            {"y", {{"field", "value"}, {"label", f.y_label}}},
            {"series", series},
            {"mark", f.mark},
            {"data", data}};
}

}  // namespace chai
