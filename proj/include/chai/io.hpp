#pragma once
// Run configuration, CSV schemas and plot specifications.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chai/stats.hpp"

namespace chai {

// A configuration problem; `field` names the offending key path.
class ConfigError : public DomainError {
public:
    ConfigError(std::string field, const std::string& what)
        : DomainError(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

enum class BeliefRows { all, final, none };

struct RunConfig {
    SimId sim = SimId::sim11;
    Condition condition = Condition::none;
    std::vector<Pooling> models{Pooling::complete};
    SimParams params;
    PriorSpec prior;
    GibbsOptions gibbs;
    DomainSpec domain{Taxonomy::flat(2), Vocabulary::numbered(2)};
    int n = 1000;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    int bootstrap_reps = 1000;
    BeliefRows beliefs = BeliefRows::all;
    int threads = 0;  // 0 = CHAI_THREADS or hardware concurrency
    std::optional<SweepAxes> sweep;
};

// Headline defaults for a sim.
RunConfig default_config(SimId sim, Condition condition = Condition::none);

// Keys absent from `doc` keep the defaults of its "sim". Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RunConfig& config);

nlohmann::json prior_to_json(const PriorSpec& prior);
PriorSpec prior_from_json(const nlohmann::json& doc, const std::string& field = "prior");

// One ExperimentSpec per pooling model; validates each (ConfigError on failure).
std::vector<ExperimentSpec> experiment_specs(const RunConfig& config);

// Shortest decimal that round-trips; NaN becomes an empty field.
std::string format_number(double v);

void write_trials_csv(std::ostream& os, const BatchResult& batch, bool header = true);
void write_beliefs_csv(std::ostream& os, const BatchResult& batch, BeliefRows which = BeliefRows::all,
                       bool header = true);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct TrialRow {
    std::string sim, condition, model;
    TrialRecord record;
};

// Parses trials.csv; target/response/utterance names resolve against `domain`.
std::vector<TrialRow> read_trials_csv(std::istream& is, const DomainSpec& domain);

struct BeliefRow {
    int trajectory = 0, trial = 0, agent = 0;
    PrimitiveId primitive = 0;
    Meaning meaning;
    double prob = 0;
};
std::vector<BeliefRow> read_beliefs_csv(std::istream& is, const DomainSpec& domain);

std::vector<SummaryRow> read_summary_csv(std::istream& is);

// Record-based metrics recomputed from trials.csv (and MAP levels when belief
// rows are given): accuracy, length, vocabulary, align_*, map_*.
std::vector<SummaryRow> summarize_records(const std::vector<TrialRow>& trials, const std::vector<BeliefRow>& beliefs,
                                          const DomainSpec& domain, int bootstrap_reps = 1000,
                                          std::uint64_t seed = 0);

// Figure ids: fig3a fig3b fig6a fig6b fig8a fig8b fig9.
std::vector<std::string> figure_ids();
nlohmann::json emit_plotspec(const std::vector<SummaryRow>& rows, const std::string& figure);

}  // namespace chai
