// chai: run, sweep, analyze and plot convention-formation simulations.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "chai/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RuntimeFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonFlags {
    std::string config_path;
    std::string sim, condition, pooling, out, beliefs;
    std::optional<int> n;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha, beta, w_c, epsilon;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "run-config JSON (flags override its keys)");
    cmd->add_option("--sim", f.sim, "sim11, sim12, sim21 or sim31");
    cmd->add_option("--condition", f.condition, "coarse, fine or mixed (sim31 only)");
    cmd->add_option("--pooling", f.pooling, "comma-separated pooling models: complete,none,partial");
    cmd->add_option("--n", f.n, "trajectories (networks for sim21)");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--alpha", f.alpha, "speaker and listener optimality");
    cmd->add_option("--beta", f.beta, "memory decay");
    cmd->add_option("--w-c", f.w_c, "cost weight");
    cmd->add_option("--epsilon", f.epsilon, "noise mixture");
    cmd->add_option("--beliefs", f.beliefs, "belief rows to write: all, final or none");
    cmd->add_option("--threads", f.threads, "worker threads (0 = CHAI_THREADS or all cores)");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw chai::ConfigError("config", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw chai::ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
}

chai::RunConfig resolve(const CommonFlags& f, std::optional<int> default_n = std::nullopt) {
    json doc = f.config_path.empty() ? json::object() : read_json_file(f.config_path);
    if (!doc.is_object()) throw chai::ConfigError("config", "expected a JSON object");
    if (!f.sim.empty()) doc["sim"] = f.sim;
    if (!f.condition.empty()) doc["condition"] = f.condition;
    if (!f.pooling.empty()) {
        json models = json::array();
        std::stringstream ss(f.pooling);
        for (std::string m; std::getline(ss, m, ',');) models.push_back(m);
        doc["models"] = models;
    }
    if (f.n) doc["n"] = *f.n;
    if (!doc.contains("n") && default_n) doc["n"] = *default_n;
    if (f.seed) doc["seed"] = *f.seed;
    if (!f.out.empty()) doc["out_dir"] = f.out;
    if (!f.beliefs.empty()) doc["beliefs"] = f.beliefs;
    if (f.alpha || f.beta || f.w_c || f.epsilon) {
        json& p = doc["params"];
        if (p.is_null()) p = json::object();
        if (f.alpha) p["alpha_s"] = p["alpha_l"] = *f.alpha;
        if (f.beta) p["beta"] = *f.beta;
        if (f.w_c) p["w_c"] = *f.w_c;
        if (f.epsilon) p["epsilon"] = *f.epsilon;
    }
    return chai::config_from_json(doc);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw RuntimeFailure("cannot write " + path.string());
    return os;
}

void write_config(const chai::RunConfig& config, const fs::path& dir) {
    auto os = open_out(dir / "config.json");
    os << chai::config_to_json(config).dump(2) << '\n';
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw RuntimeFailure("cannot create " + dir.string() + ": " + ec.message());
}

int cmd_run(const CommonFlags& f) {
    const chai::RunConfig config = resolve(f);
    const fs::path root(config.out_dir);
    make_dir(root);
    write_config(config, root);
    const auto specs = chai::experiment_specs(config);
    for (const auto& spec : specs) {
        const fs::path dir = specs.size() == 1 ? root : root / std::string(chai::to_string(spec.pooling));
        make_dir(dir);
        std::cerr << "running " << chai::to_string(spec.sim) << " (" << chai::to_string(spec.pooling) << "), n="
                  << config.n << '\n';
        const chai::BatchResult batch = chai::Experiment(spec).run_batch(config.n, config.seed, f.threads);
        {
            auto os = open_out(dir / "trials.csv");
            chai::write_trials_csv(os, batch);
        }
        if (config.beliefs != chai::BeliefRows::none) {
            auto os = open_out(dir / "beliefs.csv");
            chai::write_beliefs_csv(os, batch, config.beliefs);
        }
        {
            auto os = open_out(dir / "summary.csv");
            chai::write_summary_csv(os, chai::summarize_batch(batch, config.bootstrap_reps, config.seed));
        }
    }
    return 0;
}

int cmd_sweep(const CommonFlags& f, const std::string& grid) {
    // Sweeps default to 10 trajectories per cell unless n is given.
    chai::RunConfig config = resolve(f, 10);
    if (!grid.empty() && grid != "default") {
        json merged = chai::config_to_json(config);
        merged["sweep"] = read_json_file(grid);
        config = chai::config_from_json(merged);
    }
    if (!config.sweep) config.sweep = chai::SweepAxes{};
    const fs::path root(config.out_dir);
    make_dir(root);
    write_config(config, root);
    const auto rows = chai::sweep_grid(chai::experiment_specs(config), *config.sweep, config.n, config.seed, f.threads);
    auto os = open_out(root / "sweep.csv");
    chai::write_sweep_csv(os, rows);
    return 0;
}

int cmd_analyze(const std::string& in_dir, const std::string& out_path, int reps) {
    const fs::path dir(in_dir);
    chai::DomainSpec domain{chai::Taxonomy::flat(2), chai::Vocabulary::numbered(2)};
    std::uint64_t seed = 0;
    if (fs::exists(dir / "config.json")) {
        const auto cfg = chai::config_from_json(read_json_file((dir / "config.json").string()));
        domain = cfg.domain;
        seed = cfg.seed;
    } else if (fs::exists(dir.parent_path() / "config.json")) {
        const auto cfg = chai::config_from_json(read_json_file((dir.parent_path() / "config.json").string()));
        domain = cfg.domain;
        seed = cfg.seed;
    }
    std::ifstream trials_in(dir / "trials.csv");
    if (!trials_in) throw RuntimeFailure("cannot read " + (dir / "trials.csv").string());
    const auto trials = chai::read_trials_csv(trials_in, domain);
    std::vector<chai::BeliefRow> beliefs;
    if (std::ifstream beliefs_in(dir / "beliefs.csv"); beliefs_in) beliefs = chai::read_beliefs_csv(beliefs_in, domain);
    const auto rows = chai::summarize_records(trials, beliefs, domain, reps, seed);
    auto os = open_out(out_path.empty() ? dir / "analysis.csv" : fs::path(out_path));
    chai::write_summary_csv(os, rows);
    return 0;
}

int cmd_plot(const std::string& summary_path, const std::string& figure, const std::string& out_dir) {
    std::ifstream in(summary_path);
    if (!in) throw RuntimeFailure("cannot read " + summary_path);
    const auto rows = chai::read_summary_csv(in);
    std::vector<std::string> figs = figure == "all" ? chai::figure_ids() : std::vector<std::string>{figure};
    make_dir(out_dir);
    for (const auto& id : figs) {
        const json doc = chai::emit_plotspec(rows, id);
        auto os = open_out(fs::path(out_dir) / (id + ".json"));
        os << doc.dump(2) << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convention formation with hierarchical Bayesian RSA agents"};
    app.require_subcommand(1);

    CommonFlags run_flags, sweep_flags;
    auto* run = app.add_subcommand("run", "simulate a batch and write trials, beliefs and summary CSVs");
    add_common(run, run_flags);

    auto* sweep = app.add_subcommand("sweep", "run a parameter grid and write sweep.csv");
    add_common(sweep, sweep_flags);
    std::string grid;
    sweep->add_option("--grid", grid, "'default' or a JSON file with alpha/beta/w_c/priors axes");

    auto* analyze = app.add_subcommand("analyze", "recompute record-based metrics from a result directory");
    std::string in_dir, analyze_out;
    int reps = 1000;
    analyze->add_option("--in", in_dir, "directory holding trials.csv")->required();
    analyze->add_option("--out", analyze_out, "summary CSV to write (default <in>/analysis.csv)");
    analyze->add_option("--bootstrap-reps", reps, "bootstrap resamples");

    auto* plot = app.add_subcommand("plot", "emit JSON plot specifications from a summary CSV");
    std::string summary_path, figure = "all", plot_out = ".";
    plot->add_option("--summary", summary_path, "summary.csv")->required();
    plot->add_option("--figure", figure, "fig3a fig3b fig6a fig6b fig8a fig8b fig9 or all");
    plot->add_option("--out", plot_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(run_flags);
        if (sweep->parsed()) return cmd_sweep(sweep_flags, grid);
        if (analyze->parsed()) return cmd_analyze(in_dir, analyze_out, reps);
        if (plot->parsed()) return cmd_plot(summary_path, figure, plot_out);
    } catch (const chai::ConfigError& e) {
        std::cerr << "config error in " << e.field() << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
