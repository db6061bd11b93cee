// lknet: command-line driver for the six-laser decision-making network.

#include "lknet/config.hpp"
#include "lknet/experiment.hpp"
#include "lknet/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

using namespace lknet;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    std::optional<std::uint64_t> workers;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

std::vector<double> parse_list(const std::string& text, char sep = ',') {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse number '" + item + "' in '" + text + "'");
        }
    }
    return out;
}

std::array<double, kSlotCount> parse_env(const std::string& text) {
    const auto v = parse_list(text);
    if (v.size() != kSlotCount) throw ConfigError("--env expects P_A,P_B,P_C, got '" + text + "'");
    return {v[0], v[1], v[2]};
}

RunConfig resolve(const Common& c) {
    json doc = nullptr;
    if (!c.config_path.empty()) doc = to_json(load_config(c.config_path));
    for (const auto& o : c.overrides) apply_override(doc, o);
    if (c.seed) apply_override(doc, "trial.seed=" + std::to_string(*c.seed));
    RunConfig cfg = parse_config(doc);
    if (c.workers) {
        cfg.workers = *c.workers;
    } else if (const char* env = std::getenv("LKNET_WORKERS"); env != nullptr && cfg.workers == 0) {
        try {
            cfg.workers = std::stoull(env);
        } catch (const std::exception&) {
            throw ConfigError(std::string("LKNET_WORKERS is not an integer: '") + env + "'");
        }
    }
    return cfg;
}

std::size_t worker_count(const RunConfig& cfg) {
    if (cfg.workers > 0) return static_cast<std::size_t>(cfg.workers);
    return std::max(1u, std::thread::hardware_concurrency());
}

std::function<void(std::size_t, std::size_t)> progress_printer(const Common& c, std::string label) {
    if (c.quiet) return {};
    return [label = std::move(label)](std::size_t done, std::size_t total) {
        if (done == total || done % std::max<std::size_t>(1, total / 20) == 0) {
            std::cerr << "  " << label << ": " << done << "/" << total << " trials\n";
        }
    };
}

void report(const Common& c, const OutputSet& out) {
    if (c.quiet) return;
    for (const auto& p : out.written()) std::cout << p.string() << "\n";
}

// --- subcommands -----------------------------------------------------------

struct SimulateArgs {
    double duration_ns = 10000.0;
    double sample_ps = 10.0;
    std::string kappa = "45,45,45";
    bool stcc = false;
};

void cmd_simulate(const Common& c, const SimulateArgs& a) {
    const RunConfig cfg = resolve(c);
    const auto kv = parse_list(a.kappa);
    if (kv.size() != kColorCount) throw ConfigError("--kappa expects bl,or,ye in 1/ns");
    const CouplingStrengths kappa{kv[0] * 1e9, kv[1] * 1e9, kv[2] * 1e9};
    const TrialConfig tc = cfg.trial_config();
    Integrator integ(tc.laser, tc.integrator);

    std::mt19937_64 rng(tc.seed);
    const auto init = random_initial_states(tc.laser, rng, tc.partner_identical);
    NetworkState net = make_network(tc.laser, tc.integrator.dt, init);
    integ.simulate(net, kappa, tc.transient, tc.decision_interval);
    const auto trace = integ.simulate(net, kappa, a.duration_ns / 1e9, a.sample_ps / 1e12);

    OutputSet out(c.out_dir);
    out.write_text("trace.csv", trace_csv(trace));
    json sync = json::array();
    for (const auto& e : cluster_sync_error(trace)) sync.push_back(e ? json(*e) : json(nullptr));
    out.write_json("simulate.json", {{"config", to_json(cfg)},
                                     {"kappa_per_ns", kv},
                                     {"cluster_sync_error", sync},
                                     {"clusters", {"bl", "or", "ye"}}});
    if (a.stcc) {
        const auto window = static_cast<std::size_t>(steps_in(tc.laser.coupling_delay, a.sample_ps / 1e12, "delay"));
        const auto stride = static_cast<std::size_t>(steps_in(tc.decision_interval, a.sample_ps / 1e12, "decision"));
        std::vector<double> times;
        std::vector<StccSet> sets;
        for (std::size_t end = 2 * window; end <= trace.samples.size(); end += stride) {
            times.push_back(trace.start_time + static_cast<double>(end) * trace.sample_interval);
            sets.push_back(stcc_set(trace, end, window));
        }
        out.write_text("stcc.csv", stcc_csv(times, sets));
    }
    out.commit();
    report(c, out);
}

struct LeaderArgs {
    std::string kappa_bl;
    std::optional<std::uint64_t> repeats;
    std::optional<double> horizon_ns;
};

void cmd_leader_sweep(Common c, const LeaderArgs& a) {
    if (!a.kappa_bl.empty()) {
        const auto r = parse_list(a.kappa_bl, ':');
        if (r.size() != 3) throw ConfigError("--kappa-bl expects from:to:step");
        c.overrides.push_back("leader.kappa_bl_range_ns=[" + format_number(r[0]) + "," + format_number(r[1]) + "," +
                              format_number(r[2]) + "]");
    }
    if (a.repeats) c.overrides.push_back("leader.repeats=" + std::to_string(*a.repeats));
    if (a.horizon_ns) c.overrides.push_back("leader.horizon_ns=" + format_number(*a.horizon_ns));
    const RunConfig cfg = resolve(c);
    const auto grid = cfg.kappa_bl_grid();
    std::vector<LeaderSweepRow> rows;
    for (double k : grid) {
        if (!c.quiet) std::cerr << "  kappa_bl = " << format_number(k * 1e-9) << " /ns\n";
        auto part = sweep_leader_probability(cfg.laser_parameters(), cfg.leader_options(), std::span(&k, 1),
                                             cfg.leader.kappa_or_ns * 1e9, cfg.leader.kappa_ye_ns * 1e9);
        rows.push_back(part.front());
    }
    OutputSet out(c.out_dir);
    out.write_text("leader_sweep.csv", leader_sweep_csv(rows));
    json table = json::array();
    for (const auto& r : rows) {
        table.push_back({{"kappa_bl_ns", r.kappa_bl * 1e-9},
                         {"probability", r.table.probability},
                         {"cluster", r.table.cluster},
                         {"no_leader", r.table.no_leader}});
    }
    out.write_json("leader_sweep.json", {{"config", to_json(cfg)}, {"rows", table}});
    out.commit();
    report(c, out);
}

struct TrialArgs {
    std::string env;
    std::uint64_t index = 0;
};

void cmd_trial(Common c, const TrialArgs& a) {
    if (!a.env.empty()) {
        const auto e = parse_env(a.env);
        c.overrides.push_back("environment.hit_probabilities=[" + format_number(e[0]) + "," + format_number(e[1]) +
                              "," + format_number(e[2]) + "]");
    }
    const RunConfig cfg = resolve(c);
    const auto record = run_trial(cfg.trial_config(), static_cast<std::size_t>(a.index));
    OutputSet out(c.out_dir);
    out.write_json("trial.json", trial_json(cfg, record));
    out.write_text("trial_stcc.csv", play_stcc_csv(record));
    out.write_text("trial_selections.csv", selections_csv(record));
    out.write_text("trial_excess.csv", excess_csv(record));
    out.write_text("trial_kappa.csv", kappa_csv(record));
    out.commit();
    report(c, out);
}

struct ExperimentArgs {
    std::string env;
    std::optional<std::uint64_t> trials;
};

void cmd_experiment(Common c, const ExperimentArgs& a) {
    if (!a.env.empty()) {
        const auto e = parse_env(a.env);
        c.overrides.push_back("environment.hit_probabilities=[" + format_number(e[0]) + "," + format_number(e[1]) +
                              "," + format_number(e[2]) + "]");
    }
    if (a.trials) c.overrides.push_back("trial.trials=" + std::to_string(*a.trials));
    const RunConfig cfg = resolve(c);
    const TrialConfig tc = cfg.trial_config();
    const auto trials = run_experiment(tc, worker_count(cfg), progress_printer(c, env_label(tc.environment)));
    const auto metrics = summarize_metrics(trials, tc.environment);
    OutputSet out(c.out_dir);
    out.write_json("experiment.json", experiment_json(cfg, trials, metrics));
    out.write_text("cdr.csv", cdr_csv({env_label(tc.environment)}, {metrics.cdr}));
    out.commit();
    report(c, out);
    if (!c.quiet) {
        std::cout << "mean CDR " << format_number(metrics.mean_cdr) << ", abs. regret "
                  << format_number(metrics.regret.absolute) << ", rel. regret "
                  << format_number(metrics.regret.relative) << ", collision rate "
                  << format_number(metrics.collision_rate) << "\n";
    }
}

struct HyperArgs {
    std::string parameter = "r_step";
    std::string values;
    std::string envs;
};

std::vector<EnvironmentSpec> parse_env_list(const std::string& text, const RunConfig& cfg) {
    std::vector<EnvironmentSpec> out;
    if (text.empty()) {
        for (const auto& e : cfg.sweep.environments) out.push_back({e, cfg.environment.seed});
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) out.push_back({parse_env(item), cfg.environment.seed});
    return out;
}

std::vector<HyperSweepRow> run_hyper(const Common& c, const RunConfig& cfg, Hyperparameter param,
                                     const std::vector<double>& values, const std::vector<EnvironmentSpec>& envs) {
    std::vector<HyperSweepRow> rows;
    for (double v : values) {
        for (const auto& env : envs) {
            if (!c.quiet) std::cerr << "  value " << format_number(param == Hyperparameter::RStep ? v : v * 1e-9)
                                    << " on " << env_label(env) << "\n";
            auto part = sweep_hyperparameter(cfg.trial_config(), param, std::span(&v, 1), std::span(&env, 1),
                                             worker_count(cfg));
            rows.push_back(std::move(part.front()));
        }
    }
    return rows;
}

void write_hyper(OutputSet& out, const std::string& stem, const std::string& parameter,
                 const std::vector<HyperSweepRow>& rows) {
    out.write_text(stem + ".csv", hyper_sweep_csv(parameter, rows));
    std::vector<std::string> labels;
    std::vector<std::vector<double>> curves;
    for (const auto& r : rows) {
        labels.push_back(parameter + "=" + format_number(parameter == "r_step" ? r.value : r.value * 1e-9) + "@" +
                         env_label(r.environment));
        curves.push_back(r.metrics.cdr);
    }
    out.write_text(stem + "_curves.csv", cdr_csv(labels, curves));
}

void cmd_hyper_sweep(const Common& c, const HyperArgs& a) {
    const RunConfig cfg = resolve(c);
    Hyperparameter param;
    std::vector<double> values;
    if (a.parameter == "r_step") {
        param = Hyperparameter::RStep;
        values = a.values.empty() ? cfg.sweep.r_step_values : parse_list(a.values);
    } else if (a.parameter == "kappa_low") {
        param = Hyperparameter::KappaLow;
        values = a.values.empty() ? cfg.sweep.kappa_low_values_ns : parse_list(a.values);
        for (double& v : values) v *= 1e9;
    } else {
        throw ConfigError("--parameter must be r_step or kappa_low");
    }
    if (values.empty()) throw ConfigError("--values must not be empty");
    const auto envs = parse_env_list(a.envs, cfg);
    const auto rows = run_hyper(c, cfg, param, values, envs);
    OutputSet out(c.out_dir);
    write_hyper(out, "hyper_sweep_" + a.parameter, a.parameter, rows);
    out.write_json("hyper_sweep_" + a.parameter + ".json", {{"config", to_json(cfg)}, {"parameter", a.parameter}});
    out.commit();
    report(c, out);
}

void cmd_emit_figures(const Common& c) {
    const RunConfig cfg = resolve(c);
    const std::size_t workers = worker_count(cfg);
    OutputSet out(c.out_dir);

    // Leader probability against kappa_bl.
    {
        const auto grid = cfg.kappa_bl_grid();
        const auto rows = sweep_leader_probability(cfg.laser_parameters(), cfg.leader_options(), grid,
                                                   cfg.leader.kappa_or_ns * 1e9, cfg.leader.kappa_ye_ns * 1e9);
        out.write_text("leader_probability.csv", leader_sweep_csv(rows));
    }
    // One trial under the configured environment.
    {
        const auto record = run_trial(cfg.trial_config(), 0);
        out.write_text("trial_stcc.csv", play_stcc_csv(record));
        out.write_text("trial_selections.csv", selections_csv(record));
        out.write_text("trial_excess.csv", excess_csv(record));
        out.write_text("trial_kappa.csv", kappa_csv(record));
    }
    // CDR curves over symmetric and asymmetric environments.
    auto cdr_set = [&](const std::string& file, const std::vector<std::array<double, 3>>& envs) {
        std::vector<std::string> labels;
        std::vector<std::vector<double>> curves;
        json metrics = json::array();
        for (const auto& e : envs) {
            TrialConfig tc = cfg.trial_config();
            tc.environment.hit_probability = e;
            const auto trials = run_experiment(tc, workers, progress_printer(c, env_label(tc.environment)));
            const auto m = summarize_metrics(trials, tc.environment);
            labels.push_back(env_label(tc.environment));
            curves.push_back(m.cdr);
            json mj = metrics_json(m);
            mj.erase("cdr");
            mj["hit_probabilities"] = e;
            metrics.push_back(mj);
        }
        out.write_text(file + ".csv", cdr_csv(labels, curves));
        out.write_json(file + ".json", {{"config", to_json(cfg)}, {"metrics", metrics}});
    };
    cdr_set("cdr_symmetric", {{0.1, 0.9, 0.9}, {0.2, 0.8, 0.8}, {0.3, 0.7, 0.7}, {0.4, 0.6, 0.6}, {0.45, 0.55, 0.55}});
    cdr_set("cdr_asymmetric", {{0.1, 0.3, 0.9}, {0.1, 0.3, 0.5}, {0.1, 0.3, 0.3}, {0.1, 0.5, 0.3}, {0.1, 0.9, 0.3}});

    // Hyperparameter sweeps.
    std::vector<EnvironmentSpec> envs;
    for (const auto& e : cfg.sweep.environments) envs.push_back({e, cfg.environment.seed});
    write_hyper(out, "hyper_sweep_r_step", "r_step", run_hyper(c, cfg, Hyperparameter::RStep, cfg.sweep.r_step_values, envs));
    std::vector<double> klow = cfg.sweep.kappa_low_values_ns;
    for (double& v : klow) v *= 1e9;
    write_hyper(out, "hyper_sweep_kappa_low", "kappa_low", run_hyper(c, cfg, Hyperparameter::KappaLow, klow, envs));

    out.write_json("figures.json", {{"config", to_json(cfg)}});
    out.commit();
    report(c, out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Six-laser chaotic network solving the two-player, three-slot competitive bandit"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", common.config_path, "JSON configuration file")->check(CLI::ExistingFile);
        sub->add_option("--set", common.overrides, "Override a config key, e.g. --set dca.r_step=0.5");
        sub->add_option("-o,--out-dir", common.out_dir, "Directory for output files");
        sub->add_option("--workers", common.workers, "Worker threads (env LKNET_WORKERS)");
        sub->add_option("--seed", common.seed, "Base seed");
        sub->add_flag("-q,--quiet", common.quiet, "Suppress progress output");
    };

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Integrate the network and dump intensity traces");
    add_common(simulate);
    simulate->add_option("--duration-ns", sim.duration_ns, "Recorded span after the transient");
    simulate->add_option("--sample-ps", sim.sample_ps, "Trace sample interval");
    simulate->add_option("--kappa", sim.kappa, "Couplings bl,or,ye in 1/ns");
    simulate->add_flag("--stcc", sim.stcc, "Also write STCC values at every decision instant");

    LeaderArgs lead;
    auto* leader = app.add_subcommand("leader-sweep", "Leader probability against kappa_bl");
    add_common(leader);
    leader->add_option("--kappa-bl", lead.kappa_bl, "from:to:step in 1/ns");
    leader->add_option("--repeats", lead.repeats, "Random initialisations per point");
    leader->add_option("--horizon-ns", lead.horizon_ns, "Measured span per repeat");

    TrialArgs tri;
    auto* trial = app.add_subcommand("trial", "Run one decision-making trial");
    add_common(trial);
    trial->add_option("--env", tri.env, "Hit probabilities P_A,P_B,P_C");
    trial->add_option("--index", tri.index, "Trial index (seeds the trial)");

    ExperimentArgs exp;
    auto* experiment = app.add_subcommand("experiment", "Run a trial ensemble and report CDR / regret");
    add_common(experiment);
    experiment->add_option("--env", exp.env, "Hit probabilities P_A,P_B,P_C");
    experiment->add_option("--trials", exp.trials, "Number of trials");

    HyperArgs hyp;
    auto* hyper = app.add_subcommand("hyper-sweep", "End-of-run CDR against r_step or kappa_low");
    add_common(hyper);
    hyper->add_option("--parameter", hyp.parameter, "r_step or kappa_low");
    hyper->add_option("--values", hyp.values, "Comma-separated values (kappa_low in 1/ns)");
    hyper->add_option("--envs", hyp.envs, "Environments 'a,b,c;d,e,f'");

    auto* figures = app.add_subcommand("emit-figures", "Write every figure data set at the configured scale");
    add_common(figures);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*simulate) cmd_simulate(common, sim);
        else if (*leader) cmd_leader_sweep(common, lead);
        else if (*trial) cmd_trial(common, tri);
        else if (*experiment) cmd_experiment(common, exp);
        else if (*hyper) cmd_hyper_sweep(common, hyp);
        else if (*figures) cmd_emit_figures(common);
    } catch (const ConfigError& e) {
        std::cerr << "lknet: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidParameter& e) {
        std::cerr << "lknet: invalid parameter: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DivergenceError& e) {
        std::cerr << "lknet: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "lknet: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
