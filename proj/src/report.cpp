#include "lknet/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace lknet {

using nlohmann::json;

std::string format_number(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

OutputSet::OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

OutputSet::~OutputSet() {
    if (committed_) return;
    for (const auto& p : written_) {
        std::error_code ec;
        std::filesystem::remove(p, ec);
    }
}

void OutputSet::write_text(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    const auto tmp = dir_ / (name + ".part");
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
    written_.push_back(path);
}

void OutputSet::write_json(const std::string& name, const json& doc) { write_text(name, doc.dump(2) + "\n"); }

namespace {

std::string row(std::initializer_list<std::string> cells) {
    std::string out;
    for (const auto& c : cells) {
        if (!out.empty()) out += ',';
        out += c;
    }
    return out + "\n";
}

std::string value_or_nan(const std::optional<double>& v) { return v ? format_number(*v) : "nan"; }

json slot_pair(const Selection& s) { return json::array({std::string(name(s[0])), std::string(name(s[1]))}); }

}  // namespace

std::string env_label(const EnvironmentSpec& env) {
    const auto& p = env.hit_probability;
    return format_number(p[0]) + "/" + format_number(p[1]) + "/" + format_number(p[2]);
}

std::string trace_csv(const IntensityTrace& trace) {
    std::ostringstream out;
    out << "t_ns,I_1A,I_1B,I_1C,I_2A,I_2B,I_2C\n";
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const double t = trace.start_time + static_cast<double>(i + 1) * trace.sample_interval;
        out << format_number(t * 1e9);
        for (double v : trace.samples[i]) out << ',' << format_number(v);
        out << '\n';
    }
    return out.str();
}

std::string stcc_csv(const std::vector<double>& times, const std::vector<StccSet>& sets) {
    std::ostringstream out;
    out << "t_ns,C_1A,C_1B,C_1C,C_2A,C_2B,C_2C\n";
    for (std::size_t i = 0; i < sets.size(); ++i) {
        out << format_number(times[i] * 1e9);
        for (const auto& v : sets[i].values) out << ',' << value_or_nan(v);
        out << '\n';
    }
    return out.str();
}

std::string leader_sweep_csv(const std::vector<LeaderSweepRow>& rows) {
    std::ostringstream out;
    out << "kappa_bl_ns,prob_1A,prob_1B,prob_1C,prob_2A,prob_2B,prob_2C\n";
    for (const auto& r : rows) {
        out << format_number(r.kappa_bl * 1e-9);
        for (double p : r.table.probability) out << ',' << format_number(p);
        out << '\n';
    }
    return out.str();
}

std::string selections_csv(const TrialRecord& record) {
    std::string out = "play,slot_p1,slot_p2,reward_p1,reward_p2,collision,fallback\n";
    for (std::size_t m = 0; m < record.plays.size(); ++m) {
        const auto& p = record.plays[m];
        out += row({std::to_string(m + 1), std::string(name(p.outcome.selections[0])),
                    std::string(name(p.outcome.selections[1])), format_number(p.outcome.rewards[0]),
                    format_number(p.outcome.rewards[1]), p.outcome.collision ? "1" : "0",
                    (p.fallback[0] || p.fallback[1]) ? "1" : "0"});
    }
    return out;
}

std::string excess_csv(const TrialRecord& record) {
    std::ostringstream out;
    out << "play,Q1_A,Q1_B,Q1_C,Q2_A,Q2_B,Q2_C\n";
    for (std::size_t m = 0; m < record.plays.size(); ++m) {
        out << m + 1;
        for (const auto& q : record.plays[m].excess) {
            for (double v : q) out << ',' << format_number(v);
        }
        out << '\n';
    }
    return out.str();
}

std::string kappa_csv(const TrialRecord& record) {
    std::ostringstream out;
    out << "play,kappa_bl_ns,kappa_or_ns,kappa_ye_ns\n";
    for (std::size_t m = 0; m < record.plays.size(); ++m) {
        out << m + 1;
        for (double k : record.plays[m].kappa) out << ',' << format_number(k * 1e-9);
        out << '\n';
    }
    return out.str();
}

std::string play_stcc_csv(const TrialRecord& record) {
    std::ostringstream out;
    out << "play,C_1A,C_1B,C_1C,C_2A,C_2B,C_2C\n";
    for (std::size_t m = 0; m < record.plays.size(); ++m) {
        out << m + 1;
        for (const auto& v : record.plays[m].stcc.values) out << ',' << value_or_nan(v);
        out << '\n';
    }
    return out.str();
}

std::string cdr_csv(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& curves) {
    std::ostringstream out;
    out << "play";
    for (const auto& l : labels) out << ",cdr_" << l;
    out << '\n';
    const std::size_t plays = curves.empty() ? 0 : curves.front().size();
    for (std::size_t m = 0; m < plays; ++m) {
        out << m + 1;
        for (const auto& c : curves) out << ',' << format_number(c[m]);
        out << '\n';
    }
    return out.str();
}

std::string hyper_sweep_csv(const std::string& parameter, const std::vector<HyperSweepRow>& rows) {
    std::ostringstream out;
    out << parameter << ",P_A,P_B,P_C,end_cdr,mean_cdr,abs_regret,rel_regret\n";
    for (const auto& r : rows) {
        const double shown = parameter == "r_step" ? r.value : r.value * 1e-9;
        out << format_number(shown);
        for (double p : r.environment.hit_probability) out << ',' << format_number(p);
        out << ',' << format_number(r.metrics.end_cdr) << ',' << format_number(r.metrics.mean_cdr) << ','
            << format_number(r.metrics.regret.absolute) << ',' << format_number(r.metrics.regret.relative) << '\n';
    }
    return out.str();
}

json metrics_json(const MetricsSummary& m) {
    return {
        {"cdr", m.cdr},
        {"mean_cdr", m.mean_cdr},
        {"end_cdr", m.end_cdr},
        {"expected_optimum_reward", m.regret.expected_optimum},
        {"mean_team_reward", m.regret.realized},
        {"team_reward_stderr", m.team_reward_stderr},
        {"absolute_regret", m.regret.absolute},
        {"relative_regret", m.regret.relative},
        {"collision_rate", m.collision_rate},
        {"fallback_rate", m.fallback_rate},
    };
}

json trial_json(const RunConfig& config, const TrialRecord& record) {
    json plays = json::array();
    for (const auto& p : record.plays) {
        json stcc = json::array();
        for (const auto& v : p.stcc.values) stcc.push_back(v ? json(*v) : json(nullptr));
        plays.push_back({
            {"selections", slot_pair(p.outcome.selections)},
            {"rewards", p.outcome.rewards},
            {"collision", p.outcome.collision},
            {"fallback", p.fallback},
            {"excess", p.excess},
            {"kappa_per_ns", {p.kappa[0] * 1e-9, p.kappa[1] * 1e-9, p.kappa[2] * 1e-9}},
            {"stcc", stcc},
        });
    }
    return {
        {"config", to_json(config)},
        {"trial_index", record.trial_index},
        {"trial_seed", record.seed},
        {"plays", plays},
    };
}

json experiment_json(const RunConfig& config, const std::vector<TrialSummary>& trials, const MetricsSummary& metrics) {
    json per_trial = json::array();
    for (const auto& t : trials) {
        per_trial.push_back({
            {"trial_index", t.trial_index},
            {"trial_seed", t.seed},
            {"team_reward", t.team_reward},
            {"collisions", t.collisions},
            {"fallbacks", t.fallbacks},
            {"final_kappa_per_ns", {t.final_kappa[0] * 1e-9, t.final_kappa[1] * 1e-9, t.final_kappa[2] * 1e-9}},
            {"final_excess", t.final_excess},
        });
    }
    return {{"config", to_json(config)}, {"metrics", metrics_json(metrics)}, {"trials", per_trial}};
}

}  // namespace lknet
