#include "lknet/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lknet {

using nlohmann::json;

namespace {

// Reads typed fields out of one JSON object and rejects keys it never asked for.
class Section {
public:
    Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_null() && !node_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (node_.is_null() || !node_.contains(key)) return;
        const json& v = node_.at(key);
        const std::string where = qualified(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) fail(where, "expected a number");
                out = v.get<double>();
                if (!std::isfinite(out)) fail(where, "must be finite");
            } else if constexpr (std::is_same_v<T, std::optional<double>>) {
                if (v.is_null()) {
                    out.reset();
                } else {
                    if (!v.is_number()) fail(where, "expected a number or null");
                    out = v.get<double>();
                }
            } else if constexpr (std::is_same_v<T, std::uint64_t>) {
                if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
                    fail(where, "expected a non-negative integer");
                }
                out = v.get<std::uint64_t>();
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) fail(where, "expected a boolean");
                out = v.get<bool>();
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) fail(where, "expected a string");
                out = v.get<std::string>();
            } else {
                out = v.get<T>();
            }
        } catch (const json::exception& e) {
            fail(where, e.what());
        }
    }

    [[nodiscard]] const json& child(const char* key) {
        seen_.insert(key);
        static const json null_node;
        return (node_.is_null() || !node_.contains(key)) ? null_node : node_.at(key);
    }
    [[nodiscard]] std::string qualified(const char* key) const {
        return path_.empty() ? std::string(key) : path_ + "." + key;
    }

    void finish() const {
        if (node_.is_null()) return;
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.contains(key)) fail(qualified(key.c_str()), "unknown key");
        }
    }

    [[noreturn]] static void fail(const std::string& where, const std::string& what) {
        throw ConfigError("config error at '" + where + "': " + what);
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class T, std::size_t N>
void read_array(Section& s, const char* key, std::array<T, N>& out) {
    const json& v = s.child(key);
    if (v.is_null()) return;
    if (!v.is_array() || v.size() != N) Section::fail(s.qualified(key), "expected an array of " + std::to_string(N) + " numbers");
    for (std::size_t i = 0; i < N; ++i) {
        if (!v[i].is_number()) Section::fail(s.qualified(key), "expected numbers");
        out[i] = v[i].get<T>();
    }
}

void read_vector(Section& s, const char* key, std::vector<double>& out) {
    const json& v = s.child(key);
    if (v.is_null()) return;
    if (!v.is_array()) Section::fail(s.qualified(key), "expected an array of numbers");
    out.clear();
    for (const auto& x : v) {
        if (!x.is_number()) Section::fail(s.qualified(key), "expected numbers");
        out.push_back(x.get<double>());
    }
}

void read_env_list(Section& s, const char* key, std::vector<std::array<double, kSlotCount>>& out) {
    const json& v = s.child(key);
    if (v.is_null()) return;
    if (!v.is_array()) Section::fail(s.qualified(key), "expected an array of [P_A, P_B, P_C] triples");
    out.clear();
    for (const auto& e : v) {
        if (!e.is_array() || e.size() != kSlotCount) Section::fail(s.qualified(key), "expected [P_A, P_B, P_C] triples");
        std::array<double, kSlotCount> t{};
        for (std::size_t i = 0; i < kSlotCount; ++i) {
            if (!e[i].is_number()) Section::fail(s.qualified(key), "expected numbers");
            t[i] = e[i].get<double>();
        }
        out.push_back(t);
    }
}

template <class F>
void rethrow_as_config(F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config constraint violated: ") + e.what());
    }
}

}  // namespace

RunConfig parse_config(const json& document) {
    RunConfig c;
    Section root(document, "");

    Section laser(root.child("laser"), "laser");
    laser.read("gain_coefficient_m3_per_s", c.laser.gain_coefficient_m3_per_s);
    laser.read("transparency_density_per_m3", c.laser.transparency_density_per_m3);
    laser.read("gain_saturation", c.laser.gain_saturation);
    laser.read("photon_lifetime_s", c.laser.photon_lifetime_s);
    laser.read("carrier_lifetime_s", c.laser.carrier_lifetime_s);
    laser.read("linewidth_enhancement", c.laser.linewidth_enhancement);
    laser.read("delay_ns", c.laser.delay_ns);
    laser.read("injection_ratio", c.laser.injection_ratio);
    laser.read("wavelength_m", c.laser.wavelength_m);
    laser.read("kappa_per_ns", c.laser.kappa_per_ns);
    laser.read("feedback_phase_rad", c.laser.feedback_phase_rad);
    laser.finish();

    Section integ(root.child("integrator"), "integrator");
    integ.read("dt_ps", c.integrator.dt_ps);
    integ.read("stcc_sample_interval_ps", c.integrator.stcc_sample_interval_ps);
    integ.read("noise_strength_per_ns", c.integrator.noise_strength_per_ns);
    integ.finish();

    Section dca(root.child("dca"), "dca");
    dca.read("r_step", c.dca.r_step);
    dca.read("kappa_low_ns", c.dca.kappa_low_ns);
    dca.read("kappa_upp_ns", c.dca.kappa_upp_ns);
    dca.read("unvisited_estimate", c.dca.unvisited_estimate);
    dca.read("collision_record", c.dca.collision_record);
    dca.finish();

    Section env(root.child("environment"), "environment");
    read_array(env, "hit_probabilities", c.environment.hit_probabilities);
    env.read("seed", c.environment.seed);
    env.finish();

    Section trial(root.child("trial"), "trial");
    trial.read("decision_interval_ns", c.trial.decision_interval_ns);
    trial.read("transient_ns", c.trial.transient_ns);
    trial.read("plays", c.trial.plays);
    trial.read("trials", c.trial.trials);
    trial.read("seed", c.trial.seed);
    trial.read("partner_identical_init", c.trial.partner_identical_init);
    trial.finish();

    Section leader(root.child("leader"), "leader");
    leader.read("horizon_ns", c.leader.horizon_ns);
    leader.read("repeats", c.leader.repeats);
    read_array(leader, "kappa_bl_range_ns", c.leader.kappa_bl_range_ns);
    leader.read("kappa_or_ns", c.leader.kappa_or_ns);
    leader.read("kappa_ye_ns", c.leader.kappa_ye_ns);
    leader.finish();

    Section sweep(root.child("sweep"), "sweep");
    read_vector(sweep, "r_step_values", c.sweep.r_step_values);
    read_vector(sweep, "kappa_low_values_ns", c.sweep.kappa_low_values_ns);
    read_env_list(sweep, "environments", c.sweep.environments);
    sweep.finish();

    root.read("workers", c.workers);
    root.finish();

    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

void apply_override(json& document, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;  // bare strings such as collision_record=hit
    }
    if (document.is_null()) document = json::object();
    json* node = &document;
    std::stringstream parts(key);
    std::string part;
    std::vector<std::string> path;
    while (std::getline(parts, part, '.')) path.push_back(part);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!node->contains(path[i])) (*node)[path[i]] = json::object();
        node = &(*node)[path[i]];
        if (!node->is_object()) throw ConfigError("override '" + key + "' descends into a non-object");
    }
    (*node)[path.back()] = value;
}

void RunConfig::validate() const {
    rethrow_as_config([&] {
        if (dca.collision_record != "amount" && dca.collision_record != "hit") {
            throw ConfigError("config error at 'dca.collision_record': expected \"amount\" or \"hit\"");
        }
        trial_config().validate();
        if (trial.trials < 1) throw ConfigError("config error at 'trial.trials': must be >= 1");
        if (leader.repeats < 1) throw ConfigError("config error at 'leader.repeats': must be >= 1");
        if (!(leader.horizon_ns > 0.0)) throw ConfigError("config error at 'leader.horizon_ns': must be > 0");
        const auto& r = leader.kappa_bl_range_ns;
        if (!(r[2] > 0.0) || r[1] < r[0] || r[0] < 0.0) {
            throw ConfigError("config error at 'leader.kappa_bl_range_ns': need 0 <= from <= to and step > 0");
        }
        for (const auto& e : sweep.environments) EnvironmentSpec{e, 0}.validate();
    });
}

LaserParameters RunConfig::laser_parameters() const {
    LaserParameters p;
    p.gain_coefficient = laser.gain_coefficient_m3_per_s;
    p.transparency_density = laser.transparency_density_per_m3;
    p.gain_saturation = laser.gain_saturation;
    p.photon_lifetime = laser.photon_lifetime_s;
    p.carrier_lifetime = laser.carrier_lifetime_s;
    p.linewidth_enhancement = laser.linewidth_enhancement;
    p.coupling_delay = laser.delay_ns / 1e9;
    p.injection_ratio = laser.injection_ratio;
    p.wavelength = laser.wavelength_m;
    p.base_coupling = laser.kappa_per_ns * 1e9;
    p.feedback_phase = laser.feedback_phase_rad;
    return p;
}

IntegratorSettings RunConfig::integrator_settings() const {
    return {integrator.dt_ps / 1e12, integrator.noise_strength_per_ns * 1e9};
}

DcaConfig RunConfig::dca_config() const {
    DcaConfig d;
    d.r_step = dca.r_step;
    d.kappa_low = dca.kappa_low_ns * 1e9;
    d.kappa_upp = dca.kappa_upp_ns * 1e9;
    d.base = laser.kappa_per_ns * 1e9;
    d.unvisited_estimate = dca.unvisited_estimate;
    d.collision_record = dca.collision_record == "hit" ? CollisionRecord::Hit : CollisionRecord::Amount;
    return d;
}

EnvironmentSpec RunConfig::environment_spec() const { return {environment.hit_probabilities, environment.seed}; }

TrialConfig RunConfig::trial_config() const {
    TrialConfig t;
    t.decision_interval = trial.decision_interval_ns / 1e9;
    t.transient = trial.transient_ns / 1e9;
    t.plays = static_cast<std::size_t>(trial.plays);
    t.trials = static_cast<std::size_t>(trial.trials);
    t.seed = trial.seed;
    t.partner_identical = trial.partner_identical_init;
    t.stcc_sample_interval = integrator.stcc_sample_interval_ps / 1e12;
    t.environment = environment_spec();
    t.dca = dca_config();
    t.laser = laser_parameters();
    t.integrator = integrator_settings();
    return t;
}

LeaderProbabilityOptions RunConfig::leader_options() const {
    LeaderProbabilityOptions o;
    o.transient = trial.transient_ns / 1e9;
    o.horizon = leader.horizon_ns / 1e9;
    o.decision_interval = trial.decision_interval_ns / 1e9;
    o.sample_interval = integrator.stcc_sample_interval_ps / 1e12;
    o.repeats = static_cast<std::size_t>(leader.repeats);
    o.seed = trial.seed;
    o.partner_identical = trial.partner_identical_init;
    o.integrator = integrator_settings();
    return o;
}

std::vector<double> RunConfig::kappa_bl_grid() const {
    const auto& [from, to, step] = leader.kappa_bl_range_ns;
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back((from + static_cast<double>(i) * step) * 1e9);
    return out;
}

json to_json(const RunConfig& c) {
    json j;
    j["laser"] = {
        {"gain_coefficient_m3_per_s", c.laser.gain_coefficient_m3_per_s},
        {"transparency_density_per_m3", c.laser.transparency_density_per_m3},
        {"gain_saturation", c.laser.gain_saturation},
        {"photon_lifetime_s", c.laser.photon_lifetime_s},
        {"carrier_lifetime_s", c.laser.carrier_lifetime_s},
        {"linewidth_enhancement", c.laser.linewidth_enhancement},
        {"delay_ns", c.laser.delay_ns},
        {"injection_ratio", c.laser.injection_ratio},
        {"wavelength_m", c.laser.wavelength_m},
        {"kappa_per_ns", c.laser.kappa_per_ns},
        {"feedback_phase_rad", c.laser.feedback_phase_rad ? json(*c.laser.feedback_phase_rad) : json(nullptr)},
    };
    j["integrator"] = {
        {"dt_ps", c.integrator.dt_ps},
        {"stcc_sample_interval_ps", c.integrator.stcc_sample_interval_ps},
        {"noise_strength_per_ns", c.integrator.noise_strength_per_ns},
    };
    j["dca"] = {
        {"r_step", c.dca.r_step},
        {"kappa_low_ns", c.dca.kappa_low_ns},
        {"kappa_upp_ns", c.dca.kappa_upp_ns},
        {"unvisited_estimate", c.dca.unvisited_estimate},
        {"collision_record", c.dca.collision_record},
    };
    j["environment"] = {{"hit_probabilities", c.environment.hit_probabilities}, {"seed", c.environment.seed}};
    j["trial"] = {
        {"decision_interval_ns", c.trial.decision_interval_ns},
        {"transient_ns", c.trial.transient_ns},
        {"plays", c.trial.plays},
        {"trials", c.trial.trials},
        {"seed", c.trial.seed},
        {"partner_identical_init", c.trial.partner_identical_init},
    };
    j["leader"] = {
        {"horizon_ns", c.leader.horizon_ns},
        {"repeats", c.leader.repeats},
        {"kappa_bl_range_ns", c.leader.kappa_bl_range_ns},
        {"kappa_or_ns", c.leader.kappa_or_ns},
        {"kappa_ye_ns", c.leader.kappa_ye_ns},
    };
    j["sweep"] = {
        {"r_step_values", c.sweep.r_step_values},
        {"kappa_low_values_ns", c.sweep.kappa_low_values_ns},
        {"environments", c.sweep.environments},
    };
    j["workers"] = c.workers;
    return j;
}

}  // namespace lknet
