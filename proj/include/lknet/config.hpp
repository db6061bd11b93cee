#pragma once

// Run configuration document. Every key is optional and falls back to the
// defaults below; unknown keys are rejected. Values are kept in document
// units (suffix in the key name) so a config echo re-parses identically.

#include "lknet/experiment.hpp"

#include <json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lknet {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    struct Laser {
        double gain_coefficient_m3_per_s = 8.40e-13;
        double transparency_density_per_m3 = 1.40e24;
        double gain_saturation = 2.0e-23;
        double photon_lifetime_s = 1.927e-12;
        double carrier_lifetime_s = 2.04e-9;
        double linewidth_enhancement = 3.0;
        double delay_ns = 5.0;
        double injection_ratio = 2.0;
        double wavelength_m = 1.537e-6;
        double kappa_per_ns = 155.3;
        std::optional<double> feedback_phase_rad;
        bool operator==(const Laser&) const = default;
    } laser;

    struct Integrator {
        double dt_ps = 1.0;
        double stcc_sample_interval_ps = 10.0;
        double noise_strength_per_ns = 0.0;  // |E|^2 per ns
        bool operator==(const Integrator&) const = default;
    } integrator;

    struct Dca {
        double r_step = 1.0;
        double kappa_low_ns = 38.0;  // 1/ns
        double kappa_upp_ns = 45.0;  // 1/ns
        double unvisited_estimate = 0.5;
        std::string collision_record = "amount";  // "amount" | "hit"
        bool operator==(const Dca&) const = default;
    } dca;

    struct Environment {
        std::array<double, kSlotCount> hit_probabilities{0.4, 0.6, 0.6};
        std::uint64_t seed = 0;
        bool operator==(const Environment&) const = default;
    } environment;

    struct Trial {
        double decision_interval_ns = 1.0;
        double transient_ns = 3000.0;
        std::uint64_t plays = 1000;
        std::uint64_t trials = 200;
        std::uint64_t seed = 1;
        bool partner_identical_init = false;
        bool operator==(const Trial&) const = default;
    } trial;

    struct Leader {
        double horizon_ns = 10000.0;
        std::uint64_t repeats = 50;
        std::array<double, 3> kappa_bl_range_ns{5.0, 60.0, 1.0};  // from, to, step
        double kappa_or_ns = 45.0;
        double kappa_ye_ns = 45.0;
        bool operator==(const Leader&) const = default;
    } leader;

    struct Sweep {
        std::vector<double> r_step_values{0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
        std::vector<double> kappa_low_values_ns{30.0, 32.0, 34.0, 36.0, 38.0, 40.0};
        std::vector<std::array<double, kSlotCount>> environments{
            {0.1, 0.9, 0.9}, {0.2, 0.8, 0.8}, {0.3, 0.7, 0.7}, {0.4, 0.6, 0.6}, {0.45, 0.55, 0.55}};
        bool operator==(const Sweep&) const = default;
    } sweep;

    std::uint64_t workers = 0;  // 0: hardware concurrency

    bool operator==(const RunConfig&) const = default;

    /// Checks cross-field constraints; throws ConfigError.
    void validate() const;

    [[nodiscard]] LaserParameters laser_parameters() const;
    [[nodiscard]] IntegratorSettings integrator_settings() const;
    [[nodiscard]] DcaConfig dca_config() const;
    [[nodiscard]] EnvironmentSpec environment_spec() const;
    [[nodiscard]] TrialConfig trial_config() const;
    [[nodiscard]] LeaderProbabilityOptions leader_options() const;
    /// kappa_bl grid of the leader sweep, 1/s.
    [[nodiscard]] std::vector<double> kappa_bl_grid() const;
};

/// Parses a configuration document (an object; null means all defaults).
[[nodiscard]] RunConfig parse_config(const nlohmann::json& document);
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// Applies "dotted.key=json-value" to a document before parsing.
void apply_override(nlohmann::json& document, const std::string& assignment);

[[nodiscard]] nlohmann::json to_json(const RunConfig& config);

}  // namespace lknet
