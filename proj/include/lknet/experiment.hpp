#pragma once

// Play loop (integrate -> STCC -> select -> pull -> DCA update), trial
// ensembles, CDR / regret metrics and parameter sweeps.

#include "lknet/bandit.hpp"
#include "lknet/dca.hpp"
#include "lknet/network.hpp"
#include "lknet/sync_metrics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lknet {

struct TrialConfig {
    double decision_interval = 1e-9;  // s
    double transient = 3000e-9;       // s
    std::size_t plays = 1000;
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    bool partner_identical = false;   // start on the synchronisation manifold
    double stcc_sample_interval = 10e-12;  // s
    EnvironmentSpec environment{};
    DcaConfig dca{};
    LaserParameters laser{};
    IntegratorSettings integrator{};

    void validate() const;
};

/// Divergence inside a trial, tagged with the trial index.
class TrialDivergence : public DivergenceError {
public:
    TrialDivergence(std::size_t trial, const DivergenceError& cause);
    [[nodiscard]] std::size_t trial() const noexcept { return trial_; }

private:
    std::size_t trial_;
};

struct PlayRecord {
    PlayOutcome outcome;
    std::array<bool, kPlayerCount> fallback{};  // no leader; previous selection repeated
    std::array<SlotValues, kPlayerCount> excess{};
    CouplingStrengths kappa{};  // in force for the integration after this Play
    StccSet stcc;
};

struct TrialRecord {
    std::size_t trial_index = 0;
    std::uint64_t seed = 0;
    std::vector<PlayRecord> plays;
};

/// Everything the ensemble metrics need from one trial.
struct TrialSummary {
    std::size_t trial_index = 0;
    std::uint64_t seed = 0;
    std::vector<Selection> selections;
    double team_reward = 0.0;
    std::size_t collisions = 0;
    std::size_t fallbacks = 0;
    CouplingStrengths final_kappa{};
    std::array<SlotValues, kPlayerCount> final_excess{};
};

[[nodiscard]] TrialSummary summarize(const TrialRecord& record);

/// Mutable state of one running trial.
class TrialRunner {
public:
    TrialRunner(const TrialConfig& config, std::size_t trial_index);

    /// Integrates the transient at r_ini couplings.
    void warm_up();
    /// One Play at the current time, then one decision interval of integration.
    PlayRecord run_play();
    /// Integrates `duration` seconds under the current couplings without a Play.
    void advance(double duration);

    [[nodiscard]] const NetworkState& network() const noexcept { return net_; }
    [[nodiscard]] const std::array<PlayerState, kPlayerCount>& players() const noexcept { return players_; }
    [[nodiscard]] CouplingStrengths couplings() const noexcept;
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }

    /// Replaces the network state (e.g. to start from a constant field);
    /// clears the STCC history.
    void reset_network(const NetworkState& net);

private:
    void integrate(std::int64_t steps);

    TrialConfig config_;
    std::uint64_t seed_;
    Integrator integrator_;
    NetworkState net_;
    IntensityHistory history_;
    std::array<PlayerState, kPlayerCount> players_{};
    std::optional<Selection> previous_;
    std::mt19937_64 reward_rng_;
    std::mt19937_64 noise_rng_;
    std::int64_t sample_every_;
    std::int64_t decision_steps_;
};

[[nodiscard]] TrialRecord run_trial(const TrialConfig& config, std::size_t trial_index);

/// Runs trials [0, config.trials) over `workers` threads; results are in
/// trial order and independent of the worker count.
[[nodiscard]] std::vector<TrialSummary> run_experiment(
    const TrialConfig& config, std::size_t workers,
    const std::function<void(std::size_t done, std::size_t total)>& progress = {});

/// Fraction of trials whose Play-m pair is the best pair, m = 1..plays.
[[nodiscard]] std::vector<double> cdr_curve(std::span<const TrialSummary> trials, const EnvironmentSpec& env);

struct Regret {
    double expected_optimum;  // R*
    double realized;          // R
    double absolute;
    double relative;
};

class UndefinedRegret : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

[[nodiscard]] Regret regret(std::span<const TrialSummary> trials, const EnvironmentSpec& env);

struct MetricsSummary {
    std::vector<double> cdr;
    double mean_cdr = 0.0;
    double end_cdr = 0.0;  // mean over the last min(10, plays) Plays
    Regret regret{};
    double team_reward_stderr = 0.0;
    double collision_rate = 0.0;
    double fallback_rate = 0.0;
};

[[nodiscard]] MetricsSummary summarize_metrics(std::span<const TrialSummary> trials, const EnvironmentSpec& env);

struct LeaderSweepRow {
    double kappa_bl;  // 1/s
    LeaderProbabilityTable table;
};

[[nodiscard]] std::vector<LeaderSweepRow> sweep_leader_probability(
    const LaserParameters& laser, const LeaderProbabilityOptions& options, std::span<const double> kappa_bl,
    double kappa_or = 45e9, double kappa_ye = 45e9);

enum class Hyperparameter : std::uint8_t { RStep, KappaLow };

struct HyperSweepRow {
    double value;  // r_step, or kappa_low in 1/s
    EnvironmentSpec environment;
    MetricsSummary metrics;
};

[[nodiscard]] std::vector<HyperSweepRow> sweep_hyperparameter(
    const TrialConfig& base, Hyperparameter parameter, std::span<const double> values,
    std::span<const EnvironmentSpec> environments, std::size_t workers);

}  // namespace lknet
