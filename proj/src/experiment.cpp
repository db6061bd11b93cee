#include "lknet/experiment.hpp"

#include "lknet/seeding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace lknet {

namespace {

constexpr Selection kDefaultSelection{Slot::A, Slot::B};  // partner-consistent (1A <-> 2B)

}  // namespace

void TrialConfig::validate() const {
    laser.validate();
    environment.validate();
    dca.validate();
    if (plays < 1) throw InvalidParameter("plays must be >= 1");
    if (dca.base != laser.base_coupling) throw InvalidParameter("DCA base coupling differs from the laser's kappa");
    const double dt = integrator.dt;
    delay_steps(laser.coupling_delay, dt);
    if (steps_in(decision_interval, dt, "decision interval") < 1) throw InvalidParameter("decision interval must be >= dt");
    const auto sample = steps_in(stcc_sample_interval, dt, "STCC sample interval");
    if (sample < 1) throw InvalidParameter("STCC sample interval must be >= dt");
    if (steps_in(decision_interval, dt, "decision interval") % sample != 0) {
        throw InvalidParameter("decision interval must be a multiple of the STCC sample interval");
    }
    const auto window = steps_in(laser.coupling_delay, stcc_sample_interval, "coupling delay on the STCC grid");
    if (window < 2) throw InvalidParameter("STCC window must hold at least 2 samples");
    if (steps_in(transient, dt, "transient") < 2 * window * sample) {
        throw InvalidParameter("transient must cover at least two coupling delays");
    }
}

TrialDivergence::TrialDivergence(std::size_t trial, const DivergenceError& cause)
    : DivergenceError(cause.time(), std::string("trial ") + std::to_string(trial) + ": " + cause.detail()),
      trial_(trial) {}

TrialSummary summarize(const TrialRecord& record) {
    TrialSummary s;
    s.trial_index = record.trial_index;
    s.seed = record.seed;
    s.selections.reserve(record.plays.size());
    for (const auto& p : record.plays) {
        s.selections.push_back(p.outcome.selections);
        s.team_reward += p.outcome.team_reward();
        s.collisions += p.outcome.collision ? 1 : 0;
        s.fallbacks += (p.fallback[0] || p.fallback[1]) ? 1 : 0;
    }
    if (!record.plays.empty()) {
        s.final_kappa = record.plays.back().kappa;
        s.final_excess = record.plays.back().excess;
    }
    return s;
}

TrialRunner::TrialRunner(const TrialConfig& config, std::size_t trial_index)
    : config_(config),
      seed_(trial_seed(config.seed, trial_index)),
      integrator_(config.laser, config.integrator),
      history_(static_cast<std::size_t>(
          steps_in(config.laser.coupling_delay, config.stcc_sample_interval, "coupling delay on the STCC grid"))),
      reward_rng_(stream_seed(seed_ ^ config.environment.seed, 1)),
      noise_rng_(stream_seed(seed_, 2)),
      sample_every_(steps_in(config.stcc_sample_interval, config.integrator.dt, "STCC sample interval")),
      decision_steps_(steps_in(config.decision_interval, config.integrator.dt, "decision interval")) {
    config_.validate();
    std::mt19937_64 init_rng(stream_seed(seed_, 0));
    const auto initial = random_initial_states(config_.laser, init_rng, config_.partner_identical);
    net_ = make_network(config_.laser, config_.integrator.dt, initial);
    for (auto& p : players_) p = initial_player(config_.dca);
}

CouplingStrengths TrialRunner::couplings() const noexcept {
    return effective_couplings(players_[0].attenuation, players_[1].attenuation, config_.dca.base);
}

void TrialRunner::reset_network(const NetworkState& net) {
    net_ = net;
    history_.clear();
}

void TrialRunner::integrate(std::int64_t steps) {
    integrator_.advance(net_, couplings(), steps, sample_every_,
                        [this](const NetworkState& s) { history_.push(s.intensities()); }, &noise_rng_);
}

void TrialRunner::advance(double duration) { integrate(steps_in(duration, config_.integrator.dt, "duration")); }

void TrialRunner::warm_up() { integrate(steps_in(config_.transient, config_.integrator.dt, "transient")); }

PlayRecord TrialRunner::run_play() {
    PlayRecord rec;
    rec.stcc = stcc_set(history_);

    Selection selection{};
    for (std::size_t p = 0; p < kPlayerCount; ++p) {
        if (const auto leader = leader_of(rec.stcc.player(p))) {
            selection[p] = *leader;
        } else {
            rec.fallback[p] = true;
            selection[p] = previous_ ? (*previous_)[p] : kDefaultSelection[p];
        }
    }
    previous_ = selection;

    rec.outcome = pull(config_.environment, selection, reward_rng_);
    for (std::size_t p = 0; p < kPlayerCount; ++p) {
        const Slot s = selection[p];
        rec.excess[p] = dca_step(players_[p], s, rec.outcome.rewards[p], rec.outcome.hit[index(s)],
                                 rec.outcome.collision, config_.dca);
    }
    rec.kappa = couplings();
    integrate(decision_steps_);
    return rec;
}

TrialRecord run_trial(const TrialConfig& config, std::size_t trial_index) {
    TrialRunner runner(config, trial_index);
    TrialRecord record;
    record.trial_index = trial_index;
    record.seed = runner.seed();
    record.plays.reserve(config.plays);
    try {
        runner.warm_up();
        for (std::size_t m = 0; m < config.plays; ++m) record.plays.push_back(runner.run_play());
    } catch (const DivergenceError& e) {
        throw TrialDivergence(trial_index, e);
    }
    return record;
}

std::vector<TrialSummary> run_experiment(const TrialConfig& config, std::size_t workers,
                                         const std::function<void(std::size_t, std::size_t)>& progress) {
    config.validate();
    const std::size_t total = config.trials;
    std::vector<TrialSummary> out(total);
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(total, 1));

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex mutex;

    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total || failed.load()) return;
            try {
                out[i] = summarize(run_trial(config, i));
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(mutex);
                progress(d, total);
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    return out;
}

std::vector<double> cdr_curve(std::span<const TrialSummary> trials, const EnvironmentSpec& env) {
    if (trials.empty()) throw std::invalid_argument("cdr_curve: no trials");
    const BestPair best = best_pair(env);
    const std::size_t plays = trials.front().selections.size();
    std::vector<std::size_t> correct(plays, 0);
    for (const auto& t : trials) {
        if (t.selections.size() != plays) throw std::invalid_argument("cdr_curve: trials differ in length");
        for (std::size_t m = 0; m < plays; ++m) correct[m] += best.matches(t.selections[m]) ? 1 : 0;
    }
    std::vector<double> cdr(plays);
    for (std::size_t m = 0; m < plays; ++m) cdr[m] = static_cast<double>(correct[m]) / static_cast<double>(trials.size());
    return cdr;
}

Regret regret(std::span<const TrialSummary> trials, const EnvironmentSpec& env) {
    if (trials.empty()) throw std::invalid_argument("regret: no trials");
    const std::size_t plays = trials.front().selections.size();
    double sum = 0.0;
    for (const auto& t : trials) {
        if (t.selections.size() != plays) throw std::invalid_argument("regret: trials differ in length");
        sum += t.team_reward;
    }
    Regret r{};
    r.expected_optimum = best_pair(env).reward_per_play * static_cast<double>(plays);
    r.realized = sum / static_cast<double>(trials.size());
    r.absolute = r.expected_optimum - r.realized;
    if (r.expected_optimum == 0.0) throw UndefinedRegret("relative regret undefined: R* = 0");
    r.relative = r.absolute / r.expected_optimum;
    return r;
}

MetricsSummary summarize_metrics(std::span<const TrialSummary> trials, const EnvironmentSpec& env) {
    MetricsSummary m;
    m.cdr = cdr_curve(trials, env);
    for (double c : m.cdr) m.mean_cdr += c;
    m.mean_cdr /= static_cast<double>(m.cdr.size());
    const std::size_t tail = std::min<std::size_t>(10, m.cdr.size());
    for (std::size_t i = m.cdr.size() - tail; i < m.cdr.size(); ++i) m.end_cdr += m.cdr[i];
    m.end_cdr /= static_cast<double>(tail);

    const double plays = static_cast<double>(m.cdr.size());
    if (best_pair(env).reward_per_play > 0.0) {
        m.regret = regret(trials, env);
    } else {
        m.regret = {0.0, 0.0, 0.0, 0.0};
        for (const auto& t : trials) m.regret.realized += t.team_reward / static_cast<double>(trials.size());
        m.regret.absolute = -m.regret.realized;
    }
    double ss = 0.0;
    std::size_t collisions = 0, fallbacks = 0;
    for (const auto& t : trials) {
        ss += (t.team_reward - m.regret.realized) * (t.team_reward - m.regret.realized);
        collisions += t.collisions;
        fallbacks += t.fallbacks;
    }
    const double n = static_cast<double>(trials.size());
    m.team_reward_stderr = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
    m.collision_rate = static_cast<double>(collisions) / (n * plays);
    m.fallback_rate = static_cast<double>(fallbacks) / (n * plays);
    return m;
}

std::vector<LeaderSweepRow> sweep_leader_probability(const LaserParameters& laser,
                                                     const LeaderProbabilityOptions& options,
                                                     std::span<const double> kappa_bl, double kappa_or,
                                                     double kappa_ye) {
    std::vector<LeaderSweepRow> rows;
    rows.reserve(kappa_bl.size());
    for (double k : kappa_bl) {
        rows.push_back({k, leader_probability({k, kappa_or, kappa_ye}, laser, options)});
    }
    return rows;
}

std::vector<HyperSweepRow> sweep_hyperparameter(const TrialConfig& base, Hyperparameter parameter,
                                                std::span<const double> values,
                                                std::span<const EnvironmentSpec> environments,
                                                std::size_t workers) {
    if (values.empty()) throw std::invalid_argument("sweep_hyperparameter: no values");
    std::vector<HyperSweepRow> rows;
    for (double v : values) {
        for (const auto& env : environments) {
            TrialConfig cfg = base;
            cfg.environment = env;
            if (parameter == Hyperparameter::RStep) {
                cfg.dca.r_step = v;
            } else {
                cfg.dca.kappa_low = v;
            }
            const auto trials = run_experiment(cfg, workers);
            rows.push_back({v, env, summarize_metrics(trials, env)});
        }
    }
    return rows;
}

}  // namespace lknet
