// Acceptance suite: one PASS/FAIL line per criterion. Ensemble runs are
// shared between criteria through a cache keyed by configuration, so every
// distinct (environment, r_step, kappa_low) ensemble is simulated once.
//
// Worker threads: LKNET_WORKERS, else hardware concurrency.

#include "lknet/bandit.hpp"
#include "lknet/dca.hpp"
#include "lknet/experiment.hpp"
#include "lknet/seeding.hpp"
#include "lknet/sync_metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

using namespace lknet;

namespace {

constexpr std::size_t kTrials = 200;
constexpr std::size_t kLeaderRepeats = 10;
constexpr double kLeaderHorizon = 10000e-9;

std::size_t workers() {
    if (const char* env = std::getenv("LKNET_WORKERS")) return std::max(1, std::atoi(env));
    return std::max(1u, std::thread::hardware_concurrency());
}

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* name, const Outcome& o) {
    std::printf("criterion %d %s: %s | %s\n", id, o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ---- shared ensembles -----------------------------------------------------

using Key = std::tuple<std::array<double, 3>, double, double>;  // env, r_step, kappa_low
std::map<Key, std::vector<TrialSummary>> ensembles;

const std::vector<TrialSummary>& ensemble(std::array<double, 3> env, double r_step = 1.0, double kappa_low = 38e9) {
    const Key key{env, r_step, kappa_low};
    auto it = ensembles.find(key);
    if (it != ensembles.end()) return it->second;
    TrialConfig c;
    c.trials = kTrials;
    c.environment.hit_probability = env;
    c.dca.r_step = r_step;
    c.dca.kappa_low = kappa_low;
    const auto t0 = std::chrono::steady_clock::now();
    auto trials = run_experiment(c, workers());
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "  ensemble (%g, %g, %g) r_step=%g kappa_low=%g/ns: %zu trials in %.0f s\n", env[0], env[1],
                 env[2], r_step, kappa_low * 1e-9, trials.size(), s);
    return ensembles.emplace(key, std::move(trials)).first->second;
}

MetricsSummary metrics(std::array<double, 3> env, double r_step = 1.0, double kappa_low = 38e9) {
    return summarize_metrics(ensemble(env, r_step, kappa_low), {env, 0});
}

// Mean and standard error of the per-trial fraction of correct Plays over the last 10.
std::pair<double, double> end_cdr(std::array<double, 3> env, double r_step = 1.0, double kappa_low = 38e9) {
    const auto& trials = ensemble(env, r_step, kappa_low);
    const BestPair best = best_pair({env, 0});
    std::vector<double> f;
    for (const auto& t : trials) {
        double hits = 0;
        for (std::size_t m = t.selections.size() - 10; m < t.selections.size(); ++m) hits += best.matches(t.selections[m]);
        f.push_back(hits / 10.0);
    }
    double mean = 0, ss = 0;
    for (double x : f) mean += x / static_cast<double>(f.size());
    for (double x : f) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(f.size() - 1) / static_cast<double>(f.size()))};
}

// ---- leader probabilities -------------------------------------------------

std::map<double, LeaderProbabilityTable> leader_tables;

const LeaderProbabilityTable& leader_table(double kappa_bl) {
    auto it = leader_tables.find(kappa_bl);
    if (it != leader_tables.end()) return it->second;
    LeaderProbabilityOptions o;
    o.repeats = kLeaderRepeats;
    o.horizon = kLeaderHorizon;
    return leader_tables.emplace(kappa_bl, leader_probability({kappa_bl, 45e9, 45e9}, LaserParameters{}, o))
        .first->second;
}

// ---- criteria ---------------------------------------------------------------

Outcome leader_symmetry() {
    const auto& t = leader_table(45e9);
    bool ok = true;
    std::ostringstream d;
    d << "P =";
    for (double p : t.probability) {
        ok = ok && std::abs(p - 1.0 / 3.0) <= 0.05;
        d << ' ' << fmt("%.3f", p);
    }
    d << " (1/3 +- 0.05)";
    return {ok, d.str()};
}

Outcome leader_control() {
    const std::array<double, 5> grid{30e9, 38e9, 45e9, 52e9, 60e9};
    // Monotone within the symmetric-point tolerance.
    constexpr double slack = 0.05;
    std::ostringstream d;
    bool ok = true;
    double prev1 = 2.0, prev2 = 2.0;
    d << "P(1B)/P(2C):";
    for (double k : grid) {
        const auto& t = leader_table(k);
        const double p1 = t.probability[index(Node::L1B)], p2 = t.probability[index(Node::L2C)];
        d << ' ' << fmt("%.0f:", k * 1e-9) << fmt("%.3f", p1) << '/' << fmt("%.3f", p2);
        ok = ok && p1 <= prev1 + slack && p2 <= prev2 + slack;
        prev1 = p1;
        prev2 = p2;
        if (k == 30e9) ok = ok && p1 >= 0.9 && p2 >= 0.9;
        if (k == 60e9) ok = ok && p1 <= 0.1 && p2 <= 0.1;
    }
    return {ok, d.str()};
}

Outcome cluster_sync() {
    const LaserParameters p;
    const Integrator integrator(p);
    const double r = DcaConfig{}.r_ini();
    const CouplingStrengths kappa{r * r * p.base_coupling, r * r * p.base_coupling, r * r * p.base_coupling};

    std::mt19937_64 rng(stream_seed(trial_seed(1, 0), 0));
    auto net = make_network(p, 1e-12, random_initial_states(p, rng, true));
    const auto trace = integrator.simulate(net, kappa, 10000e-9, 10e-12);
    double worst = 0.0;
    for (const auto& e : cluster_sync_error(trace)) worst = std::max(worst, e.value_or(1.0));

    int synced = 0;
    const int runs = 20;
    for (int i = 0; i < runs; ++i) {
        std::mt19937_64 g(stream_seed(trial_seed(2, static_cast<std::uint64_t>(i)), 0));
        auto n = make_network(p, 1e-12, random_initial_states(p, g, false));
        integrator.simulate(n, kappa, 3000e-9, 1e-9);
        const auto t = integrator.simulate(n, kappa, 1000e-9, 10e-12);
        double e = 0.0;
        for (const auto& c : cluster_sync_error(t)) e = std::max(e, c.value_or(1.0));
        synced += e < 1e-3;
    }
    std::ostringstream d;
    d << "partner-identical max error " << fmt("%.2e", worst) << " (<= 1e-6); random init " << synced << "/" << runs
      << " below 1e-3 (>= 90%)";
    return {worst <= 1e-6 && synced >= 18, d.str()};
}

Outcome conflict_avoidance() {
    TrialConfig c;
    c.trials = 10;
    c.partner_identical = true;
    const auto manifold = run_experiment(c, workers());
    std::size_t manifold_collisions = 0;
    for (const auto& t : manifold) manifold_collisions += t.collisions;

    double worst = 0.0;
    for (const auto& env : std::vector<std::array<double, 3>>{{0.1, 0.9, 0.9}, {0.4, 0.6, 0.6}, {0.45, 0.55, 0.55}}) {
        worst = std::max(worst, metrics(env).collision_rate);
    }
    std::ostringstream d;
    d << "sync manifold: " << manifold_collisions << " collisions in " << c.trials << "x" << c.plays
      << " Plays; random init worst rate " << fmt("%.4f", worst) << " (<= 0.01)";
    return {manifold_collisions == 0 && worst <= 0.01, d.str()};
}

Outcome single_trial_convergence() {
    const auto& trials = ensemble({0.4, 0.6, 0.6});
    const std::size_t n = 50;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& k = trials[i].final_kappa;
        ok += std::abs(k[0] - 38e9) <= 0.5e9 && std::abs(k[1] - 45e9) <= 0.5e9 && std::abs(k[2] - 45e9) <= 0.5e9;
    }
    std::ostringstream d;
    d << ok << "/" << n << " trials end at kappa = (38, 45, 45) +- 0.5/ns (>= 70%)";
    return {ok * 10 >= n * 7, d.str()};
}

Outcome cdr_regression() {
    const auto easy = metrics({0.1, 0.9, 0.9});
    const auto mid = metrics({0.4, 0.6, 0.6});
    const auto hard = metrics({0.45, 0.55, 0.55});
    // Still rising: least-squares slope of CDR over the final 300 Plays.
    const std::size_t from = hard.cdr.size() - 300;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t m = from; m < hard.cdr.size(); ++m) {
        const double x = static_cast<double>(m);
        sx += x;
        sy += hard.cdr[m];
        sxx += x * x;
        sxy += x * hard.cdr[m];
    }
    const double n = 300.0;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    const bool ok = std::abs(easy.mean_cdr - 0.956) <= 0.05 && std::abs(easy.regret.relative - 0.020) <= 0.01 &&
                    std::abs(mid.mean_cdr - 0.887) <= 0.06 && std::abs(hard.mean_cdr - 0.752) <= 0.08 && slope > 0.0;
    std::ostringstream d;
    d << "(0.1,0.9,0.9) CDR " << fmt("%.3f", easy.mean_cdr) << " rel regret " << fmt("%.4f", easy.regret.relative)
      << "; (0.4,0.6,0.6) CDR " << fmt("%.3f", mid.mean_cdr) << "; (0.45,0.55,0.55) CDR " << fmt("%.3f", hard.mean_cdr)
      << " tail slope " << fmt("%.2e", slope) << "/Play";
    return {ok, d.str()};
}

Outcome asymmetric_order() {
    const auto slow = metrics({0.1, 0.9, 0.3});
    const auto fast = metrics({0.1, 0.3, 0.9});
    const double a = slow.cdr[299], b = fast.cdr[299];
    const double n = static_cast<double>(kTrials);
    const double se = std::sqrt(a * (1 - a) / n + b * (1 - b) / n);
    const double z = se > 0 ? (b - a) / se : 0.0;
    const auto ea = end_cdr({0.1, 0.9, 0.3}), eb = end_cdr({0.1, 0.3, 0.9});
    std::ostringstream d;
    d << "CDR(300) " << fmt("%.3f", a) << " vs " << fmt("%.3f", b) << " z = " << fmt("%.2f", z)
      << " (> 1.96); end CDR " << fmt("%.3f", ea.first) << " vs " << fmt("%.3f", eb.first) << " (within 0.05)";
    return {z > 1.96 && std::abs(ea.first - eb.first) <= 0.05, d.str()};
}

Outcome hyperparameter_trends() {
    const std::array<double, 3> mid{0.4, 0.6, 0.6}, easy{0.1, 0.9, 0.9};
    const auto r025 = end_cdr(mid, 0.25), r05 = end_cdr(mid, 0.5), r1 = end_cdr(mid, 1.0);
    const bool monotone = r025.first <= r05.first && r05.first <= r1.first;

    auto versus = [](std::pair<double, double> a, std::pair<double, double> b) {
        return (a.first - b.first) / std::sqrt(a.second * a.second + b.second * b.second);
    };
    const double z_easy = versus(end_cdr(easy, 1.0, 30e9), end_cdr(easy, 1.0, 38e9));
    const double z_mid = versus(end_cdr(mid, 1.0, 38e9), end_cdr(mid, 1.0, 30e9));

    std::ostringstream d;
    d << "end CDR r_step 0.25/0.5/1.0: " << fmt("%.3f", r025.first) << "/" << fmt("%.3f", r05.first) << "/"
      << fmt("%.3f", r1.first) << " (non-decreasing); kappa_low 30 over 38 on (0.1,0.9,0.9) by " << fmt("%.2f", z_easy)
      << " SE, 38 over 30 on (0.4,0.6,0.6) by " << fmt("%.2f", z_mid) << " SE (> 2)";
    return {monotone && z_easy > 2.0 && z_mid > 2.0, d.str()};
}

Outcome property_suites() {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::ostringstream d;

    // Excess probabilities and attenuations against a direct recomputation.
    int mismatches = 0;
    const DcaConfig cfg;
    for (int i = 0; i < 10000; ++i) {
        const SlotValues p{u(rng), u(rng), u(rng)};
        const double best = std::max({p[0], p[1], p[2]});
        const double baseline = p[0] + p[1] + p[2] - best;
        const auto q = excess_probabilities(p);
        const auto r = attenuation_update(q, cfg);
        for (std::size_t s = 0; s < 3; ++s) {
            const double qs = 2 * p[s] - baseline;
            const double rs = std::clamp(cfg.r_ini() + cfg.r_step * qs, cfg.r_low(), cfg.r_upp());
            mismatches += std::abs(q[s] - qs) > 1e-12 || std::abs(r[s] - rs) > 1e-12;
        }
    }
    d << "DCA mismatches " << mismatches;

    // STCC bounds and leader invariance under positive affine rescaling.
    int stcc_bad = 0;
    std::exponential_distribution<double> e(1.0);
    for (int i = 0; i < 1000; ++i) {
        IntensityTrace t;
        t.samples.resize(100);
        for (auto& s : t.samples) {
            for (auto& x : s) x = e(rng);
        }
        auto scaled = t;
        const double a = 0.01 + 100 * u(rng), b = 10 * u(rng);
        for (auto& s : scaled.samples) {
            for (auto& x : s) x = a * x + b;
        }
        const auto s1 = stcc_set(t, 100, 50), s2 = stcc_set(scaled, 100, 50);
        for (const auto& v : s1.values) stcc_bad += !v || *v < -1.0 || *v > 1.0;
        for (std::size_t p = 0; p < kPlayerCount; ++p) stcc_bad += leader_of(s1.player(p)) != leader_of(s2.player(p));
    }
    d << ", STCC violations " << stcc_bad;

    // Environment Monte-Carlo against the payoff matrix.
    const EnvironmentSpec env{{0.4, 0.6, 0.6}};
    const auto matrix = expected_payoff_matrix(env);
    int cells_off = 0;
    for (Slot p1 : kAllSlots) {
        for (Slot p2 : kAllSlots) {
            std::array<double, 2> sum{}, sq{};
            const int n = 100000;
            for (int i = 0; i < n; ++i) {
                const auto o = pull(env, {p1, p2}, rng);
                for (int k = 0; k < 2; ++k) {
                    sum[k] += o.rewards[k];
                    sq[k] += o.rewards[k] * o.rewards[k];
                }
            }
            for (int k = 0; k < 2; ++k) {
                const double mean = sum[k] / n, se = std::sqrt((sq[k] / n - mean * mean) / n);
                cells_off += std::abs(mean - matrix.expected(p1, p2)[k]) > 3 * se;
            }
        }
    }
    d << ", payoff cells outside 3 SE " << cells_off;

    // Deterministic replay across worker counts.
    TrialConfig c;
    c.trials = 6;
    c.plays = 100;
    c.transient = 100e-9;
    const auto one = run_experiment(c, 1);
    const auto many = run_experiment(c, 4);
    bool same = one.size() == many.size();
    for (std::size_t i = 0; same && i < one.size(); ++i) {
        same = one[i].selections == many[i].selections && one[i].team_reward == many[i].team_reward &&
               one[i].final_kappa == many[i].final_kappa;
    }
    d << ", replay 1 vs 4 workers " << (same ? "identical" : "DIFFERS");
    return {mismatches == 0 && stcc_bad == 0 && cells_off == 0 && same, d.str()};
}

}  // namespace

int main() {
    std::printf("acceptance suite, %zu worker(s)\n", workers());
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    report(9, "property suites", property_suites());
    report(1, "leader-probability symmetry", leader_symmetry());
    report(2, "leader-probability control", leader_control());
    report(3, "cluster synchronisation", cluster_sync());
    report(6, "CDR / regret regression", cdr_regression());
    report(4, "conflict avoidance", conflict_avoidance());
    report(5, "single-trial convergence", single_trial_convergence());
    report(7, "asymmetric-order effect", asymmetric_order());
    report(8, "hyperparameter trends", hyperparameter_trends());
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d criterion(s) failed, %.0f s\n", failures, s);
    return failures == 0 ? 0 : 1;
}
