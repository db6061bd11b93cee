#include "lknet/network.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace lknet {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string_view name(Node n) noexcept {
    constexpr std::array<std::string_view, kNodeCount> names{"1A", "1B", "1C", "2A", "2B", "2C"};
    return names[index(n)];
}

std::string_view name(Color c) noexcept {
    constexpr std::array<std::string_view, kColorCount> names{"bl", "or", "ye"};
    return names[index(c)];
}

void CouplingConfig::validate() const {
    if (!(base >= 0.0) || !std::isfinite(base)) throw InvalidParameter("base coupling must be >= 0");
    for (std::size_t c = 0; c < kColorCount; ++c) {
        for (double r : {player1[c], player2[c]}) {
            if (!(r > 0.0 && r <= 1.0)) {
                throw InvalidParameter("attenuation rate must lie in (0, 1], got " + fmt(r));
            }
        }
    }
}

CouplingStrengths CouplingConfig::strengths() const noexcept {
    CouplingStrengths k{};
    for (std::size_t c = 0; c < kColorCount; ++c) k[c] = player1[c] * player2[c] * base;
    return k;
}

DivergenceError::DivergenceError(double time, std::string_view detail)
    : std::runtime_error("numerical divergence at t = " + fmt(time * 1e9) + " ns: " + std::string(detail)),
      time_(time),
      detail_(detail) {}

std::array<double, kNodeCount> NetworkState::intensities() const noexcept {
    std::array<double, kNodeCount> out{};
    for (std::size_t k = 0; k < kNodeCount; ++k) out[k] = lasers[k].intensity();
    return out;
}

std::int64_t steps_in(double interval, double dt, std::string_view what) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("dt must be positive");
    if (!(interval >= 0.0) || !std::isfinite(interval)) {
        throw InvalidParameter(std::string(what) + " must be non-negative");
    }
    const double ratio = interval / dt;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw InvalidParameter(std::string(what) + " (" + fmt(interval) + " s) is not a multiple of dt (" +
                               fmt(dt) + " s)");
    }
    return static_cast<std::int64_t>(rounded);
}

std::size_t delay_steps(double delay, double dt) {
    const auto n = steps_in(delay, dt, "coupling delay");
    if (n < 1) throw InvalidParameter("dt must not exceed the coupling delay");
    return static_cast<std::size_t>(n);
}

NetworkState make_network(const LaserParameters& params, double dt,
                          std::span<const LaserState, kNodeCount> initial) {
    NetworkState net;
    net.dt = dt;
    const std::size_t n = delay_steps(params.coupling_delay, dt);
    for (std::size_t k = 0; k < kNodeCount; ++k) {
        net.lasers[k] = initial[k];
        net.history[k] = DelayLine(n, initial[k].field);
    }
    return net;
}

std::array<LaserState, kNodeCount> random_initial_states(const LaserParameters& params,
                                                         std::mt19937_64& rng,
                                                         bool partner_identical) {
    const double amplitude = 1e-3 * std::sqrt(solitary_steady_state(params).intensity);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::array<LaserState, kNodeCount> out{};
    for (Node n : kAllNodes) {
        if (partner_identical && index(partner(n)) < index(n)) {
            out[index(n)] = out[index(partner(n))];
            continue;
        }
        out[index(n)] = {std::polar(amplitude, angle(rng)), params.transparency_density};
    }
    return out;
}

std::vector<double> IntensityTrace::series(Node n) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s[index(n)]);
    return out;
}

Integrator::Integrator(const LaserParameters& params, IntegratorSettings settings)
    : params_(params), settings_(settings), derived_(derived_constants(params)) {
    if (!(settings_.noise_strength >= 0.0)) throw InvalidParameter("noise_strength must be >= 0");
    delay_steps_ = lknet::delay_steps(params_.coupling_delay, settings_.dt);
    phase_factor_ = std::polar(1.0, -derived_.feedback_phase);
}

void Integrator::step(NetworkState& net, const CouplingStrengths& kappa,
                      std::mt19937_64* noise_rng) const {
    if (net.dt != settings_.dt || net.history[0].length() != delay_steps_) {
        throw InvalidParameter("network state was built for a different step size");
    }
    const double h = settings_.dt;
    const double j = derived_.injection_current;

    // Delayed drive of each node at t, t + h/2 and t + h.
    std::array<Complex, kNodeCount> drive0, drive_half, drive1;
    for (std::size_t k = 0; k < kNodeCount; ++k) {
        const Edge& e = in_edge(static_cast<Node>(k));
        const std::size_t src = index(e.from);
        const Complex gain = kappa[index(e.color)] * phase_factor_;
        const Complex d0 = net.history[src].oldest();
        const Complex d1 = net.history[src].second_oldest(net.lasers[src].field);
        drive0[k] = gain * d0;
        drive1[k] = gain * d1;
        drive_half[k] = 0.5 * (drive0[k] + drive1[k]);
    }

    std::array<LaserState, kNodeCount> next;
    for (std::size_t k = 0; k < kNodeCount; ++k) {
        const LaserState& s = net.lasers[k];
        const auto k1 = field_derivative(s, drive0[k], params_, j);
        const auto k2 = field_derivative({s.field + 0.5 * h * k1.field, s.carriers + 0.5 * h * k1.carriers},
                                         drive_half[k], params_, j);
        const auto k3 = field_derivative({s.field + 0.5 * h * k2.field, s.carriers + 0.5 * h * k2.carriers},
                                         drive_half[k], params_, j);
        const auto k4 = field_derivative({s.field + h * k3.field, s.carriers + h * k3.carriers},
                                         drive1[k], params_, j);
        next[k].field = s.field + (h / 6.0) * (k1.field + 2.0 * (k2.field + k3.field) + k4.field);
        next[k].carriers = s.carriers + (h / 6.0) * (k1.carriers + 2.0 * (k2.carriers + k3.carriers) + k4.carriers);
    }

    if (settings_.noise_strength > 0.0 && noise_rng != nullptr) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double scale = std::sqrt(settings_.noise_strength * h);
        for (auto& s : next) s.field += scale * Complex(gauss(*noise_rng), gauss(*noise_rng));
    }

    for (std::size_t k = 0; k < kNodeCount; ++k) {
        if (!std::isfinite(next[k].field.real()) || !std::isfinite(next[k].field.imag()) ||
            !std::isfinite(next[k].carriers)) {
            throw DivergenceError(net.time() + h, "non-finite state in laser " +
                                                      std::string(name(static_cast<Node>(k))));
        }
    }

    for (std::size_t k = 0; k < kNodeCount; ++k) net.history[k].push(net.lasers[k].field);
    net.lasers = next;
    ++net.steps;
}

IntensityTrace Integrator::simulate(NetworkState& net, const CouplingStrengths& kappa,
                                    double duration, double sample_interval,
                                    std::mt19937_64* noise_rng) const {
    const auto every = steps_in(sample_interval, settings_.dt, "sample interval");
    if (every < 1) throw InvalidParameter("sample interval must be >= dt");
    const auto total = steps_in(duration, settings_.dt, "duration");

    IntensityTrace trace;
    trace.start_time = net.time();
    trace.sample_interval = sample_interval;
    trace.samples.reserve(static_cast<std::size_t>(total / every));
    advance(net, kappa, total, every,
            [&](const NetworkState& s) { trace.samples.push_back(s.intensities()); }, noise_rng);
    return trace;
}

}  // namespace lknet
