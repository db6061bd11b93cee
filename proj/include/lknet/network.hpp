#pragma once

// Six-laser unidirectionally delay-coupled network and its fixed-step
// integrator.
//
// Node order is 1A, 1B, 1C, 2A, 2B, 2C. Edges (colour of the coupling path):
//   1A -> 1B (bl)   2B -> 2C (bl)
//   1B -> 1C (or)   1B -> 2A (or)
//   2A -> 1A (ye)   2A -> 2B (ye)
// Clusters: bl = {1A, 2B}, or = {1B, 2C}, ye = {1C, 2A}.

#include "lknet/laser.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lknet {

inline constexpr std::size_t kNodeCount = 6;
inline constexpr std::size_t kColorCount = 3;

enum class Node : std::uint8_t { L1A, L1B, L1C, L2A, L2B, L2C };
enum class Color : std::uint8_t { Blue, Orange, Yellow };

inline constexpr std::array<Node, kNodeCount> kAllNodes{Node::L1A, Node::L1B, Node::L1C,
                                                        Node::L2A, Node::L2B, Node::L2C};

[[nodiscard]] constexpr std::size_t index(Node n) noexcept { return static_cast<std::size_t>(n); }
[[nodiscard]] constexpr std::size_t index(Color c) noexcept { return static_cast<std::size_t>(c); }

[[nodiscard]] std::string_view name(Node n) noexcept;
[[nodiscard]] std::string_view name(Color c) noexcept;

struct Edge {
    Node from;
    Node to;
    Color color;
};

inline constexpr std::array<Edge, kNodeCount> kEdges{{
    {Node::L1A, Node::L1B, Color::Blue},
    {Node::L2B, Node::L2C, Color::Blue},
    {Node::L1B, Node::L1C, Color::Orange},
    {Node::L1B, Node::L2A, Color::Orange},
    {Node::L2A, Node::L1A, Color::Yellow},
    {Node::L2A, Node::L2B, Color::Yellow},
}};

/// The unique in-edge of `n`.
[[nodiscard]] constexpr const Edge& in_edge(Node n) noexcept {
    for (const auto& e : kEdges) {
        if (e.to == n) return e;
    }
    return kEdges[0];  // unreachable: every node has in-degree 1
}

[[nodiscard]] constexpr Color cluster_of(Node n) noexcept {
    constexpr std::array<Color, kNodeCount> table{Color::Blue,   Color::Orange, Color::Yellow,
                                                  Color::Yellow, Color::Blue,   Color::Orange};
    return table[index(n)];
}

/// Zero-lag synchronisation partner: 1A<->2B, 1B<->2C, 1C<->2A.
[[nodiscard]] constexpr Node partner(Node n) noexcept {
    constexpr std::array<Node, kNodeCount> table{Node::L2B, Node::L2C, Node::L2A,
                                                 Node::L1C, Node::L1A, Node::L1B};
    return table[index(n)];
}

/// Effective coupling per colour (bl, or, ye), in 1/s.
using CouplingStrengths = std::array<double, kColorCount>;

/// Per-player attenuation rates on the three coloured paths. The effective
/// strength of colour c is r1[c] * r2[c] * base, applied to both edges of c.
struct CouplingConfig {
    double base = 155.3e9;
    std::array<double, kColorCount> player1{1.0, 1.0, 1.0};
    std::array<double, kColorCount> player2{1.0, 1.0, 1.0};

    void validate() const;
    [[nodiscard]] CouplingStrengths strengths() const noexcept;
};

/// Ring buffer realising E(t - tau) for one laser. Holds exactly the last
/// `length` pushed samples; the oldest one is the value `length` steps back.
class DelayLine {
public:
    DelayLine() = default;
    DelayLine(std::size_t length, Complex fill) : buffer_(length, fill) {
        if (length == 0) throw InvalidParameter("delay line length must be >= 1");
    }

    [[nodiscard]] std::size_t length() const noexcept { return buffer_.size(); }

    /// Sample pushed `steps_back` pushes ago (1 = most recent, length() = oldest).
    [[nodiscard]] Complex at(std::size_t steps_back) const {
        if (steps_back == 0 || steps_back > buffer_.size()) throw std::out_of_range("DelayLine::at");
        const std::size_t n = buffer_.size();
        return buffer_[(head_ + n - steps_back) % n];
    }
    [[nodiscard]] Complex oldest() const noexcept { return buffer_[head_]; }
    /// One step younger than oldest(); for length 1 this is the live value.
    [[nodiscard]] Complex second_oldest(Complex live) const noexcept {
        if (buffer_.size() == 1) return live;
        const std::size_t i = head_ + 1 == buffer_.size() ? 0 : head_ + 1;
        return buffer_[i];
    }
    void push(Complex value) noexcept {
        buffer_[head_] = value;
        if (++head_ == buffer_.size()) head_ = 0;
    }

    friend bool operator==(const DelayLine&, const DelayLine&) = default;

private:
    std::vector<Complex> buffer_;
    std::size_t head_ = 0;
};

class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double time, std::string_view detail);
    [[nodiscard]] double time() const noexcept { return time_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    double time_;
    std::string detail_;
};

struct NetworkState {
    std::array<LaserState, kNodeCount> lasers{};
    std::array<DelayLine, kNodeCount> history{};
    std::int64_t steps = 0;
    double dt = 1e-12;

    [[nodiscard]] double time() const noexcept { return static_cast<double>(steps) * dt; }
    [[nodiscard]] std::array<double, kNodeCount> intensities() const noexcept;

    friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

/// Number of integration steps per coupling delay; throws InvalidParameter
/// unless dt divides tau exactly (to 1e-9 relative).
std::size_t delay_steps(double delay, double dt);

/// Integer count of `dt` steps in `interval`; throws unless exact.
std::int64_t steps_in(double interval, double dt, std::string_view what);

/// Builds a network at t = 0 with every delay line pre-filled with the
/// corresponding initial field.
NetworkState make_network(const LaserParameters& params, double dt,
                          std::span<const LaserState, kNodeCount> initial);

/// Random initial states: E = 1e-3 sqrt(S_sol) exp(i theta), theta ~ U[0, 2pi),
/// N = N_0. With `partner_identical`, cluster partners share their draw.
std::array<LaserState, kNodeCount> random_initial_states(const LaserParameters& params,
                                                         std::mt19937_64& rng,
                                                         bool partner_identical = false);

struct IntegratorSettings {
    double dt = 1e-12;
    // Additive complex white noise on dE/dt, increment sqrt(D dt) (g1 + i g2)
    // per step with g ~ N(0, 1). Zero disables it.
    double noise_strength = 0.0;
};

/// Intensities |E_k|^2 sampled on a uniform grid.
struct IntensityTrace {
    double start_time = 0.0;
    double sample_interval = 0.0;
    std::vector<std::array<double, kNodeCount>> samples;

    [[nodiscard]] std::vector<double> series(Node n) const;
};

/// Classical RK4 for the coupled delay equations. Delayed inputs at the
/// stage mid-points are linearly interpolated between adjacent samples.
class Integrator {
public:
    Integrator(const LaserParameters& params, IntegratorSettings settings = {});

    [[nodiscard]] const LaserParameters& params() const noexcept { return params_; }
    [[nodiscard]] const DerivedConstants& derived() const noexcept { return derived_; }
    [[nodiscard]] double dt() const noexcept { return settings_.dt; }
    [[nodiscard]] std::size_t delay_steps() const noexcept { return delay_steps_; }

    /// Advances every laser by one step. `noise_rng` is only consulted when
    /// noise_strength > 0.
    void step(NetworkState& net, const CouplingStrengths& kappa,
              std::mt19937_64* noise_rng = nullptr) const;

    /// Runs `steps` steps, calling on_sample(net) after every `sample_every`-th.
    template <class OnSample>
    void advance(NetworkState& net, const CouplingStrengths& kappa, std::int64_t steps,
                 std::int64_t sample_every, OnSample&& on_sample,
                 std::mt19937_64* noise_rng = nullptr) const {
        for (std::int64_t i = 1; i <= steps; ++i) {
            step(net, kappa, noise_rng);
            if (sample_every > 0 && i % sample_every == 0) on_sample(net);
        }
    }

    IntensityTrace simulate(NetworkState& net, const CouplingStrengths& kappa, double duration,
                            double sample_interval, std::mt19937_64* noise_rng = nullptr) const;

private:
    LaserParameters params_;
    IntegratorSettings settings_;
    DerivedConstants derived_;
    Complex phase_factor_;
    std::size_t delay_steps_;
};

}  // namespace lknet
