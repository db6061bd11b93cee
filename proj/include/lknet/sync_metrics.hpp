#pragma once

// Short-term cross-correlation (STCC), leader detection and cluster
// synchronisation measures.

#include "lknet/network.hpp"
#include "lknet/slot.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace lknet {

class NotEnoughSamples : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Windows whose standard deviation falls below this fraction of their mean
/// magnitude are treated as constant.
inline constexpr double kDegenerateRelativeStd = 1e-9;

/// Pearson correlation of `current` (I_k over [t - tau, t]) with `delayed`
/// (I_l over [t - 2 tau, t - tau]). Empty when either window is constant.
[[nodiscard]] std::optional<double> stcc(std::span<const double> current,
                                         std::span<const double> delayed);

/// STCC value per laser in node order (C_1A ... C_2C); nullopt marks a
/// degenerate window pair.
struct StccSet {
    std::array<std::optional<double>, kNodeCount> values{};

    [[nodiscard]] std::array<std::optional<double>, kSlotCount> player(std::size_t p) const noexcept {
        return {values[3 * p], values[3 * p + 1], values[3 * p + 2]};
    }
    [[nodiscard]] bool all_degenerate() const noexcept;
};

/// The laser whose delayed intensity is correlated against `n`: its driver
/// within the player's effective ring A -> B -> C -> A (1C stands in for 2A
/// and 2C for 1B on the cluster-synchronised manifold). A laser that is not
/// lag-synchronised to its driver scores lowest and is the leader.
[[nodiscard]] constexpr Node stcc_partner(Node n) noexcept {
    constexpr std::array<Node, kNodeCount> table{Node::L1C, Node::L1A, Node::L1B,
                                                 Node::L2C, Node::L2A, Node::L2B};
    return table[index(n)];
}

/// Rolling record of the six intensities on the STCC sampling grid, long
/// enough to hold [t - 2 tau, t].
class IntensityHistory {
public:
    explicit IntensityHistory(std::size_t window_samples);

    void push(const std::array<double, kNodeCount>& sample);
    void clear() noexcept;

    [[nodiscard]] std::size_t window() const noexcept { return window_; }
    [[nodiscard]] std::size_t size() const noexcept { return count_; }
    [[nodiscard]] bool ready() const noexcept { return count_ >= 2 * window_; }

    /// Samples of `n` oldest-first over the most recent 2 * window() entries.
    void copy_span(Node n, std::span<double> out) const;

private:
    std::size_t window_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    std::vector<std::array<double, kNodeCount>> ring_;
};

/// STCC set at the newest sample of `history`.
[[nodiscard]] StccSet stcc_set(const IntensityHistory& history);

/// STCC set at sample `end` (exclusive) of a trace, windows of `window` samples.
[[nodiscard]] StccSet stcc_set(const IntensityTrace& trace, std::size_t end, std::size_t window);

/// Argmin of a player's three STCC values; ties resolve A < B < C. Empty
/// when all three are degenerate.
[[nodiscard]] std::optional<Slot> leader_of(const std::array<std::optional<double>, kSlotCount>& values);

/// RMS(I_a - I_b) / RMS(I_a - mean I_a) per cluster (bl, or, ye); empty for
/// a constant reference trace.
[[nodiscard]] std::array<std::optional<double>, kColorCount> cluster_sync_error(
    const IntensityTrace& trace, std::size_t first_sample = 0);

struct LeaderProbabilityOptions {
    double transient = 3000e-9;         // s, discarded
    double horizon = 10000e-9;          // s, measured after the transient
    double decision_interval = 1e-9;    // s
    double sample_interval = 10e-12;    // s, STCC grid
    std::size_t repeats = 50;
    std::uint64_t seed = 1;
    bool partner_identical = false;
    IntegratorSettings integrator{};
};

struct LeaderProbabilityTable {
    std::array<double, kNodeCount> probability{};  // per laser
    std::array<double, kColorCount> cluster{};     // mean of the two members
    std::size_t repeats = 0;
    std::uint64_t decisions = 0;  // per repeat
    std::uint64_t no_leader = 0;  // summed over repeats and players
};

[[nodiscard]] LeaderProbabilityTable leader_probability(const CouplingStrengths& kappa,
                                                        const LaserParameters& params,
                                                        const LeaderProbabilityOptions& options);

}  // namespace lknet
