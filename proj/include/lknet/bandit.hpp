#pragma once

// Two-player, three-slot competitive bandit with Bernoulli slots. A slot
// selected by both players is drawn once and its payout is split.

#include "lknet/slot.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace lknet {

struct EnvironmentSpec {
    std::array<double, kSlotCount> hit_probability{0.4, 0.6, 0.6};
    std::uint64_t seed = 0;

    void validate() const;
    [[nodiscard]] double probability(Slot s) const noexcept { return hit_probability[index(s)]; }

    friend bool operator==(const EnvironmentSpec&, const EnvironmentSpec&) = default;
};

using Selection = std::array<Slot, kPlayerCount>;

struct PlayOutcome {
    Selection selections{};
    std::array<bool, kSlotCount> hit{};  // only meaningful for selected slots
    std::array<double, kPlayerCount> rewards{};
    bool collision = false;

    [[nodiscard]] double team_reward() const noexcept { return rewards[0] + rewards[1]; }
};

/// One Bernoulli draw per distinct selected slot, in slot order.
PlayOutcome pull(const EnvironmentSpec& spec, const Selection& selections, std::mt19937_64& rng);

/// Expected (player 1, player 2) rewards for every selection pair.
class PayoffMatrix {
public:
    explicit PayoffMatrix(const EnvironmentSpec& spec);

    [[nodiscard]] const std::array<double, kPlayerCount>& expected(Slot player1, Slot player2) const noexcept {
        return cells_[index(player2)][index(player1)];
    }
    [[nodiscard]] double team(Slot player1, Slot player2) const noexcept {
        const auto& c = expected(player1, player2);
        return c[0] + c[1];
    }

private:
    // Row: player 2's slot, column: player 1's slot.
    std::array<std::array<std::array<double, kPlayerCount>, kSlotCount>, kSlotCount> cells_{};
};

[[nodiscard]] inline PayoffMatrix expected_payoff_matrix(const EnvironmentSpec& spec) {
    return PayoffMatrix(spec);
}

struct BestPair {
    Slot first;   // highest hit probability
    Slot second;  // runner-up
    double reward_per_play;

    [[nodiscard]] bool matches(const Selection& s) const noexcept {
        return (s[0] == first && s[1] == second) || (s[0] == second && s[1] == first);
    }
};

/// Top two slots by hit probability, ties toward the lower letter.
[[nodiscard]] BestPair best_pair(const EnvironmentSpec& spec);

}  // namespace lknet
