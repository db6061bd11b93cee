#pragma once

// Decentralised coupling adjustment. Each player keeps full-history hit
// estimates of the three slots, turns them into excess hit probabilities
//   Q_X = 2 P_X - (P_2nd + P_3rd)
// and sets its attenuation on colour c to clamp(r_ini + r_step Q_S(c),
// r_low, r_upp) with S(bl) = A, S(or) = B, S(ye) = C. Nothing is shared
// between players; the network multiplies the two attenuations.

#include "lknet/network.hpp"
#include "lknet/slot.hpp"

#include <array>
#include <cstdint>

namespace lknet {

/// What a player books as the outcome of a collided Play.
enum class CollisionRecord : std::uint8_t {
    Amount,  // the split reward actually received (1/2 on a hit)
    Hit,     // the slot's hit flag (1 on a hit)
};

struct DcaConfig {
    double r_step = 1.0;
    double kappa_low = 38e9;   // 1/s
    double kappa_upp = 45e9;   // 1/s
    double base = 155.3e9;     // 1/s
    double unvisited_estimate = 0.5;  // P estimate before a slot's first selection
    CollisionRecord collision_record = CollisionRecord::Amount;

    void validate() const;
    [[nodiscard]] double r_low() const noexcept;
    [[nodiscard]] double r_upp() const noexcept;
    [[nodiscard]] double r_ini() const noexcept { return 0.5 * (r_low() + r_upp()); }

    friend bool operator==(const DcaConfig&, const DcaConfig&) = default;
};

/// Colour c is steered by slot S(c); the mapping is the identity on indices.
[[nodiscard]] constexpr Slot slot_of(Color c) noexcept { return static_cast<Slot>(index(c)); }
[[nodiscard]] constexpr Color color_of(Slot s) noexcept { return static_cast<Color>(index(s)); }

using SlotValues = std::array<double, kSlotCount>;
using Attenuations = std::array<double, kColorCount>;

struct PlayerState {
    std::array<std::uint64_t, kSlotCount> selections{};
    SlotValues accumulated{};
    Attenuations attenuation{};

    [[nodiscard]] SlotValues observed(double unvisited_estimate = 0.0) const noexcept;
};

[[nodiscard]] PlayerState initial_player(const DcaConfig& config);

void update_estimates(PlayerState& player, Slot slot, double reward);

[[nodiscard]] SlotValues excess_probabilities(const SlotValues& observed);

[[nodiscard]] Attenuations attenuation_update(const SlotValues& excess, const DcaConfig& config);

[[nodiscard]] CouplingStrengths effective_couplings(const Attenuations& player1, const Attenuations& player2,
                                                    double base);

/// Books one Play's outcome and recomputes the player's attenuations.
/// Returns the Q values used.
SlotValues dca_step(PlayerState& player, Slot slot, double reward, bool hit, bool collided,
                    const DcaConfig& config);

}  // namespace lknet
