#include "lknet/dca.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace lknet {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

void DcaConfig::validate() const {
    if (!(base > 0.0)) throw InvalidParameter("base coupling must be positive");
    if (!(kappa_low > 0.0 && kappa_low <= kappa_upp && kappa_upp <= base)) {
        throw InvalidParameter("coupling bounds must satisfy 0 < kappa_low <= kappa_upp <= kappa, got kappa_low = " +
                               fmt(kappa_low * 1e-9) + "/ns, kappa_upp = " + fmt(kappa_upp * 1e-9) +
                               "/ns, kappa = " + fmt(base * 1e-9) + "/ns");
    }
    if (!(r_step >= 0.0) || !std::isfinite(r_step)) throw InvalidParameter("r_step must be >= 0");
    if (!(unvisited_estimate >= 0.0 && unvisited_estimate <= 1.0)) {
        throw InvalidParameter("unvisited_estimate must lie in [0, 1]");
    }
}

double DcaConfig::r_low() const noexcept { return std::sqrt(kappa_low / base); }
double DcaConfig::r_upp() const noexcept { return std::sqrt(kappa_upp / base); }

SlotValues PlayerState::observed(double unvisited_estimate) const noexcept {
    SlotValues p{};
    for (std::size_t s = 0; s < kSlotCount; ++s) {
        p[s] = selections[s] > 0 ? accumulated[s] / static_cast<double>(selections[s]) : unvisited_estimate;
    }
    return p;
}

PlayerState initial_player(const DcaConfig& config) {
    PlayerState p;
    p.attenuation.fill(config.r_ini());
    return p;
}

void update_estimates(PlayerState& player, Slot slot, double reward) {
    ++player.selections[index(slot)];
    player.accumulated[index(slot)] += reward;
}

SlotValues excess_probabilities(const SlotValues& observed) {
    std::array<std::size_t, kSlotCount> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return observed[a] > observed[b]; });
    const double baseline = observed[order[1]] + observed[order[2]];
    SlotValues q{};
    for (std::size_t s = 0; s < kSlotCount; ++s) q[s] = 2.0 * observed[s] - baseline;
    return q;
}

Attenuations attenuation_update(const SlotValues& excess, const DcaConfig& config) {
    const double lo = config.r_low();
    const double hi = config.r_upp();
    const double ini = 0.5 * (lo + hi);
    Attenuations r{};
    for (std::size_t c = 0; c < kColorCount; ++c) {
        const double target = ini + config.r_step * excess[index(slot_of(static_cast<Color>(c)))];
        r[c] = target < lo ? lo : (hi < target ? hi : target);
    }
    return r;
}

CouplingStrengths effective_couplings(const Attenuations& player1, const Attenuations& player2, double base) {
    CouplingStrengths k{};
    for (std::size_t c = 0; c < kColorCount; ++c) k[c] = player1[c] * player2[c] * base;
    return k;
}

SlotValues dca_step(PlayerState& player, Slot slot, double reward, bool hit, bool collided,
                    const DcaConfig& config) {
    const double booked =
        collided && config.collision_record == CollisionRecord::Hit ? (hit ? 1.0 : 0.0) : reward;
    update_estimates(player, slot, booked);
    const SlotValues q = excess_probabilities(player.observed(config.unvisited_estimate));
    player.attenuation = attenuation_update(q, config);
    return q;
}

}  // namespace lknet
