#include "lknet/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace lknet {

void EnvironmentSpec::validate() const {
    for (double p : hit_probability) {
        if (!(p >= 0.0 && p <= 1.0)) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", p);
            throw std::invalid_argument(std::string("hit probability must lie in [0, 1], got ") + buf);
        }
    }
}

PlayOutcome pull(const EnvironmentSpec& spec, const Selection& selections, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    PlayOutcome out;
    out.selections = selections;
    out.collision = selections[0] == selections[1];

    std::array<int, kSlotCount> selectors{};
    for (Slot s : selections) ++selectors[index(s)];
    for (Slot s : kAllSlots) {
        if (selectors[index(s)] > 0) out.hit[index(s)] = uniform(rng) < spec.probability(s);
    }
    for (std::size_t p = 0; p < kPlayerCount; ++p) {
        const std::size_t s = index(selections[p]);
        out.rewards[p] = out.hit[s] ? 1.0 / selectors[s] : 0.0;
    }
    return out;
}

PayoffMatrix::PayoffMatrix(const EnvironmentSpec& spec) {
    spec.validate();
    for (Slot p2 : kAllSlots) {
        for (Slot p1 : kAllSlots) {
            auto& cell = cells_[index(p2)][index(p1)];
            if (p1 == p2) {
                cell = {0.5 * spec.probability(p1), 0.5 * spec.probability(p1)};
            } else {
                cell = {spec.probability(p1), spec.probability(p2)};
            }
        }
    }
}

BestPair best_pair(const EnvironmentSpec& spec) {
    spec.validate();
    std::array<Slot, kSlotCount> order = kAllSlots;
    std::stable_sort(order.begin(), order.end(),
                     [&](Slot a, Slot b) { return spec.probability(a) > spec.probability(b); });
    return {order[0], order[1], spec.probability(order[0]) + spec.probability(order[1])};
}

}  // namespace lknet
