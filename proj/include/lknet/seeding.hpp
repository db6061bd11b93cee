#pragma once

#include <cstdint>

namespace lknet {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Per-trial seed from (base ^ index); independent of scheduling order.
[[nodiscard]] constexpr std::uint64_t trial_seed(std::uint64_t base, std::uint64_t index) noexcept {
    return splitmix64(base ^ index);
}

/// Independent sub-stream of a trial seed (laser init, rewards, noise).
[[nodiscard]] constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed + 0x632be59bd9b4e019ULL * (stream + 1));
}

}  // namespace lknet
