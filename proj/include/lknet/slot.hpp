#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace lknet {

inline constexpr std::size_t kSlotCount = 3;

enum class Slot : std::uint8_t { A, B, C };

inline constexpr std::array<Slot, kSlotCount> kAllSlots{Slot::A, Slot::B, Slot::C};

[[nodiscard]] constexpr std::size_t index(Slot s) noexcept { return static_cast<std::size_t>(s); }

[[nodiscard]] constexpr std::string_view name(Slot s) noexcept {
    constexpr std::array<std::string_view, kSlotCount> names{"A", "B", "C"};
    return names[index(s)];
}

inline constexpr std::size_t kPlayerCount = 2;

}  // namespace lknet
