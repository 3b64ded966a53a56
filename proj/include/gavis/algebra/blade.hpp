#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <string>

#include "gavis/algebra/signature.hpp"

namespace gavis {

/// Basis blade as a bitmask: bit i set means e_(i+1) is a factor.
struct Blade {
    std::uint32_t bits = 0;

    constexpr Blade() = default;
    constexpr explicit Blade(std::uint32_t b) : bits(b) {}

    constexpr int grade() const noexcept { return std::popcount(bits); }
    constexpr bool is_scalar() const noexcept { return bits == 0; }

    constexpr auto operator<=>(const Blade&) const = default;
};

struct BladeProduct {
    int sign = 1;  // -1, 0 or +1
    Blade blade;
};

/// Sign of reordering the concatenation a·b into ascending order.
constexpr int reorder_sign(std::uint32_t a, std::uint32_t b) noexcept {
    int swaps = 0;
    a >>= 1;
    while (a != 0) {
        swaps += std::popcount(a & b);
        a >>= 1;
    }
    return (swaps & 1) ? -1 : 1;
}

/// Geometric product of two basis blades under a diagonal metric.
inline BladeProduct basis_product(Blade a, Blade b, const AlgebraSignature& sig) noexcept {
    int sign = reorder_sign(a.bits, b.bits);
    std::uint32_t common = a.bits & b.bits;
    for (int i = 0; common != 0; ++i, common >>= 1) {
        if (common & 1u) {
            sign *= sig.square(i);
            if (sign == 0) break;
        }
    }
    return {sign, Blade(a.bits ^ b.bits)};
}

/// "1", "e1", "e12", "e1_10" style name; indices above 9 are separated by '_'.
inline std::string blade_name(Blade b) {
    if (b.bits == 0) return "1";
    std::string out = "e";
    bool wide = (b.bits >> 9) != 0;
    bool first = true;
    for (int i = 0; i < 32; ++i) {
        if (b.bits & (1u << i)) {
            if (wide && !first) out += '_';
            out += std::to_string(i + 1);
            first = false;
        }
    }
    return out;
}

} // namespace gavis
