#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "gavis/error.hpp"

namespace gavis {

/// Diagonal-metric Clifford algebra signature Cl(p, q, r).
///
/// Basis vector i squares to +1 for i < positive, to -1 for the next
/// `negative` vectors and to 0 for the remaining `zero` vectors.
struct AlgebraSignature {
    int positive = 0;
    int negative = 0;
    int zero = 0;
    std::string name;

    static constexpr int kMaxDimension = 16;

    AlgebraSignature() = default;
    AlgebraSignature(int p, int q, int r, std::string label)
        : positive(p), negative(q), zero(r), name(std::move(label)) {
        if (p < 0 || q < 0 || r < 0 || p + q + r > kMaxDimension) {
            throw Error("InvalidSignature",
                        "signature dimension must be in [0, 16]");
        }
    }

    int dimension() const noexcept { return positive + negative + zero; }
    std::uint32_t blade_count() const noexcept { return 1u << dimension(); }

    int square(int i) const noexcept {
        if (i < positive) return 1;
        if (i < positive + negative) return -1;
        return 0;
    }

    bool degenerate() const noexcept { return zero > 0; }

    bool operator==(const AlgebraSignature& o) const noexcept {
        return positive == o.positive && negative == o.negative && zero == o.zero;
    }
};

using Space = std::shared_ptr<const AlgebraSignature>;

/// Cl(4,1): e1..e3 Euclidean, e4 = e+ (+1), e5 = e- (-1).
inline Space cga3d() {
    static const Space s = std::make_shared<const AlgebraSignature>(4, 1, 0, "cga3d");
    return s;
}

/// Cl(3,0).
inline Space euclid3d() {
    static const Space s = std::make_shared<const AlgebraSignature>(3, 0, 0, "euclid3d");
    return s;
}

/// Looks up one of the named spaces ("cga3d", "euclid3d"); throws UnknownSpace.
inline Space space_by_name(const std::string& name) {
    if (name == "cga3d") return cga3d();
    if (name == "euclid3d") return euclid3d();
    throw Error("UnknownSpace", "unknown algebra space '" + name + "'");
}

} // namespace gavis
