#pragma once

#include "gavis/algebra/multivector.hpp"

// Conformal constructions written once over the scalar type, so the numeric
// kernel and the symbolic compiler build identical multivectors.
//
// Internal basis is diagonal: e4 = e+ (square +1), e5 = e- (square -1).
// Null vectors: einf = e- + e+,  e0 = (e- - e+) / 2,  einf . e0 = -1.
namespace gavis::cga {

inline constexpr Blade kEPlus{1u << 3};
inline constexpr Blade kEMinus{1u << 4};

inline void require_cga(const Space& space) {
    if (!space || space->positive != 4 || space->negative != 1 || space->zero != 0) {
        throw Error("UnsupportedSpace", "conformal operation requires the cga3d space");
    }
}

template <class S>
Multivector<S> einf(const Space& space) {
    require_cga(space);
    using T = ScalarTraits<S>;
    return Multivector<S>(space, {{kEPlus, T::one()}, {kEMinus, T::one()}});
}

template <class S>
Multivector<S> eo(const Space& space) {
    require_cga(space);
    using T = ScalarTraits<S>;
    return Multivector<S>(space, {{kEPlus, T::from(-0.5)}, {kEMinus, T::from(0.5)}});
}

template <class S>
Multivector<S> euclid_vector(const Space& space, const S& x, const S& y, const S& z) {
    return Multivector<S>(space, {{Blade(1), x}, {Blade(2), y}, {Blade(4), z}});
}

/// x e1 + y e2 + z e3 + (x^2+y^2+z^2)/2 einf + e0.
template <class S>
Multivector<S> embed_point(const Space& space, const S& x, const S& y, const S& z) {
    S half_sq = ScalarTraits<S>::from(0.5) * (x * x + y * y + z * z);
    return euclid_vector(space, x, y, z) + half_sq * einf<S>(space) + eo<S>(space);
}

/// C - r^2/2 einf.
template <class S>
Multivector<S> sphere_ipns(const Multivector<S>& center, const S& r) {
    return center - (ScalarTraits<S>::from(0.5) * r * r) * einf<S>(center.space());
}

/// n/|n| + d einf.
template <class S>
Multivector<S> plane_ipns(const Space& space, const S& nx, const S& ny, const S& nz, const S& d) {
    S len = ScalarTraits<S>::sqrt(nx * nx + ny * ny + nz * nz);
    return euclid_vector(space, nx / len, ny / len, nz / len) + d * einf<S>(space);
}

/// 1 - t einf / 2.
template <class S>
Multivector<S> translator(const Space& space, const S& x, const S& y, const S& z) {
    using T = ScalarTraits<S>;
    return Multivector<S>::scalar(space, T::one()) -
           T::from(0.5) * gp(euclid_vector(space, x, y, z), einf<S>(space));
}

} // namespace gavis::cga
