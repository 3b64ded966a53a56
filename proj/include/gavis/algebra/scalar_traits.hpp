#pragma once

#include <cmath>

namespace gavis {

/// Absolute tolerance for sparse pruning and invertibility checks.
inline constexpr double kZeroTolerance = 1e-12;

/// Customisation point giving the algebra kernel the ring operations it
/// needs beyond +, -, *, /. Specialised for double here and for
/// symbolic expressions in gavis/symbolic/scalar_expr.hpp.
template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static double from(double v) { return v; }
    static bool is_zero(double v) { return std::abs(v) <= kZeroTolerance; }
    // True only when the magnitude is known to be at or below `tol`.
    static bool known_below(double v, double tol) { return std::abs(v) <= tol; }
    static double sqrt(double v) { return std::sqrt(v); }
    static double abs(double v) { return std::abs(v); }
};

} // namespace gavis
