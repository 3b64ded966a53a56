#pragma once

#include <cmath>
#include <initializer_list>
#include <map>
#include <type_traits>
#include <string>
#include <utility>

#include "gavis/algebra/blade.hpp"
#include "gavis/algebra/scalar_traits.hpp"
#include "gavis/algebra/signature.hpp"
#include "gavis/error.hpp"

namespace gavis {

/// Sparse multivector: ordered Blade -> coefficient map over a space.
///
/// Canonical form holds no coefficient for which ScalarTraits<S>::is_zero is
/// true. Terms iterate in ascending bitmask order, which is also the order
/// used for every serialized coefficient vector.
template <class S>
class Multivector {
public:
    using Scalar = S;
    using Traits = ScalarTraits<S>;
    using Terms = std::map<Blade, S>;

    Multivector() = default;
    explicit Multivector(Space space) : space_(std::move(space)) {}
    Multivector(Space space, std::initializer_list<std::pair<const Blade, S>> terms)
        : space_(std::move(space)) {
        for (const auto& [b, c] : terms) add_term(b, c);
    }

    static Multivector scalar(Space space, S value) {
        Multivector m(std::move(space));
        m.add_term(Blade{}, std::move(value));
        return m;
    }

    /// The i-th basis vector e_(i+1), zero-based.
    static Multivector basis_vector(Space space, int i, S coeff = Traits::one()) {
        Multivector m(std::move(space));
        m.add_term(Blade(1u << i), std::move(coeff));
        return m;
    }

    static Multivector blade(Space space, Blade b, S coeff = Traits::one()) {
        Multivector m(std::move(space));
        m.add_term(b, std::move(coeff));
        return m;
    }

    const Space& space() const noexcept { return space_; }
    const AlgebraSignature& signature() const {
        if (!space_) throw Error("AlgebraMismatch", "multivector has no algebra");
        return *space_;
    }
    const Terms& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    std::size_t size() const noexcept { return terms_.size(); }

    S operator[](Blade b) const {
        auto it = terms_.find(b);
        return it == terms_.end() ? Traits::zero() : it->second;
    }

    S scalar_part() const { return (*this)[Blade{}]; }

    /// Accumulates `c` into blade `b`, dropping the term if it becomes zero.
    void add_term(Blade b, S c) {
        if (space_ && (b.bits >> space_->dimension()) != 0) {
            throw Error("InvalidBlade", "blade " + blade_name(b) + " outside algebra " + space_->name);
        }
        auto it = terms_.find(b);
        if (it == terms_.end()) {
            if (!Traits::is_zero(c)) terms_.emplace(b, std::move(c));
            return;
        }
        it->second = it->second + c;
        if (Traits::is_zero(it->second)) terms_.erase(it);
    }

    /// Sets a coefficient without accumulation (still canonicalising).
    void set_term(Blade b, S c) {
        terms_.erase(b);
        add_term(b, std::move(c));
    }

    /// True when every stored term has grade k.
    bool is_homogeneous(int k) const noexcept {
        for (const auto& [b, c] : terms_)
            if (b.grade() != k) return false;
        return true;
    }

    /// Highest grade present, or -1 for the zero multivector.
    int max_grade() const noexcept {
        int g = -1;
        for (const auto& [b, c] : terms_) g = std::max(g, b.grade());
        return g;
    }

    template <class F>
    Multivector map(F&& f) const {
        Multivector out(space_);
        for (const auto& [b, c] : terms_) out.add_term(b, f(b, c));
        return out;
    }

    Multivector operator-() const {
        return map([](Blade, const S& c) { return -c; });
    }

    Multivector& operator+=(const Multivector& o) {
        adopt_space(o);
        for (const auto& [b, c] : o.terms_) add_term(b, c);
        return *this;
    }
    Multivector& operator-=(const Multivector& o) {
        adopt_space(o);
        for (const auto& [b, c] : o.terms_) add_term(b, -c);
        return *this;
    }

    friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
    friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
    friend Multivector operator*(const S& s, const Multivector& a) {
        return a.map([&](Blade, const S& c) { return s * c; });
    }
    friend Multivector operator*(const Multivector& a, const S& s) {
        return a.map([&](Blade, const S& c) { return c * s; });
    }

private:
    void adopt_space(const Multivector& o) {
        if (!space_) {
            space_ = o.space_;
        } else if (o.space_ && !(*space_ == *o.space_)) {
            throw Error("AlgebraMismatch", "operands belong to different algebras (" +
                                               space_->name + ", " + o.space_->name + ")");
        }
    }

    Space space_;
    Terms terms_;
};

using Mv = Multivector<double>;

namespace detail {

template <class S>
Space common_space(const Multivector<S>& a, const Multivector<S>& b) {
    if (!a.space()) return b.space();
    if (!b.space()) return a.space();
    if (!(*a.space() == *b.space())) {
        throw Error("AlgebraMismatch", "operands belong to different algebras (" +
                                           a.space()->name + ", " + b.space()->name + ")");
    }
    return a.space();
}

// Bilinear product restricted to blade pairs accepted by `keep(ga, gb, gr)`.
// Coefficients are accumulated before canonical pruning so that partial sums
// are never dropped.
template <class S, class Keep>
Multivector<S> product(const Multivector<S>& a, const Multivector<S>& b, Keep keep) {
    Space space = common_space(a, b);
    std::map<Blade, S> acc;
    if (!space) return Multivector<S>();
    for (const auto& [ba, ca] : a.terms()) {
        for (const auto& [bb, cb] : b.terms()) {
            BladeProduct p = basis_product(ba, bb, *space);
            if (p.sign == 0 || !keep(ba.grade(), bb.grade(), p.blade.grade())) continue;
            S term = ca * cb;
            if (p.sign < 0) term = -term;
            auto it = acc.find(p.blade);
            if (it == acc.end())
                acc.emplace(p.blade, std::move(term));
            else
                it->second = it->second + term;
        }
    }
    Multivector<S> out(space);
    for (auto& [blade, c] : acc) out.add_term(blade, std::move(c));
    return out;
}

} // namespace detail

/// Geometric product.
template <class S>
Multivector<S> gp(const Multivector<S>& a, const Multivector<S>& b) {
    return detail::product(a, b, [](int, int, int) { return true; });
}

/// Outer product: grade r+s part of each blade product.
template <class S>
Multivector<S> wedge(const Multivector<S>& a, const Multivector<S>& b) {
    return detail::product(a, b, [](int ga, int gb, int gr) { return gr == ga + gb; });
}

/// Left contraction: grade s-r part of each blade product (zero when r > s).
template <class S>
Multivector<S> lcont(const Multivector<S>& a, const Multivector<S>& b) {
    return detail::product(a, b, [](int ga, int gb, int gr) { return gb >= ga && gr == gb - ga; });
}

template <class S>
Multivector<S> grade_part(const Multivector<S>& a, int k) {
    Multivector<S> out(a.space());
    for (const auto& [b, c] : a.terms())
        if (b.grade() == k) out.add_term(b, c);
    return out;
}

/// (-1)^(k(k-1)/2) for grade k.
constexpr int reverse_sign(int k) noexcept { return ((k * (k - 1) / 2) % 2 == 0) ? 1 : -1; }

template <class S>
Multivector<S> reverse(const Multivector<S>& a) {
    return a.map([](Blade b, const S& c) { return reverse_sign(b.grade()) < 0 ? -c : c; });
}

template <class S>
Multivector<S> grade_involution(const Multivector<S>& a) {
    return a.map([](Blade b, const S& c) { return (b.grade() % 2) ? -c : c; });
}

namespace detail {

// <a ~a>_0 for numeric coefficients as a signed sum of squares, accumulated
// with error-free transformations so mixed-signature cancellation keeps
// close to full precision.
inline double reverse_square(const Multivector<double>& a) {
    double sum = 0.0, err = 0.0;
    for (const auto& [b, c] : a.terms()) {
        int s = basis_product(b, b, *a.space()).sign * reverse_sign(b.grade());
        if (s == 0) continue;
        double p = s * c * c;
        double pe = std::fma(s * c, c, -p);
        double t = sum + p;
        double z = t - sum;
        err += (sum - (t - z)) + (p - z) + pe;
        sum = t;
    }
    return sum + err;
}

} // namespace detail

/// sqrt(|<a ~a>_0|); the absolute value covers mixed signatures.
template <class S>
S norm(const Multivector<S>& a) {
    using T = ScalarTraits<S>;
    if constexpr (std::is_same_v<S, double>) {
        return a.space() ? std::sqrt(std::abs(detail::reverse_square(a))) : std::abs(a.scalar_part());
    } else {
        return T::sqrt(T::abs(gp(a, reverse(a)).scalar_part()));
    }
}

template <class S>
Multivector<S> normalize(const Multivector<S>& a) {
    using T = ScalarTraits<S>;
    S n = norm(a);
    if (T::known_below(n, kZeroTolerance)) throw Error("ZeroNorm", "cannot normalize: norm is zero");
    return a.map([&](Blade, const S& c) { return c / n; });
}

/// Blade/versor inverse ~a / <a ~a>_0. Throws NotInvertible when a ~a is not
/// a nonzero scalar.
template <class S>
Multivector<S> inverse(const Multivector<S>& a) {
    using T = ScalarTraits<S>;
    Multivector<S> rev = reverse(a);
    Multivector<S> p = gp(a, rev);
    for (const auto& [b, c] : p.terms()) {
        if (!b.is_scalar()) {
            throw Error("NotInvertible", "a * reverse(a) has a grade-" + std::to_string(b.grade()) +
                                             " residue; no closed-form inverse");
        }
    }
    S d = p.scalar_part();
    if (T::known_below(d, kZeroTolerance)) throw Error("NotInvertible", "a * reverse(a) is zero");
    return rev.map([&](Blade, const S& c) { return c / d; });
}

template <class S>
Multivector<S> pseudoscalar(const Space& space) {
    return Multivector<S>::blade(space, Blade(space->blade_count() - 1));
}

template <class S>
Multivector<S> dual(const Multivector<S>& a) {
    const Space& space = a.space();
    if (!space) return a;
    if (space->degenerate()) throw Error("DegenerateAlgebra", "dual requires a nondegenerate metric");
    return lcont(a, inverse(pseudoscalar<S>(space)));
}

/// v a v^-1.
template <class S>
Multivector<S> sandwich(const Multivector<S>& v, const Multivector<S>& a) {
    return gp(gp(v, a), inverse(v));
}

/// Closed-form exponential of a bivector whose square is scalar.
inline Mv exp_bivector(const Mv& b) {
    Space space = b.space();
    if (b.is_zero()) return Mv::scalar(space ? space : euclid3d(), 1.0);
    if (!b.is_homogeneous(2)) throw Error("NonScalarSquare", "exp_bivector expects a pure bivector");
    Mv sq = gp(b, b);
    for (const auto& [bl, c] : sq.terms()) {
        if (!bl.is_scalar()) throw Error("NonScalarSquare", "bivector square is not a scalar");
    }
    double s = sq.scalar_part();
    if (std::abs(s) <= kZeroTolerance) return Mv::scalar(space, 1.0) + b;
    double theta = std::sqrt(std::abs(s));
    if (s < 0) return Mv::scalar(space, std::cos(theta)) + b * (std::sin(theta) / theta);
    return Mv::scalar(space, std::cosh(theta)) + b * (std::sinh(theta) / theta);
}

/// Largest absolute coefficient difference; missing blades count as zero.
inline double max_abs_diff(const Mv& a, const Mv& b) {
    double worst = 0.0;
    for (const auto& [bl, c] : a.terms()) worst = std::max(worst, std::abs(c - b[bl]));
    for (const auto& [bl, c] : b.terms()) worst = std::max(worst, std::abs(c - a[bl]));
    return worst;
}

} // namespace gavis
