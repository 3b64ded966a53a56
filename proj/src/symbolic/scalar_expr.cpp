#include "gavis/symbolic/scalar_expr.hpp"

#include <cmath>
#include <functional>
#include <set>

namespace gavis {

namespace {

using Op = ScalarExpr::Op;

bool is_neg(const ScalarExpr& e) { return e.op() == Op::Neg; }

// Splits a summand into numeric coefficient and coefficient-free core.
std::pair<double, ScalarExpr> split_coefficient(const ScalarExpr& e) {
    if (e.op() == Op::Neg) {
        auto [c, core] = split_coefficient(e.args()[0]);
        return {-c, core};
    }
    if (e.op() == Op::Mul && !e.args().empty() && e.args()[0].is_const()) {
        std::vector<ScalarExpr> rest(e.args().begin() + 1, e.args().end());
        ScalarExpr core = rest.size() == 1 ? rest[0] : ScalarExpr::raw(Op::Mul, std::move(rest));
        return {e.args()[0].value(), core};
    }
    return {1.0, e};
}

double clean_zero(double v) { return v == 0.0 ? 0.0 : v; }

// Structural equality that also accepts products whose factors are a
// permutation of each other.
bool same_core(const ScalarExpr& a, const ScalarExpr& b) {
    if (a == b) return true;
    if (a.op() != Op::Mul || b.op() != Op::Mul || a.args().size() != b.args().size()) return false;
    std::vector<bool> used(b.args().size(), false);
    for (const auto& fa : a.args()) {
        bool found = false;
        for (std::size_t j = 0; j < b.args().size(); ++j) {
            if (!used[j] && fa == b.args()[j]) {
                used[j] = found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

} // namespace

ScalarExpr::ScalarExpr() : ScalarExpr(0.0) {}

ScalarExpr::ScalarExpr(double v) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = clean_zero(v);
    node_ = std::move(n);
}

ScalarExpr ScalarExpr::constant(double v) { return ScalarExpr(v); }

ScalarExpr ScalarExpr::var(std::string name) {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    n->name = std::move(name);
    return ScalarExpr(std::shared_ptr<const Node>(std::move(n)));
}

ScalarExpr ScalarExpr::raw(Op op, std::vector<ScalarExpr> args) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    return ScalarExpr(std::shared_ptr<const Node>(std::move(n)));
}

ScalarExpr ScalarExpr::raw_pow(ScalarExpr base, int exponent) {
    auto n = std::make_shared<Node>();
    n->op = Op::Pow;
    n->exponent = exponent;
    n->args = {std::move(base)};
    return ScalarExpr(std::shared_ptr<const Node>(std::move(n)));
}

std::size_t ScalarExpr::size() const {
    std::size_t n = 1;
    for (const auto& a : args()) n += a.size();
    return n;
}

bool operator==(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.node_ == b.node_) return true;
    if (a.op() != b.op()) return false;
    switch (a.op()) {
        case Op::Const: return a.value() == b.value();
        case Op::Var: return a.name() == b.name();
        case Op::Pow:
            if (a.exponent() != b.exponent()) return false;
            break;
        default: break;
    }
    return a.args() == b.args();
}

ScalarExpr make_add(std::vector<ScalarExpr> terms) {
    std::vector<ScalarExpr> flat;
    double constant = 0.0;
    std::function<void(const ScalarExpr&)> push = [&](const ScalarExpr& t) {
        if (t.op() == Op::Add) {
            for (const auto& a : t.args()) push(a);
        } else if (t.is_const()) {
            constant += t.value();
        } else {
            flat.push_back(t);
        }
    };
    for (const auto& t : terms) push(t);

    // Cancel structurally opposite summands (c*X and -c*X).
    std::vector<bool> dead(flat.size(), false);
    for (std::size_t i = 0; i < flat.size(); ++i) {
        if (dead[i]) continue;
        auto [ci, core_i] = split_coefficient(flat[i]);
        for (std::size_t j = i + 1; j < flat.size(); ++j) {
            if (dead[j]) continue;
            auto [cj, core_j] = split_coefficient(flat[j]);
            if (ci + cj == 0.0 && same_core(core_i, core_j)) {
                dead[i] = dead[j] = true;
                break;
            }
        }
    }
    std::vector<ScalarExpr> out;
    for (std::size_t i = 0; i < flat.size(); ++i)
        if (!dead[i]) out.push_back(std::move(flat[i]));
    if (constant != 0.0) out.emplace_back(constant);
    if (out.empty()) return ScalarExpr();
    if (out.size() == 1) return out[0];
    return ScalarExpr::raw(Op::Add, std::move(out));
}

ScalarExpr make_mul(std::vector<ScalarExpr> factors) {
    double coeff = 1.0;
    std::vector<std::pair<ScalarExpr, int>> bases;
    std::function<void(const ScalarExpr&)> push = [&](const ScalarExpr& f) {
        switch (f.op()) {
            case Op::Mul:
                for (const auto& a : f.args()) push(a);
                return;
            case Op::Neg:
                coeff = -coeff;
                push(f.args()[0]);
                return;
            case Op::Const:
                coeff *= f.value();
                return;
            default: break;
        }
        ScalarExpr base = f;
        int e = 1;
        if (f.op() == Op::Pow) {
            base = f.args()[0];
            e = f.exponent();
        }
        for (auto& [b, n] : bases) {
            if (b == base) {
                n += e;
                return;
            }
        }
        bases.emplace_back(base, e);
    };
    for (const auto& f : factors) push(f);
    if (coeff == 0.0) return ScalarExpr();

    std::vector<ScalarExpr> rest;
    for (auto& [b, n] : bases) {
        if (n == 0) continue;
        ScalarExpr p = make_pow(b, n);
        if (p.is_const()) {
            coeff *= p.value();
        } else if (p.op() == Op::Neg) {
            coeff = -coeff;
            rest.push_back(p.args()[0]);
        } else {
            rest.push_back(p);
        }
    }
    if (rest.empty()) return ScalarExpr(coeff);
    ScalarExpr core = rest.size() == 1 ? rest[0] : ScalarExpr::raw(Op::Mul, rest);
    if (coeff == 1.0) return core;
    if (coeff == -1.0) return core.op() == Op::Add ? make_neg(core) : ScalarExpr::raw(Op::Neg, {core});
    if (core.op() == Op::Add) {
        // Keep Add terms distributable: c * (a + b) stays a product.
        return ScalarExpr::raw(Op::Mul, {ScalarExpr(coeff), core});
    }
    rest.insert(rest.begin(), ScalarExpr(coeff));
    return ScalarExpr::raw(Op::Mul, std::move(rest));
}

ScalarExpr make_neg(const ScalarExpr& a) {
    switch (a.op()) {
        case Op::Const: return ScalarExpr(-a.value());
        case Op::Neg: return a.args()[0];
        case Op::Add: {
            std::vector<ScalarExpr> terms;
            for (const auto& t : a.args()) terms.push_back(make_neg(t));
            return make_add(std::move(terms));
        }
        case Op::Mul:
            if (a.args()[0].is_const()) {
                std::vector<ScalarExpr> f = a.args();
                f[0] = ScalarExpr(-f[0].value());
                return make_mul(std::move(f));
            }
            break;
        default: break;
    }
    return ScalarExpr::raw(Op::Neg, {a});
}

ScalarExpr make_div(const ScalarExpr& num, const ScalarExpr& den) {
    if (den.is_const(1.0)) return num;
    if (den.is_const(-1.0)) return make_neg(num);
    if (num.is_const(0.0)) return ScalarExpr();
    if (num.is_const() && den.is_const() && den.value() != 0.0) return ScalarExpr(num.value() / den.value());
    if (is_neg(num)) return make_neg(make_div(num.args()[0], den));
    if (is_neg(den)) return make_neg(make_div(num, den.args()[0]));
    return ScalarExpr::raw(Op::Div, {num, den});
}

ScalarExpr make_pow(const ScalarExpr& base, int exponent) {
    if (exponent == 0) return ScalarExpr(1.0);
    if (exponent == 1) return base;
    if (base.is_const()) {
        double v = std::pow(base.value(), exponent);
        if (std::isfinite(v)) return ScalarExpr(v);
    }
    if (base.op() == Op::Pow) return make_pow(base.args()[0], base.exponent() * exponent);
    if (is_neg(base)) {
        ScalarExpr p = make_pow(base.args()[0], exponent);
        return (exponent % 2 == 0) ? p : make_neg(p);
    }
    return ScalarExpr::raw_pow(base, exponent);
}

ScalarExpr make_sqrt(const ScalarExpr& a) {
    if (a.is_const() && a.value() >= 0.0) return ScalarExpr(std::sqrt(a.value()));
    if (a.op() == Op::Pow && a.exponent() == 2) return make_abs(a.args()[0]);
    return ScalarExpr::raw(Op::Sqrt, {a});
}

ScalarExpr make_abs(const ScalarExpr& a) {
    switch (a.op()) {
        case Op::Const: return ScalarExpr(std::abs(a.value()));
        case Op::Abs:
        case Op::Sqrt: return a;
        case Op::Neg: return make_abs(a.args()[0]);
        case Op::Pow:
            if (a.exponent() % 2 == 0) return a;
            break;
        default: break;
    }
    return ScalarExpr::raw(Op::Abs, {a});
}

ScalarExpr make_sin(const ScalarExpr& a) {
    if (a.is_const()) return ScalarExpr(std::sin(a.value()));
    return ScalarExpr::raw(Op::Sin, {a});
}

ScalarExpr make_cos(const ScalarExpr& a) {
    if (a.is_const()) return ScalarExpr(std::cos(a.value()));
    return ScalarExpr::raw(Op::Cos, {a});
}

ScalarExpr simplify(const ScalarExpr& e) {
    switch (e.op()) {
        case Op::Const:
        case Op::Var: return e;
        default: break;
    }
    std::vector<ScalarExpr> args;
    args.reserve(e.args().size());
    for (const auto& a : e.args()) args.push_back(simplify(a));
    switch (e.op()) {
        case Op::Add: return make_add(std::move(args));
        case Op::Mul: return make_mul(std::move(args));
        case Op::Neg: return make_neg(args.at(0));
        case Op::Div: return make_div(args.at(0), args.at(1));
        case Op::Pow: return make_pow(args.at(0), e.exponent());
        case Op::Sqrt: return make_sqrt(args.at(0));
        case Op::Abs: return make_abs(args.at(0));
        case Op::Sin: return make_sin(args.at(0));
        case Op::Cos: return make_cos(args.at(0));
        default: return e;
    }
}

double evaluate(const ScalarExpr& e, const Bindings& bindings) {
    switch (e.op()) {
        case Op::Const: return e.value();
        case Op::Var: {
            auto it = bindings.find(e.name());
            if (it == bindings.end()) throw Error("UnboundVariable", "unbound variable '" + e.name() + "'");
            return it->second;
        }
        case Op::Add: {
            double s = 0.0;
            for (const auto& a : e.args()) s += evaluate(a, bindings);
            return s;
        }
        case Op::Mul: {
            double p = 1.0;
            for (const auto& a : e.args()) p *= evaluate(a, bindings);
            return p;
        }
        case Op::Neg: return -evaluate(e.args()[0], bindings);
        case Op::Div: {
            double n = evaluate(e.args()[0], bindings);
            double d = evaluate(e.args()[1], bindings);
            if (std::abs(d) <= 1e-300) throw Error("DomainError", "division by zero");
            return n / d;
        }
        case Op::Pow: {
            double b = evaluate(e.args()[0], bindings);
            if (e.exponent() < 0 && std::abs(b) <= 1e-300) throw Error("DomainError", "negative power of zero");
            return std::pow(b, e.exponent());
        }
        case Op::Sqrt: {
            double v = evaluate(e.args()[0], bindings);
            // Round-off below the zero tolerance is treated as an exact zero.
            if (v < 0.0 && v >= -kZeroTolerance) v = 0.0;
            if (v < 0.0) throw Error("DomainError", "square root of negative value");
            return std::sqrt(v);
        }
        case Op::Abs: return std::abs(evaluate(e.args()[0], bindings));
        case Op::Sin: return std::sin(evaluate(e.args()[0], bindings));
        case Op::Cos: return std::cos(evaluate(e.args()[0], bindings));
    }
    return 0.0;
}

std::vector<std::string> free_vars(const ScalarExpr& e) {
    std::vector<std::string> out;
    std::set<std::string, std::less<>> seen;
    std::function<void(const ScalarExpr&)> walk = [&](const ScalarExpr& n) {
        if (n.op() == Op::Var) {
            if (seen.insert(n.name()).second) out.push_back(n.name());
            return;
        }
        for (const auto& a : n.args()) walk(a);
    };
    walk(e);
    return out;
}

} // namespace gavis
