#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "gavis/algebra/scalar_traits.hpp"
#include "gavis/error.hpp"

namespace gavis {

/// Immutable symbolic scalar expression tree.
///
/// Values built through the arithmetic operators and the make_* helpers are
/// kept in simplified (canonical) form; the raw factories build nodes
/// verbatim and are meant for parsers and tests.
class ScalarExpr {
public:
    enum class Op { Const, Var, Add, Mul, Neg, Div, Pow, Sqrt, Abs, Sin, Cos };

    ScalarExpr();  // Const(0)
    ScalarExpr(double v);  // NOLINT: implicit on purpose, constants mix freely

    static ScalarExpr constant(double v);
    static ScalarExpr var(std::string name);

    // Raw constructors: no simplification.
    static ScalarExpr raw(Op op, std::vector<ScalarExpr> args);
    static ScalarExpr raw_pow(ScalarExpr base, int exponent);

    Op op() const noexcept { return node_->op; }
    double value() const noexcept { return node_->value; }
    const std::string& name() const noexcept { return node_->name; }
    int exponent() const noexcept { return node_->exponent; }
    const std::vector<ScalarExpr>& args() const noexcept { return node_->args; }

    bool is_const() const noexcept { return op() == Op::Const; }
    bool is_const(double v) const noexcept { return is_const() && value() == v; }

    /// Number of nodes in the tree.
    std::size_t size() const;

    friend bool operator==(const ScalarExpr& a, const ScalarExpr& b);

private:
    struct Node {
        Op op = Op::Const;
        double value = 0.0;
        std::string name;
        int exponent = 0;
        std::vector<ScalarExpr> args;
    };
    explicit ScalarExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    std::shared_ptr<const Node> node_;
};

// One-level canonicalising builders; children are assumed simplified.
ScalarExpr make_add(std::vector<ScalarExpr> terms);
ScalarExpr make_mul(std::vector<ScalarExpr> factors);
ScalarExpr make_neg(const ScalarExpr& a);
ScalarExpr make_div(const ScalarExpr& num, const ScalarExpr& den);
ScalarExpr make_pow(const ScalarExpr& base, int exponent);
ScalarExpr make_sqrt(const ScalarExpr& a);
ScalarExpr make_abs(const ScalarExpr& a);
ScalarExpr make_sin(const ScalarExpr& a);
ScalarExpr make_cos(const ScalarExpr& a);

inline ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) { return make_add({a, b}); }
inline ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) { return make_add({a, make_neg(b)}); }
inline ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) { return make_mul({a, b}); }
inline ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) { return make_div(a, b); }
inline ScalarExpr operator-(const ScalarExpr& a) { return make_neg(a); }

/// Bottom-up canonicalisation: constant folding, 0/1 identities, Add/Mul
/// flattening, negation pushing, repeated factors merged into Pow and
/// cancellation of structurally opposite summands. Idempotent.
ScalarExpr simplify(const ScalarExpr& e);

using Bindings = std::map<std::string, double, std::less<>>;

/// Throws Error("UnboundVariable") or Error("DomainError").
double evaluate(const ScalarExpr& e, const Bindings& bindings);

/// Free variables in first-occurrence order of a left-to-right walk.
std::vector<std::string> free_vars(const ScalarExpr& e);

enum class EmissionStyle { Python, JsonIr };

std::string emit(const ScalarExpr& e, EmissionStyle style);

/// Python float literal text for v ("1.0", "0.5", "-2.0", "1e-05").
std::string python_number(double v);

nlohmann::json to_json_ir(const ScalarExpr& e);
/// Throws Error("SchemaViolation") on malformed documents.
ScalarExpr from_json_ir(const nlohmann::json& j);

template <>
struct ScalarTraits<ScalarExpr> {
    static ScalarExpr zero() { return ScalarExpr(); }
    static ScalarExpr one() { return ScalarExpr(1.0); }
    static ScalarExpr from(double v) { return ScalarExpr(v); }
    static bool is_zero(const ScalarExpr& e) { return e.is_const(0.0); }
    static bool known_below(const ScalarExpr& e, double tol) {
        return e.is_const() && std::abs(e.value()) <= tol;
    }
    static ScalarExpr sqrt(const ScalarExpr& e) { return make_sqrt(e); }
    static ScalarExpr abs(const ScalarExpr& e) { return make_abs(e); }
};

} // namespace gavis
