#include <doctest.h>

#include <random>

#include "gavis/algebra/multivector.hpp"
#include "gavis/symbolic/scalar_expr.hpp"
#include "support/py_expr_eval.hpp"

using namespace gavis;
using Op = ScalarExpr::Op;

namespace {

ScalarExpr X(const char* n) { return ScalarExpr::var(n); }
ScalarExpr C(double v) { return ScalarExpr::constant(v); }
ScalarExpr raw(Op op, std::vector<ScalarExpr> a) { return ScalarExpr::raw(op, std::move(a)); }

// Random raw (unsimplified) tree over x, y, z, w.
ScalarExpr random_tree(std::mt19937_64& rng, int depth) {
    static const char* names[] = {"x", "y", "z", "w"};
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 10);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::uniform_int_distribution<int> small(0, 3);
    switch (pick(rng)) {
        case 0: {
            double choices[] = {0.0, 1.0, -1.0, val(rng)};
            return C(choices[small(rng)]);
        }
        case 1: return X(names[small(rng)]);
        case 2:
        case 3: {
            std::vector<ScalarExpr> a;
            for (int i = 0, n = 2 + small(rng) % 2; i < n; ++i) a.push_back(random_tree(rng, depth - 1));
            return raw(Op::Add, a);
        }
        case 4:
        case 5: {
            std::vector<ScalarExpr> a;
            for (int i = 0, n = 2 + small(rng) % 2; i < n; ++i) a.push_back(random_tree(rng, depth - 1));
            return raw(Op::Mul, a);
        }
        case 6: return raw(Op::Neg, {random_tree(rng, depth - 1)});
        case 7: return raw(Op::Div, {random_tree(rng, depth - 1), random_tree(rng, depth - 1)});
        case 8: return ScalarExpr::raw_pow(random_tree(rng, depth - 1), small(rng));
        case 9: return raw(Op::Sqrt, {raw(Op::Abs, {random_tree(rng, depth - 1)})});
        default: return raw(small(rng) % 2 ? Op::Sin : Op::Cos, {random_tree(rng, depth - 1)});
    }
}

Bindings random_bindings(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    return {{"x", val(rng)}, {"y", val(rng)}, {"z", val(rng)}, {"w", val(rng)}};
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

} // namespace

TEST_CASE("simplify identities") {
    ScalarExpr e = raw(Op::Add, {raw(Op::Mul, {C(0), X("x")}), raw(Op::Mul, {C(1), X("y")})});
    CHECK(simplify(e) == X("y"));

    ScalarExpr folded = simplify(raw(Op::Mul, {raw(Op::Add, {C(2), C(3)}), X("x")}));
    CHECK(folded == raw(Op::Mul, {C(5), X("x")}));

    CHECK(simplify(raw(Op::Mul, {X("x"), X("x")})) == ScalarExpr::raw_pow(X("x"), 2));
    CHECK(simplify(raw(Op::Neg, {raw(Op::Neg, {X("x")})})) == X("x"));
    CHECK(simplify(raw(Op::Add, {X("x"), raw(Op::Neg, {X("x")})})).is_const(0.0));
    // Opposite products cancel even when their factors are permuted.
    CHECK(simplify(X("a") * X("b") - X("b") * X("a")).is_const(0.0));
    CHECK(simplify(raw(Op::Sqrt, {ScalarExpr::raw_pow(X("x"), 2)})) == raw(Op::Abs, {X("x")}));
    // Nested adds flatten.
    ScalarExpr nested = raw(Op::Add, {X("a"), raw(Op::Add, {X("b"), X("c")})});
    CHECK(simplify(nested).args().size() == 3);
}

TEST_CASE("simplify preserves value and is idempotent on random trees") {
    std::mt19937_64 rng(101);
    int compared = 0;
    for (int i = 0; i < 2000; ++i) {
        ScalarExpr e = random_tree(rng, 4);
        ScalarExpr s = simplify(e);
        CHECK(simplify(s) == s);
        for (int k = 0; k < 5; ++k) {
            Bindings b = random_bindings(rng);
            double want;
            try {
                want = evaluate(e, b);
            } catch (const Error&) {
                continue;
            }
            if (!std::isfinite(want) || std::abs(want) > 1e6) continue;
            double got = evaluate(s, b);
            CHECK(close(got, want, 1e-12));
            ++compared;
        }
    }
    CHECK(compared > 3000);
}

TEST_CASE("Mul(x, x) agrees with Pow at random bindings") {
    std::mt19937_64 rng(5);
    ScalarExpr m = raw(Op::Mul, {X("x"), X("x")});
    ScalarExpr p = simplify(m);
    for (int i = 0; i < 20; ++i) {
        Bindings b = random_bindings(rng);
        CHECK(evaluate(m, b) == doctest::Approx(evaluate(p, b)).epsilon(1e-14));
    }
}

TEST_CASE("evaluate") {
    CHECK(evaluate(X("x"), {{"x", 2.0}}) == 2.0);
    ScalarExpr half_sq = C(0.5) * (X("x") * X("x") + X("y") * X("y") + X("z") * X("z"));
    CHECK(evaluate(half_sq, {{"x", 4}, {"y", 5}, {"z", 6}}) == 38.5);
    try {
        evaluate(X("x"), {});
        FAIL("expected UnboundVariable");
    } catch (const Error& e) {
        CHECK(e.code() == "UnboundVariable");
    }
    CHECK_THROWS_WITH(evaluate(raw(Op::Sqrt, {X("x")}), {{"x", -1.0}}), "square root of negative value");
    CHECK_THROWS_WITH(evaluate(raw(Op::Div, {C(1), X("x")}), {{"x", 0.0}}), "division by zero");
    // Round-off just below zero is accepted.
    CHECK(evaluate(raw(Op::Sqrt, {X("x")}), {{"x", -1e-15}}) == 0.0);
}

TEST_CASE("free_vars order") {
    ScalarExpr half_sq = C(0.5) * (X("x") * X("x") + X("y") * X("y") + X("z") * X("z"));
    CHECK(free_vars(half_sq) == std::vector<std::string>{"x", "y", "z"});
    CHECK(free_vars(C(3)).empty());
    CHECK(free_vars(X("x") + X("y") * X("x")) == std::vector<std::string>{"x", "y"});
}

TEST_CASE("python emission") {
    ScalarExpr e = raw(Op::Mul, {C(0.5), raw(Op::Add, {ScalarExpr::raw_pow(X("x"), 2), ScalarExpr::raw_pow(X("y"), 2)})});
    CHECK(emit(e, EmissionStyle::Python) == "0.5 * (x**2 + y**2)");
    CHECK(emit(C(-1), EmissionStyle::Python) == "-1.0");
    CHECK(emit(raw(Op::Sqrt, {X("x")}), EmissionStyle::Python) == "math.sqrt(x)");
    CHECK(emit(X("a") - X("b"), EmissionStyle::Python) == "a - b");
    CHECK(emit(X("a") - C(2) * X("b"), EmissionStyle::Python) == "a - 2.0 * b");
    CHECK(emit(-(X("a") * X("b")), EmissionStyle::Python) == "-(a * b)");
    CHECK(emit(X("a") / (X("b") * X("c")), EmissionStyle::Python) == "a / (b * c)");
    CHECK(python_number(1e-5) == "1e-05");
    CHECK(python_number(38.5) == "38.5");
    CHECK(python_number(4) == "4.0");
}

TEST_CASE("python emission round-trips through a reference evaluator") {
    std::mt19937_64 rng(77);
    int compared = 0;
    for (int i = 0; i < 1500; ++i) {
        ScalarExpr s = simplify(random_tree(rng, 4));
        std::string text = emit(s, EmissionStyle::Python);
        Bindings b = random_bindings(rng);
        double want;
        try {
            want = evaluate(s, b);
        } catch (const Error&) {
            continue;
        }
        if (!std::isfinite(want) || std::abs(want) > 1e6) continue;
        CAPTURE(text);
        CHECK(close(pyeval::eval(text, b), want, 1e-12));
        ++compared;
    }
    CHECK(compared > 1000);
}

TEST_CASE("json-ir round trip") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 200; ++i) {
        ScalarExpr s = simplify(random_tree(rng, 4));
        nlohmann::json j = nlohmann::json::parse(emit(s, EmissionStyle::JsonIr));
        CHECK(from_json_ir(j) == s);
    }
    nlohmann::json c = to_json_ir(C(2.5));
    CHECK(c == nlohmann::json{{"op", "const"}, {"value", 2.5}});
    CHECK(to_json_ir(X("r")) == nlohmann::json{{"op", "var"}, {"name", "r"}});
    CHECK_THROWS_AS(from_json_ir(nlohmann::json{{"op", "pow"}, {"args", nlohmann::json::array({to_json_ir(X("x"))})}}), Error);
    CHECK_THROWS_AS(from_json_ir(nlohmann::json{{"op", "frobnicate"}, {"args", nlohmann::json::array()}}), Error);
}

TEST_CASE("multivector kernel over symbolic scalars") {
    auto s = cga3d();
    using SMv = Multivector<ScalarExpr>;
    SMv a(s, {{Blade(1), X("a1")}, {Blade(2), X("a2")}});
    SMv b(s, {{Blade(1), X("b1")}, {Blade(2), X("b2")}});
    SMv p = gp(a, b);
    CHECK(p.size() == 2);  // scalar and e12
    SMv sq = gp(a, a);
    // a1 a2 - a2 a1 cancels structurally.
    CHECK(sq.size() == 1);
    CHECK(evaluate(sq.scalar_part(), {{"a1", 3}, {"a2", 4}}) == 25.0);
}
