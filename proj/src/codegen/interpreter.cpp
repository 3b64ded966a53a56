#include <algorithm>
#include <cmath>
#include <set>

#include "evaluator.hpp"
#include "gavis/codegen/program.hpp"
#include "gavis/script/script.hpp"

namespace gavis::codegen {

namespace {

double largest(const Mv& m) {
    double w = 0.0;
    for (const auto& [b, c] : m.terms()) w = std::max(w, std::abs(c));
    return w;
}

// Non-scalar residue allowed before a value stops counting as a scalar.
bool numerically_scalar(const Mv& m) {
    double tol = 1e-9 * std::max(1.0, largest(m));
    for (const auto& [b, c] : m.terms())
        if (!b.is_scalar() && std::abs(c) > tol) return false;
    return true;
}

// Mirrors the compiled semantics: same division and square-root rules as
// ScalarExpr evaluation.
class Numeric {
public:
    Numeric(Space space, const Bindings& inputs) : space_(std::move(space)), inputs_(inputs) {}

    std::map<std::string, Mv> vars;

    Mv lookup(const script::Expr& e) {
        auto it = vars.find(e.name);
        if (it != vars.end()) return it->second;
        auto in = inputs_.find(e.name);
        if (in != inputs_.end()) return Mv::scalar(space_, in->second);
        throw ScriptError("MissingInput", "no value for input " + e.name, e.span);
    }

    double scalar_of(const Mv& m, const script::Expr& where, const std::string& fn) {
        if (!numerically_scalar(m))
            throw ScriptError("NonScalarArgument", fn + " expects a scalar argument", where.span);
        return m.scalar_part();
    }

    double sqrt(double v) {
        if (v < 0.0 && v >= -kZeroTolerance) v = 0.0;
        if (v < 0.0) throw Error("DomainError", "square root of negative value");
        return std::sqrt(v);
    }

    double div(double a, double b) {
        if (std::abs(b) <= 1e-300) throw Error("DomainError", "division by zero");
        return a / b;
    }

    double norm(const Mv& a) { return std::sqrt(std::abs(gp(a, reverse(a)).scalar_part())); }

    Mv inverse(const Mv& b, const script::Expr& where) {
        Mv p = gp(b, reverse(b));
        if (!numerically_scalar(p))
            throw ScriptError("NotInvertible", "divisor times its reverse is not a scalar", where.span);
        double d = p.scalar_part();
        return reverse(b).map([&](Blade, double c) { return div(c, d); });
    }

    Mv divide(const Mv& a, const Mv& b, const script::Expr& where) {
        bool scalar_only = std::all_of(b.terms().begin(), b.terms().end(),
                                       [](const auto& t) { return t.first.is_scalar(); });
        if (scalar_only) {
            double d = b.scalar_part();
            return a.map([&](Blade, double c) { return div(c, d); });
        }
        return gp(a, inverse(b, where));
    }

    Mv rotor(const Mv& plane, double angle, const script::Expr&) { return exp_bivector(plane * (-0.5 * angle)); }

private:
    Space space_;
    const Bindings& inputs_;
};

} // namespace

std::map<std::string, Mv> interpret(const script::ScriptAst& ast, const Space& space, const Bindings& inputs) {
    script::ScriptSymbols sym = script::analyze(ast);
    std::set<std::string> variables(sym.variables.begin(), sym.variables.end());
    for (const auto& in : sym.inputs)
        if (!inputs.contains(in)) throw Error("MissingInput", "no value for input " + in);
    Numeric hooks(space, inputs);
    detail::Evaluator<double, Numeric> ev(space, hooks);
    for (const auto& stmt : ast.statements) {
        auto* a = std::get_if<script::AssignStmt>(&stmt);
        if (!a || !variables.contains(a->name)) continue;
        hooks.vars[a->name] = ev.eval(*a->expr);
    }
    return std::move(hooks.vars);
}

std::map<std::string, Mv> run(const BladeProgram& program, const AssignmentSection& assignment) {
    Bindings values(assignment.bindings.begin(), assignment.bindings.end());
    for (const auto& in : program.inputs)
        if (!values.contains(in)) throw Error("MissingInput", "no value for input " + in);
    for (const auto& step : program.steps) {
        try {
            values[step.name] = evaluate(step.expr, values);
        } catch (const Error& e) {
            throw Error(e.code(), std::string(e.what()) + " in " + step.name);
        }
    }
    std::map<std::string, Mv> out;
    for (const auto& o : program.outputs) {
        Mv m(program.space);
        for (Blade b : o.blades) m.add_term(b, values.at(o.name + "_" + std::to_string(b.bits)));
        out.emplace(o.name, std::move(m));
    }
    return out;
}

} // namespace gavis::codegen
