#include <charconv>
#include <cmath>

#include "gavis/symbolic/scalar_expr.hpp"

namespace gavis {

namespace {

using Op = ScalarExpr::Op;

// Python precedence levels, loosest first.
enum Prec { kAdd = 1, kMul = 2, kUnary = 3, kPow = 4, kAtom = 5 };

struct Rendered {
    std::string text;
    int prec;
};

Rendered render(const ScalarExpr& e);

std::string wrap(const Rendered& r, int min_prec) {
    return r.prec >= min_prec ? r.text : "(" + r.text + ")";
}

Rendered render_call(const char* fn, const ScalarExpr& arg) {
    return {std::string(fn) + "(" + render(arg).text + ")", kAtom};
}

Rendered render(const ScalarExpr& e) {
    switch (e.op()) {
        case Op::Const: {
            std::string t = python_number(e.value());
            return {t, e.value() < 0 ? kUnary : kAtom};
        }
        case Op::Var: return {e.name(), kAtom};
        case Op::Add: {
            std::string out = render(e.args()[0]).text;
            for (std::size_t i = 1; i < e.args().size(); ++i) {
                const ScalarExpr& t = e.args()[i];
                if (t.op() == Op::Neg) {
                    out += " - " + wrap(render(t.args()[0]), kMul);
                } else if (t.is_const() && t.value() < 0) {
                    out += " - " + python_number(-t.value());
                } else if (t.op() == Op::Mul && t.args()[0].is_const() && t.args()[0].value() < 0) {
                    std::vector<ScalarExpr> f = t.args();
                    f[0] = ScalarExpr(-f[0].value());
                    out += " - " + wrap(render(ScalarExpr::raw(Op::Mul, f)), kMul);
                } else {
                    out += " + " + render(t).text;
                }
            }
            return {out, kAdd};
        }
        case Op::Mul: {
            std::string out = wrap(render(e.args()[0]), kMul);
            for (std::size_t i = 1; i < e.args().size(); ++i) out += " * " + wrap(render(e.args()[i]), kUnary);
            return {out, kMul};
        }
        case Op::Div:
            return {wrap(render(e.args()[0]), kMul) + " / " + wrap(render(e.args()[1]), kUnary), kMul};
        case Op::Neg: return {"-" + wrap(render(e.args()[0]), kUnary), kUnary};
        case Op::Pow:
            return {wrap(render(e.args()[0]), kAtom) + "**" + std::to_string(e.exponent()), kPow};
        case Op::Sqrt: return render_call("math.sqrt", e.args()[0]);
        case Op::Abs: return render_call("abs", e.args()[0]);
        case Op::Sin: return render_call("math.sin", e.args()[0]);
        case Op::Cos: return render_call("math.cos", e.args()[0]);
    }
    return {"", kAtom};
}

const char* op_name(Op op) {
    switch (op) {
        case Op::Const: return "const";
        case Op::Var: return "var";
        case Op::Add: return "add";
        case Op::Mul: return "mul";
        case Op::Neg: return "neg";
        case Op::Div: return "div";
        case Op::Pow: return "pow";
        case Op::Sqrt: return "sqrt";
        case Op::Abs: return "abs";
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
    }
    return "?";
}

[[noreturn]] void schema_error(const std::string& what) {
    throw Error("SchemaViolation", "json-ir: " + what);
}

} // namespace

std::string python_number(double v) {
    if (v == 0.0) return "0.0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".en") == std::string::npos) s += ".0";
    return s;
}

std::string emit(const ScalarExpr& e, EmissionStyle style) {
    if (style == EmissionStyle::JsonIr) return to_json_ir(e).dump();
    return render(e).text;
}

nlohmann::json to_json_ir(const ScalarExpr& e) {
    nlohmann::json j;
    j["op"] = op_name(e.op());
    if (e.op() == Op::Const) {
        j["value"] = e.value();
        return j;
    }
    if (e.op() == Op::Var) {
        j["name"] = e.name();
        return j;
    }
    nlohmann::json args = nlohmann::json::array();
    for (const auto& a : e.args()) args.push_back(to_json_ir(a));
    j["args"] = std::move(args);
    if (e.op() == Op::Pow) j["exponent"] = e.exponent();
    return j;
}

ScalarExpr from_json_ir(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) schema_error("node without string 'op'");
    const std::string op = j["op"];
    if (op == "const") {
        if (!j.contains("value") || !j["value"].is_number()) schema_error("const without numeric 'value'");
        return ScalarExpr(j["value"].get<double>());
    }
    if (op == "var") {
        if (!j.contains("name") || !j["name"].is_string()) schema_error("var without 'name'");
        return ScalarExpr::var(j["name"].get<std::string>());
    }
    if (!j.contains("args") || !j["args"].is_array()) schema_error("'" + op + "' without 'args'");
    std::vector<ScalarExpr> args;
    for (const auto& a : j["args"]) args.push_back(from_json_ir(a));
    auto need = [&](std::size_t n) {
        if (args.size() != n) schema_error("'" + op + "' expects " + std::to_string(n) + " args");
    };
    if (op == "add") return ScalarExpr::raw(Op::Add, std::move(args));
    if (op == "mul") return ScalarExpr::raw(Op::Mul, std::move(args));
    if (op == "neg") { need(1); return ScalarExpr::raw(Op::Neg, std::move(args)); }
    if (op == "div") { need(2); return ScalarExpr::raw(Op::Div, std::move(args)); }
    if (op == "sqrt") { need(1); return ScalarExpr::raw(Op::Sqrt, std::move(args)); }
    if (op == "abs") { need(1); return ScalarExpr::raw(Op::Abs, std::move(args)); }
    if (op == "sin") { need(1); return ScalarExpr::raw(Op::Sin, std::move(args)); }
    if (op == "cos") { need(1); return ScalarExpr::raw(Op::Cos, std::move(args)); }
    if (op == "pow") {
        need(1);
        if (!j.contains("exponent") || !j["exponent"].is_number_integer()) schema_error("pow without integer 'exponent'");
        return ScalarExpr::raw_pow(args[0], j["exponent"].get<int>());
    }
    schema_error("unknown op '" + op + "'");
}

} // namespace gavis
