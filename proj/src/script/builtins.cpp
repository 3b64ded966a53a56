#include <algorithm>
#include <cctype>

#include "gavis/script/script.hpp"
#include "../util/number_format.hpp"

namespace gavis::script {

Span Span::cover(const Span& a, const Span& b) {
    if (!a.valid()) return b;
    if (!b.valid()) return a;
    const Span& first = a.offset <= b.offset ? a : b;
    Span out = first;
    out.length = std::max(a.end(), b.end()) - first.offset;
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string format(const Diagnostic& d) {
    std::string out = d.severity == Severity::Error ? "error" : "warning";
    if (d.span.valid()) out += " " + std::to_string(d.span.line) + ":" + std::to_string(d.span.column);
    return out + " [" + d.code + "] " + d.message;
}

std::string to_string(TokenKind kind) {
    switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Number: return "number";
    case TokenKind::Operator: return "operator";
    case TokenKind::Punct: return "punctuation";
    case TokenKind::ColorKeyword: return "color";
    case TokenKind::Comment: return "comment";
    case TokenKind::End: return "end";
    }
    return "?";
}

std::string_view op_symbol(BinaryOp op) {
    switch (op) {
    case BinaryOp::Gp: return "*";
    case BinaryOp::Wedge: return "^";
    case BinaryOp::Lcont: return ".";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Div: return "/";
    }
    return "?";
}

std::string_view op_symbol(UnaryOp op) { return op == UnaryOp::Neg ? "-" : "~"; }

ExprPtr Expr::num(double v, Span s) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Num;
    e->number = v;
    e->span = s;
    return e;
}

ExprPtr Expr::ident(std::string n, Span s) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Ident;
    e->name = std::move(n);
    e->span = s;
    return e;
}

ExprPtr Expr::basis(std::string n, Span s) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Basis;
    e->name = std::move(n);
    e->span = s;
    return e;
}

ExprPtr Expr::unary_op(UnaryOp op, ExprPtr a, Span s) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Unary;
    e->unary = op;
    e->args.push_back(std::move(a));
    e->span = s;
    return e;
}

ExprPtr Expr::binary_op(BinaryOp op, ExprPtr a, ExprPtr b, Span s) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->binary = op;
    e->args.push_back(std::move(a));
    e->args.push_back(std::move(b));
    e->span = s;
    return e;
}

ExprPtr Expr::call(std::string n, std::vector<ExprPtr> args, Span s) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Call;
    e->name = std::move(n);
    e->args = std::move(args);
    e->span = s;
    return e;
}

bool structurally_equal(const Expr& a, const Expr& b) {
    if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
    switch (a.kind) {
    case ExprKind::Num:
        if (a.number != b.number) return false;
        break;
    case ExprKind::Ident:
    case ExprKind::Basis:
    case ExprKind::Call:
        if (a.name != b.name) return false;
        break;
    case ExprKind::Unary:
        if (a.unary != b.unary) return false;
        break;
    case ExprKind::Binary:
        if (a.binary != b.binary) return false;
        break;
    }
    for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!structurally_equal(*a.args[i], *b.args[i])) return false;
    return true;
}

bool structurally_equal(const ColorSpec& a, const ColorSpec& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == ColorSpec::Kind::Named) return a.name == b.name;
    if (a.kind == ColorSpec::Kind::Rgb) return a.r == b.r && a.g == b.g && a.b == b.b;
    return true;
}

bool structurally_equal(const ScriptAst& a, const ScriptAst& b) {
    if (a.statements.size() != b.statements.size()) return false;
    for (std::size_t i = 0; i < a.statements.size(); ++i) {
        const Stmt& x = a.statements[i];
        const Stmt& y = b.statements[i];
        if (x.index() != y.index()) return false;
        if (auto* p = std::get_if<AssignStmt>(&x)) {
            auto& q = std::get<AssignStmt>(y);
            if (p->name != q.name || p->optimize != q.optimize || !structurally_equal(*p->expr, *q.expr))
                return false;
        } else if (auto* p = std::get_if<DrawStmt>(&x)) {
            auto& q = std::get<DrawStmt>(y);
            if (p->name != q.name || !structurally_equal(p->color, q.color)) return false;
        } else {
            if (std::get<CommentStmt>(x).text != std::get<CommentStmt>(y).text) return false;
        }
    }
    return true;
}

const std::vector<BuiltinInfo>& builtins() {
    static const std::vector<BuiltinInfo> table = {
        {"sqrt", 1},        {"abs", 1},          {"reverse", 1},    {"dual", 1},       {"inverse", 1},
        {"norm", 1},        {"normalize", 1},    {"createPoint", 3}, {"createSphere", 2},
        {"createPlane", 4}, {"translator", 3},   {"rotor", 2},      {"project", 2},
    };
    return table;
}

const BuiltinInfo* find_builtin(std::string_view name) {
    for (const auto& b : builtins())
        if (b.name == name) return &b;
    return nullptr;
}

bool is_basis_name(std::string_view name) {
    return name == "e1" || name == "e2" || name == "e3" || name == "einf" || name == "e0";
}

const std::vector<std::string_view>& color_keywords() {
    static const std::vector<std::string_view> names = {"blue", "red",   "green", "yellow",
                                                         "black", "white", "cyan",  "magenta"};
    return names;
}

bool is_color_keyword(std::string_view name) {
    const auto& k = color_keywords();
    return std::find(k.begin(), k.end(), name) != k.end();
}

std::string color_text(const ColorSpec& c) {
    switch (c.kind) {
    case ColorSpec::Kind::None: return "";
    case ColorSpec::Kind::Named: return c.name;
    case ColorSpec::Kind::Rgb:
        return "rgb(" + util::short_number(c.r) + ", " + util::short_number(c.g) + ", " +
               util::short_number(c.b) + ")";
    }
    return "";
}

bool is_input_name(std::string_view name) {
    return !name.empty() && std::islower(static_cast<unsigned char>(name.front()));
}

std::optional<double> literal_value(const Expr& e) {
    if (e.kind == ExprKind::Num) return e.number;
    if (e.kind == ExprKind::Unary && e.unary == UnaryOp::Neg && e.args[0]->kind == ExprKind::Num)
        return -e.args[0]->number;
    return std::nullopt;
}

} // namespace gavis::script
