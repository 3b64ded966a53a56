#include <algorithm>
#include <map>
#include <regex>
#include <set>

#include "gavis/script/script.hpp"

namespace gavis::script {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

void push_unique(std::vector<std::string>& v, const std::string& s) {
    if (!contains(v, s)) v.push_back(s);
}

void visit_idents(const Expr& e, const auto& fn) {
    if (e.kind == ExprKind::Ident) fn(e);
    for (const auto& a : e.args) visit_idents(*a, fn);
}

// Names assigned anything other than a literal, or assigned with '?'.
std::set<std::string> non_literal_targets(const ScriptAst& ast) {
    std::set<std::string> out;
    for (const Stmt& s : ast.statements) {
        if (auto* a = std::get_if<AssignStmt>(&s))
            if (a->optimize || !literal_value(*a->expr) || !is_input_name(a->name)) out.insert(a->name);
    }
    return out;
}

bool is_binding(const AssignStmt& a, const std::set<std::string>& non_literal) {
    return !a.optimize && is_input_name(a.name) && literal_value(*a.expr) && !non_literal.contains(a.name);
}

const std::set<std::string>& python_reserved() {
    static const std::set<std::string> names = {
        "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
        "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in",
        "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while", "with",
        "yield", "math", "abs", "print"};
    return names;
}

class Validator {
public:
    explicit Validator(const ScriptAst& ast) : ast_(ast), non_literal_(non_literal_targets(ast)) {
        for (const Stmt& s : ast.statements)
            if (auto* a = std::get_if<AssignStmt>(&s))
                if (!is_binding(*a, non_literal_)) assigned_anywhere_.insert(a->name);
    }

    std::vector<Diagnostic> run() {
        for (const Stmt& s : ast_.statements) {
            if (auto* a = std::get_if<AssignStmt>(&s))
                assign(*a);
            else if (auto* d = std::get_if<DrawStmt>(&s))
                draw(*d);
        }
        name_clashes();
        return std::move(diags_);
    }

private:
    void error(std::string code, std::string msg, Span span) {
        diags_.push_back({Severity::Error, std::move(code), std::move(msg), span});
    }

    void assign(const AssignStmt& a) {
        check_expr(*a.expr);
        if (is_basis_name(a.name)) {
            error("AssignBasis", "cannot assign basis vector " + a.name, a.span);
            return;
        }
        if (python_reserved().contains(a.name)) {
            error("ReservedName", "name " + a.name + " is reserved", a.span);
            return;
        }
        if (is_binding(a, non_literal_)) {
            if (bound_.contains(a.name))
                error("DuplicateBinding", "parameter " + a.name + " is bound twice", a.span);
            bound_.insert(a.name);
            return;
        }
        if (a.optimize) {
            if (optimized_.contains(a.name))
                error("DuplicateOptimize", "optimized output " + a.name + " is marked more than once", a.span);
            optimized_.insert(a.name);
        }
        defined_.insert(a.name);
    }

    void draw(const DrawStmt& d) {
        if (!defined_.contains(d.name))
            error("DrawUndefined", "cannot draw undefined " + d.name, d.span);
        const ColorSpec& c = d.color;
        if (c.kind == ColorSpec::Kind::Named && !is_color_keyword(c.name))
            error("InvalidColor", "unknown color " + c.name, c.span);
        if (c.kind == ColorSpec::Kind::Rgb) {
            for (double v : {c.r, c.g, c.b})
                if (v < 0.0 || v > 1.0) {
                    error("InvalidColor", "rgb components must lie in [0, 1]", c.span);
                    break;
                }
        }
    }

    void check_expr(const Expr& e) {
        switch (e.kind) {
        case ExprKind::Ident: ident(e); break;
        case ExprKind::Call: {
            const BuiltinInfo* b = find_builtin(e.name);
            if (!b)
                error("UnknownFunction", "unknown function " + e.name, e.span);
            else if (static_cast<int>(e.args.size()) != b->arity)
                error("ArityMismatch",
                      e.name + " expects " + std::to_string(b->arity) + " argument" + (b->arity == 1 ? "" : "s") +
                          ", got " + std::to_string(e.args.size()),
                      e.span);
            break;
        }
        default: break;
        }
        for (const auto& a : e.args) check_expr(*a);
    }

    void ident(const Expr& e) {
        if (defined_.contains(e.name)) return;
        if (assigned_anywhere_.contains(e.name)) {
            error("UseBeforeDefine", "identifier " + e.name + " used before definition", e.span);
            return;
        }
        if (!is_input_name(e.name)) {
            error("UndefinedIdentifier", "undefined identifier " + e.name, e.span);
            return;
        }
        if (python_reserved().contains(e.name)) error("ReservedName", "name " + e.name + " is reserved", e.span);
    }

    // Inputs must not collide with the per-blade temporaries of variables.
    void name_clashes() {
        static const std::regex temp(R"((.+)_([0-9]+))");
        ScriptSymbols sym = analyze(ast_);
        for (const auto& in : sym.inputs) {
            std::smatch m;
            if (std::regex_match(in, m, temp) && contains(sym.variables, m[1].str())) {
                Span where;
                for (const Stmt& s : ast_.statements)
                    if (auto* a = std::get_if<AssignStmt>(&s)) {
                        visit_idents(*a->expr, [&](const Expr& x) {
                            if (!where.valid() && x.name == in) where = x.span;
                        });
                        if (!where.valid() && a->name == in) where = a->span;
                    }
                error("NameClash", "input " + in + " collides with a temporary of " + m[1].str(), where);
            }
        }
    }

    const ScriptAst& ast_;
    std::set<std::string> non_literal_;
    std::set<std::string> assigned_anywhere_;
    std::set<std::string> defined_;
    std::set<std::string> bound_;
    std::set<std::string> optimized_;
    std::vector<Diagnostic> diags_;
};

} // namespace

std::vector<Diagnostic> validate(const ScriptAst& ast) { return Validator(ast).run(); }

ScriptSymbols analyze(const ScriptAst& ast) {
    ScriptSymbols sym;
    auto non_literal = non_literal_targets(ast);
    for (const Stmt& s : ast.statements) {
        if (auto* a = std::get_if<AssignStmt>(&s)) {
            visit_idents(*a->expr, [&](const Expr& x) {
                if (!non_literal.contains(x.name) && is_input_name(x.name)) push_unique(sym.inputs, x.name);
            });
            if (is_binding(*a, non_literal)) {
                push_unique(sym.inputs, a->name);
                sym.bindings.emplace_back(a->name, *literal_value(*a->expr));
            } else {
                push_unique(sym.variables, a->name);
                if (a->optimize) push_unique(sym.optimized, a->name);
            }
        } else if (auto* d = std::get_if<DrawStmt>(&s)) {
            push_unique(sym.drawn, d->name);
        }
    }
    return sym;
}

} // namespace gavis::script
