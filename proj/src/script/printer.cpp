#include "gavis/script/script.hpp"
#include "../util/number_format.hpp"

namespace gavis::script {

namespace {

// 1: + -   2: * . ^ /   3: unary   4: atoms and calls
int precedence(const Expr& e) {
    switch (e.kind) {
    case ExprKind::Binary:
        return (e.binary == BinaryOp::Add || e.binary == BinaryOp::Sub) ? 1 : 2;
    case ExprKind::Unary: return 3;
    default: return 4;
    }
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
    if (wrap) out += '(';
    print(e, out);
    if (wrap) out += ')';
}

void print(const Expr& e, std::string& out) {
    switch (e.kind) {
    case ExprKind::Num: out += util::short_number(e.number); return;
    case ExprKind::Ident:
    case ExprKind::Basis: out += e.name; return;
    case ExprKind::Call:
        out += e.name;
        out += '(';
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            if (i) out += ", ";
            print(*e.args[i], out);
        }
        out += ')';
        return;
    case ExprKind::Unary:
        out += op_symbol(e.unary);
        print_wrapped(*e.args[0], precedence(*e.args[0]) < 3, out);
        return;
    case ExprKind::Binary: {
        int p = precedence(e);
        print_wrapped(*e.args[0], precedence(*e.args[0]) < p, out);
        out += ' ';
        out += op_symbol(e.binary);
        out += ' ';
        print_wrapped(*e.args[1], precedence(*e.args[1]) <= p, out);
        return;
    }
    }
}

} // namespace

std::string pretty_print(const Expr& expr) {
    std::string out;
    print(expr, out);
    return out;
}

std::string pretty_print(const ScriptAst& ast) {
    std::string out;
    for (const Stmt& s : ast.statements) {
        if (auto* a = std::get_if<AssignStmt>(&s)) {
            if (a->optimize) out += '?';
            out += a->name + " = " + pretty_print(*a->expr) + ";";
        } else if (auto* d = std::get_if<DrawStmt>(&s)) {
            out += ":" + d->name;
            if (d->color.kind != ColorSpec::Kind::None) out += " " + color_text(d->color);
            out += ";";
        } else {
            out += "//" + std::get<CommentStmt>(s).text;
        }
        out += '\n';
    }
    return out;
}

} // namespace gavis::script
