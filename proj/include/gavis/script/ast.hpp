#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace gavis::script {

/// 1-based line and column, byte offset and length into the source.
struct Span {
    int line = 0;
    int column = 0;
    std::size_t offset = 0;
    std::size_t length = 0;

    bool valid() const { return line > 0; }
    std::size_t end() const { return offset + length; }
    static Span cover(const Span& a, const Span& b);
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    Span span;
};

bool has_errors(const std::vector<Diagnostic>& diags);
std::string format(const Diagnostic& d);

enum class TokenKind { Identifier, Number, Operator, Punct, ColorKeyword, Comment, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string lexeme;  // for comments: the text after "//"
    Span span;
    double number = 0.0;
};

std::string to_string(TokenKind kind);

enum class ExprKind { Num, Ident, Basis, Unary, Binary, Call };
enum class UnaryOp { Neg, Reverse };
enum class BinaryOp { Gp, Wedge, Lcont, Add, Sub, Div };

std::string_view op_symbol(BinaryOp op);
std::string_view op_symbol(UnaryOp op);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind = ExprKind::Num;
    double number = 0.0;
    std::string name;  // identifier, basis or function name
    UnaryOp unary = UnaryOp::Neg;
    BinaryOp binary = BinaryOp::Gp;
    std::vector<ExprPtr> args;  // operands or call arguments
    Span span;

    static ExprPtr num(double v, Span s = {});
    static ExprPtr ident(std::string n, Span s = {});
    static ExprPtr basis(std::string n, Span s = {});
    static ExprPtr unary_op(UnaryOp op, ExprPtr a, Span s = {});
    static ExprPtr binary_op(BinaryOp op, ExprPtr a, ExprPtr b, Span s = {});
    static ExprPtr call(std::string n, std::vector<ExprPtr> args, Span s = {});
};

struct ColorSpec {
    enum class Kind { None, Named, Rgb };
    Kind kind = Kind::None;
    std::string name;
    double r = 0.0, g = 0.0, b = 0.0;
    Span span;
};

struct AssignStmt {
    std::string name;
    bool optimize = false;
    ExprPtr expr;
    Span span;  // the target name
};

struct DrawStmt {
    std::string name;
    ColorSpec color;
    Span span;
};

struct CommentStmt {
    std::string text;
    Span span;
};

using Stmt = std::variant<AssignStmt, DrawStmt, CommentStmt>;

struct ScriptAst {
    std::vector<Stmt> statements;
};

// Spans are ignored.
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const ColorSpec& a, const ColorSpec& b);
bool structurally_equal(const ScriptAst& a, const ScriptAst& b);

} // namespace gavis::script
