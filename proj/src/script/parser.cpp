#include "gavis/script/script.hpp"

namespace gavis::script {

namespace {

struct ParseFailure {};

class Parser {
public:
    explicit Parser(const std::vector<Token>& toks) {
        std::vector<Token> pending;
        for (const Token& t : toks) {
            if (t.kind == TokenKind::Comment) {
                pending.push_back(t);
                continue;
            }
            toks_.push_back(t);
            comments_before_.push_back(std::move(pending));
            pending.clear();
        }
    }

    ParseResult run() {
        for (;;) {
            flush_comments(pos_, pos_ + 1);
            if (at_end()) break;
            std::size_t start = pos_;
            try {
                statement();
            } catch (const ParseFailure&) {
                recover();
            }
            // Comments inside a statement land on their own lines after it.
            flush_comments(start + 1, pos_);
        }
        return std::move(out_);
    }

private:
    void flush_comments(std::size_t from, std::size_t to) {
        for (std::size_t i = from; i < to && i < comments_before_.size(); ++i) {
            for (const Token& c : comments_before_[i]) out_.ast.statements.push_back(CommentStmt{c.lexeme, c.span});
            comments_before_[i].clear();
        }
    }

    const Token& cur() const { return toks_[pos_]; }
    bool at_end() const { return cur().kind == TokenKind::End; }
    const Token& take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    bool is(TokenKind k, std::string_view lexeme = {}) const {
        return cur().kind == k && (lexeme.empty() || cur().lexeme == lexeme);
    }
    bool is_punct(std::string_view p) const { return is(TokenKind::Punct, p); }
    bool is_op(std::string_view p) const { return is(TokenKind::Operator, p); }

    static std::string describe(const Token& t) {
        if (t.kind == TokenKind::End) return "end of input";
        return "'" + t.lexeme + "'";
    }

    [[noreturn]] void fail(const std::string& expected) {
        Span s = cur().span;
        if (s.length == 0 && pos_ > 0) {
            // Point just past the previous token rather than at end of input.
            Span p = toks_[pos_ - 1].span;
            s = Span{p.line, p.column + static_cast<int>(p.length), p.end(), 0};
        }
        if (s.length == 0 && s.offset > 0) {
            // Zero-width spans still need to index real text.
            s.offset -= 1;
            s.column = s.column > 1 ? s.column - 1 : 1;
            s.length = 1;
        }
        out_.diagnostics.push_back(
            {Severity::Error, "ParseError", "expected " + expected + " but found " + describe(cur()), s});
        throw ParseFailure{};
    }

    const Token& expect_punct(std::string_view p) {
        if (!is_punct(p)) fail("'" + std::string(p) + "'");
        return take();
    }

    const Token& expect_ident(const char* what) {
        if (!is(TokenKind::Identifier)) fail(what);
        return take();
    }

    void recover() {
        while (!at_end() && !is_punct(";")) take();
        if (is_punct(";")) take();
    }

    void statement() {
        if (is_punct(":")) {
            take();
            const Token& name = expect_ident("identifier after ':'");
            DrawStmt d{name.lexeme, {}, name.span};
            if (!is_punct(";")) d.color = color();
            expect_punct(";");
            out_.ast.statements.push_back(std::move(d));
            return;
        }
        bool optimize = false;
        if (is_punct("?")) {
            take();
            optimize = true;
        }
        if (!is(TokenKind::Identifier)) fail(optimize ? "identifier after '?'" : "statement");
        const Token& name = take();
        expect_punct("=");
        ExprPtr e = expr();
        expect_punct(";");
        out_.ast.statements.push_back(AssignStmt{name.lexeme, optimize, e, name.span});
    }

    double signed_number() {
        bool neg = false;
        if (is_op("-")) {
            take();
            neg = true;
        }
        if (!is(TokenKind::Number)) fail("number");
        double v = take().number;
        return neg ? -v : v;
    }

    ColorSpec color() {
        ColorSpec c;
        Span start = cur().span;
        if (is(TokenKind::ColorKeyword)) {
            c.kind = ColorSpec::Kind::Named;
            c.name = cur().lexeme;
            c.span = take().span;
            return c;
        }
        if (is(TokenKind::Identifier, "rgb") && toks_[pos_ + 1].kind == TokenKind::Punct &&
            toks_[pos_ + 1].lexeme == "(") {
            take();
            take();
            c.kind = ColorSpec::Kind::Rgb;
            c.r = signed_number();
            expect_punct(",");
            c.g = signed_number();
            expect_punct(",");
            c.b = signed_number();
            const Token& close = expect_punct(")");
            c.span = Span::cover(start, close.span);
            return c;
        }
        if (is(TokenKind::Identifier)) {
            // Unknown color words are left for the validator.
            c.kind = ColorSpec::Kind::Named;
            c.name = cur().lexeme;
            c.span = take().span;
            return c;
        }
        fail("color or ';'");
    }

    ExprPtr expr() {
        ExprPtr lhs = term();
        while (is_op("+") || is_op("-")) {
            BinaryOp op = take().lexeme == "+" ? BinaryOp::Add : BinaryOp::Sub;
            ExprPtr rhs = term();
            lhs = Expr::binary_op(op, lhs, rhs, Span::cover(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr term() {
        ExprPtr lhs = factor();
        while (is_op("*") || is_op(".") || is_op("^") || is_op("/")) {
            char c = take().lexeme[0];
            BinaryOp op = c == '*' ? BinaryOp::Gp : c == '.' ? BinaryOp::Lcont : c == '^' ? BinaryOp::Wedge : BinaryOp::Div;
            ExprPtr rhs = factor();
            lhs = Expr::binary_op(op, lhs, rhs, Span::cover(lhs->span, rhs->span));
        }
        return lhs;
    }

    ExprPtr factor() {
        if (is_op("-") || is_op("~")) {
            const Token& t = take();
            UnaryOp op = t.lexeme == "-" ? UnaryOp::Neg : UnaryOp::Reverse;
            Span s = t.span;
            ExprPtr a = factor();
            return Expr::unary_op(op, a, Span::cover(s, a->span));
        }
        return atom();
    }

    ExprPtr atom() {
        if (is(TokenKind::Number)) {
            const Token& t = take();
            return Expr::num(t.number, t.span);
        }
        if (is_punct("(")) {
            Span open = take().span;
            ExprPtr e = expr();
            const Token& close = expect_punct(")");
            // Keep the inner node; widen its span to the parentheses.
            auto copy = std::make_shared<Expr>(*e);
            copy->span = Span::cover(open, close.span);
            return copy;
        }
        if (is(TokenKind::Identifier)) {
            const Token& t = take();
            if (is_punct("(")) {
                take();
                std::vector<ExprPtr> args;
                if (!is_punct(")")) {
                    args.push_back(expr());
                    while (is_punct(",")) {
                        take();
                        args.push_back(expr());
                    }
                }
                const Token& close = expect_punct(")");
                return Expr::call(t.lexeme, std::move(args), Span::cover(t.span, close.span));
            }
            if (is_basis_name(t.lexeme)) return Expr::basis(t.lexeme, t.span);
            return Expr::ident(t.lexeme, t.span);
        }
        fail("expression");
    }

    std::vector<Token> toks_;
    std::vector<std::vector<Token>> comments_before_;
    std::size_t pos_ = 0;
    ParseResult out_;
};

} // namespace

ParseResult parse(const std::vector<Token>& tokens) {
    if (tokens.empty() || tokens.back().kind != TokenKind::End) {
        std::vector<Token> copy = tokens;
        Token end;
        if (!copy.empty()) {
            Span p = copy.back().span;
            end.span = Span{p.line, p.column + static_cast<int>(p.length), p.end(), 0};
        } else {
            end.span = Span{1, 1, 0, 0};
        }
        copy.push_back(end);
        return Parser(copy).run();
    }
    return Parser(tokens).run();
}

ParseResult parse_source(std::string_view source) {
    LexResult lr = lex(source);
    ParseResult pr = parse(lr.tokens);
    lr.diagnostics.insert(lr.diagnostics.end(), pr.diagnostics.begin(), pr.diagnostics.end());
    pr.diagnostics = std::move(lr.diagnostics);
    return pr;
}

} // namespace gavis::script
