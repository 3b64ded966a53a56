#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "gavis/script/script.hpp"
#include "support/random_ast.hpp"

using namespace gavis::script;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lexemes(const LexResult& r) {
    std::vector<std::string> out;
    for (const auto& t : r.tokens)
        if (t.kind != TokenKind::End) out.push_back(t.lexeme);
    return out;
}

std::vector<std::string> codes(const std::vector<Diagnostic>& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds) out.push_back(d.code);
    return out;
}

const AssignStmt& assign_at(const ScriptAst& ast, std::size_t i) { return std::get<AssignStmt>(ast.statements.at(i)); }

// Span must name real text and agree with its line/column.
bool span_consistent(std::string_view src, const Span& s) {
    if (!s.valid() || s.end() > src.size() || s.length == 0) return false;
    int line = 1, col = 1;
    for (std::size_t i = 0; i < s.offset; ++i) {
        if (src[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return line == s.line && col == s.column;
}

} // namespace

TEST_CASE("lex examples") {
    auto r = lex("?P = e1;");
    CHECK(r.diagnostics.empty());
    CHECK(lexemes(r) == std::vector<std::string>{"?", "P", "=", "e1", ";"});
    CHECK(r.tokens[0].kind == TokenKind::Punct);
    CHECK(r.tokens[1].kind == TokenKind::Identifier);
    CHECK(r.tokens[3].kind == TokenKind::Identifier);

    auto n = lex("0.5*r");
    REQUIRE(n.tokens.size() == 4);
    CHECK(n.tokens[0].kind == TokenKind::Number);
    CHECK(n.tokens[0].number == 0.5);
    CHECK(n.tokens[1].kind == TokenKind::Operator);
    CHECK(n.tokens[2].lexeme == "r");

    auto bad = lex("@");
    REQUIRE(bad.diagnostics.size() == 1);
    CHECK(bad.diagnostics[0].code == "LexError");
    CHECK(bad.diagnostics[0].span.line == 1);
    CHECK(bad.diagnostics[0].span.column == 1);

    auto misc = lex("2.5e-3 1e400 x.2 :S red; // tail\n// whole line");
    CHECK(misc.tokens[0].number == doctest::Approx(2.5e-3));
    CHECK(codes(misc.diagnostics) == std::vector<std::string>{"LexError"});
    CHECK(misc.tokens[1].lexeme == "x");
    CHECK(misc.tokens[2].lexeme == ".");
    CHECK(misc.tokens[3].lexeme == "2");
    CHECK(misc.tokens[6].kind == TokenKind::ColorKeyword);
    CHECK(misc.tokens[8].kind == TokenKind::Comment);
    CHECK(misc.tokens[8].lexeme == " tail");
    CHECK(misc.tokens[9].span.line == 2);
}

TEST_CASE("parse precedence") {
    auto r = parse_source("?S = C - 0.5*r*r*einf;");
    REQUIRE(r.ok());
    const auto& a = assign_at(r.ast, 0);
    CHECK(a.optimize);
    CHECK(a.name == "S");
    auto r_ = Expr::ident("r");
    auto want = Expr::binary_op(
        BinaryOp::Sub, Expr::ident("C"),
        Expr::binary_op(BinaryOp::Gp,
                        Expr::binary_op(BinaryOp::Gp, Expr::binary_op(BinaryOp::Gp, Expr::num(0.5), r_), r_),
                        Expr::basis("einf")));
    CHECK(structurally_equal(*a.expr, *want));

    auto u = parse_source("A = -a ^ ~b . c / d + e;");
    REQUIRE(u.ok());
    CHECK(pretty_print(*assign_at(u.ast, 0).expr) == "-a ^ ~b . c / d + e");
    const Expr& top = *assign_at(u.ast, 0).expr;
    CHECK(top.binary == BinaryOp::Add);
    CHECK(top.args[0]->binary == BinaryOp::Div);
    CHECK(top.args[0]->args[0]->args[0]->args[0]->kind == ExprKind::Unary);

    auto p = parse_source("A = a - (b - c);");
    CHECK(pretty_print(*assign_at(p.ast, 0).expr) == "a - (b - c)");
    auto q = parse_source("A = (a - b) - c;");
    CHECK(pretty_print(*assign_at(q.ast, 0).expr) == "a - b - c");
}

TEST_CASE("parse errors and recovery") {
    auto d = parse_source(":S1; ");
    CHECK(d.ok());
    CHECK(codes(validate(d.ast)) == std::vector<std::string>{"DrawUndefined"});

    auto e = parse_source("?x = ;");
    REQUIRE_FALSE(e.ok());
    CHECK(e.diagnostics[0].code == "ParseError");
    CHECK(e.diagnostics[0].message.find("expected expression") != std::string::npos);
    CHECK(e.diagnostics[0].span.column == 6);

    auto two = parse_source("A = 1 +;\nB = e1;\nC = (e2;\n");
    CHECK(codes(two.diagnostics) == std::vector<std::string>{"ParseError", "ParseError"});
    CHECK(two.ast.statements.size() == 1);
    CHECK(two.diagnostics[1].span.line == 3);

    auto eof = parse_source("A = e1");
    REQUIRE_FALSE(eof.ok());
    CHECK(eof.diagnostics[0].message.find("end of input") != std::string::npos);
}

TEST_CASE("validate") {
    auto check = [](const char* src) {
        auto r = parse_source(src);
        REQUIRE(r.ok());
        return validate(r.ast);
    };
    auto undefined = check("?S = C - 0.5 * r * r * einf;");
    REQUIRE(undefined.size() == 1);
    CHECK(undefined[0].message == "undefined identifier C");
    CHECK(undefined[0].span.column == 6);

    auto basis = check("e1 = 3;");
    REQUIRE(basis.size() == 1);
    CHECK(basis[0].message == "cannot assign basis vector e1");

    CHECK(check("?P = createPoint(x, y, z); :P blue;").empty());
    CHECK(codes(check("A = B; B = e1;")) == std::vector<std::string>{"UseBeforeDefine"});
    CHECK(codes(check("A = foo(e1);")) == std::vector<std::string>{"UnknownFunction"});
    CHECK(codes(check("A = createPoint(1, 2);")) == std::vector<std::string>{"ArityMismatch"});
    CHECK(codes(check("A = e1; :A mauve;")) == std::vector<std::string>{"InvalidColor"});
    CHECK(codes(check("A = e1; :A rgb(0.5, 1.5, 0);")) == std::vector<std::string>{"InvalidColor"});
    CHECK(check("A = e1; :A rgb(0, 0.5, 1);").empty());
    CHECK(codes(check("?A = e1; ?A = e2;")) == std::vector<std::string>{"DuplicateOptimize"});
    CHECK(check("A = e1; A = A + e2;").empty());

    // Parameter bindings may follow their use.
    CHECK(check("?S = createSphere(createPoint(x, y, z), r); r = 0.5; x = 1; y = -2; z = 0;").empty());
    CHECK(codes(check("?S = r * e1; r = 1; r = 2;")) == std::vector<std::string>{"DuplicateBinding"});
    // A name assigned a non-literal is a variable, not a parameter.
    CHECK(codes(check("?S = r * e1; r = 1; r = e2;")) == std::vector<std::string>{"UseBeforeDefine"});
    CHECK(codes(check("A = lambda * e1;")) == std::vector<std::string>{"ReservedName"});
    CHECK(codes(check("a = e1; B = a * a_1;")) == std::vector<std::string>{"NameClash"});

    std::string golden = read_file(std::string(GAVIS_SOURCE_DIR) + "/data/scripts/three_spheres.gas");
    auto g = parse_source(golden);
    REQUIRE(g.ok());
    CHECK(validate(g.ast).empty());
    CHECK(validate(g.ast).size() == validate(g.ast).size());
}

TEST_CASE("analyze") {
    auto r = parse_source("?S = createSphere(createPoint(x, y, z), r); T = S * w; r = 0.5; w = -1; :S red;");
    REQUIRE(r.ok());
    auto sym = analyze(r.ast);
    CHECK(sym.inputs == std::vector<std::string>{"x", "y", "z", "r", "w"});
    REQUIRE(sym.bindings.size() == 2);
    CHECK(sym.bindings[1].second == -1.0);
    CHECK(sym.variables == std::vector<std::string>{"S", "T"});
    CHECK(sym.optimized == std::vector<std::string>{"S"});
    CHECK(sym.drawn == std::vector<std::string>{"S"});
}

TEST_CASE("pretty print") {
    auto messy = parse_source("?A=e1+  2*e2;\n\n  :A   rgb( 1,0 , 0.5 ) ;//keep  this\nB=(A)^(e3);");
    REQUIRE(messy.ok());
    CHECK(pretty_print(messy.ast) == "?A = e1 + 2 * e2;\n:A rgb(1, 0, 0.5);\n//keep  this\nB = A ^ e3;\n");

    auto mid = parse_source("A = e1 // inside\n + e2;");
    REQUIRE(mid.ok());
    CHECK(pretty_print(mid.ast) == "A = e1 + e2;\n// inside\n");

    std::string golden = read_file(std::string(GAVIS_SOURCE_DIR) + "/data/scripts/three_spheres.gas");
    auto g = parse_source(golden);
    CHECK(pretty_print(g.ast) == golden);
    auto again = parse_source(pretty_print(g.ast));
    CHECK(structurally_equal(again.ast, g.ast));
}

TEST_CASE("parse . pretty_print is the identity on random ASTs") {
    gen::AstGen g(20261018);
    for (int i = 0; i < 1000; ++i) {
        ScriptAst ast = g.script();
        std::string text = pretty_print(ast);
        auto back = parse_source(text);
        INFO(text);
        REQUIRE(back.ok());
        CHECK(structurally_equal(back.ast, ast));
        CHECK(pretty_print(back.ast) == text);
    }
}

TEST_CASE("diagnostic spans index real source") {
    std::mt19937_64 rng(7);
    const std::string alphabet = "?:;=+-*^./~()ab e1 einf 0.5 rgb red // \n@#\xc3\xa9";
    for (int i = 0; i < 2000; ++i) {
        std::string src;
        int n = std::uniform_int_distribution<int>(0, 40)(rng);
        for (int k = 0; k < n; ++k) src += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
        auto r = parse_source(src);
        std::vector<Diagnostic> all = r.diagnostics;
        if (r.ok()) {
            auto v = validate(r.ast);
            all.insert(all.end(), v.begin(), v.end());
            CHECK(codes(validate(r.ast)) == codes(v));
        }
        for (const auto& d : all) {
            INFO(src, " -> ", format(d));
            CHECK(span_consistent(src, d.span));
        }
    }
}
