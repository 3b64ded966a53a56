#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gavis/script/ast.hpp"

namespace gavis::script {

struct LexResult {
    std::vector<Token> tokens;  // always terminated by an End token
    std::vector<Diagnostic> diagnostics;
};

LexResult lex(std::string_view source);

struct ParseResult {
    ScriptAst ast;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return !has_errors(diagnostics); }
};

ParseResult parse(const std::vector<Token>& tokens);
/// lex + parse; lexer diagnostics come first.
ParseResult parse_source(std::string_view source);

std::vector<Diagnostic> validate(const ScriptAst& ast);

std::string pretty_print(const ScriptAst& ast);
std::string pretty_print(const Expr& expr);

struct BuiltinInfo {
    std::string_view name;
    int arity;
};

const std::vector<BuiltinInfo>& builtins();
const BuiltinInfo* find_builtin(std::string_view name);
bool is_basis_name(std::string_view name);
bool is_color_keyword(std::string_view name);
const std::vector<std::string_view>& color_keywords();
/// "blue", "rgb(0.5, 0, 1)" or "" for no color.
std::string color_text(const ColorSpec& c);

/// Names a validated script introduces. A parameter binding is a plain
/// assignment of a (possibly negated) literal to a lowercase name that is
/// never assigned anything else; such names stay program inputs.
struct ScriptSymbols {
    std::vector<std::string> inputs;
    std::vector<std::pair<std::string, double>> bindings;
    std::vector<std::string> variables;
    std::vector<std::string> optimized;
    std::vector<std::string> drawn;
};

ScriptSymbols analyze(const ScriptAst& ast);
bool is_input_name(std::string_view name);
std::optional<double> literal_value(const Expr& e);

} // namespace gavis::script
