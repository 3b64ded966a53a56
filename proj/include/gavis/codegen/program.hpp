#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gavis/algebra/multivector.hpp"
#include "gavis/script/ast.hpp"
#include "gavis/symbolic/scalar_expr.hpp"

namespace gavis::codegen {

/// An Error that points at script source.
class ScriptError : public Error {
public:
    ScriptError(std::string code, const std::string& message, script::Span span)
        : Error(std::move(code), message), span_(span) {}
    const script::Span& span() const noexcept { return span_; }

private:
    script::Span span_;
};

struct Step {
    std::string name;  // <var>_<bladeIndex>
    std::string var;
    Blade blade;
    ScalarExpr expr;
};

struct OutputInfo {
    std::string name;
    std::vector<Blade> blades;
};

struct DrawInfo {
    std::string name;
    script::ColorSpec color;
};

/// A blade dropped by elimination, with the expression it had and the
/// number of steps emitted before it.
struct EliminatedBlade {
    std::string var;
    Blade blade;
    ScalarExpr expr;
    std::size_t after_steps = 0;
};

struct BladeProgram {
    Space space;
    std::vector<std::string> inputs;
    std::vector<Step> steps;
    std::vector<OutputInfo> outputs;
    std::vector<DrawInfo> draws;
    /// Values given by parameter-binding statements in the script.
    std::vector<std::pair<std::string, double>> defaults;
    std::vector<script::Diagnostic> warnings;
    std::vector<EliminatedBlade> eliminated;
};

struct AssignmentSection {
    std::vector<std::pair<std::string, double>> bindings;
    std::vector<script::Diagnostic> warnings;
};

/// Throws ScriptError (InvalidScript, SymbolicDivisionByNonScalar,
/// NonScalarArgument, UnknownFunction, UnsupportedSpace, ...).
BladeProgram compile(const script::ScriptAst& ast, const Space& space);

/// Throws Error("MissingInput"); unknown names become ExtraInput warnings.
AssignmentSection bind(const BladeProgram& program, const Bindings& values);
/// Script defaults overridden by `overrides`.
Bindings default_bindings(const BladeProgram& program, const Bindings& overrides = {});

enum class Target { Python, JsonIr };
Target target_by_name(std::string_view name);  // "python" | "json-ir"

std::string emit_code(const BladeProgram& program, const AssignmentSection& assignment, Target target);

struct ParsedIr {
    BladeProgram program;
    AssignmentSection assignment;
};
/// Reads back a json-ir document; throws Error("SchemaViolation").
ParsedIr parse_json_ir(std::string_view text);

/// Output multivectors by name. DomainError propagates from scalar evaluation.
std::map<std::string, Mv> run(const BladeProgram& program, const AssignmentSection& assignment);

/// Direct numeric evaluation of the script; returns every assigned variable.
std::map<std::string, Mv> interpret(const script::ScriptAst& ast, const Space& space, const Bindings& inputs);

} // namespace gavis::codegen
