#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gavis/codegen/program.hpp"
#include "gavis/codegen/scene.hpp"

namespace gavis::service {

struct CompileRequest {
    std::string script;
    std::string space = "cga3d";
    std::string target = "python";
    Bindings overrides;  // on top of the script's own parameter values
};

struct CompileOutcome {
    bool ok = false;
    std::vector<script::Diagnostic> diagnostics;  // errors when !ok, warnings otherwise
    codegen::BladeProgram program;
    codegen::AssignmentSection assignment;
    std::string code;
    codegen::Scene scene;
    std::map<std::string, Mv> values;
};

/// parse, validate, compile, bind, run, scene, emit. Script problems come
/// back as diagnostics; an unknown space or target throws.
CompileOutcome compile_script(const CompileRequest& request);

/// Throws SchemaViolation. `bindings` is an optional object of numbers.
CompileRequest compile_request_from_json(const nlohmann::json& j);
/// {code, scene, inputs, warnings} or {diagnostics}.
nlohmann::json to_json(const CompileOutcome& o);

} // namespace gavis::service
