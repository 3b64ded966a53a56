#include "gavis/agents/pipeline.hpp"
#include "gavis/algebra/signature.hpp"
#include "gavis/script/script.hpp"
#include "gavis/service/compile.hpp"
#include "util/json_read.hpp"

namespace gavis::service {

using nlohmann::json;

CompileOutcome compile_script(const CompileRequest& request) {
    Space space = space_by_name(request.space);
    codegen::Target target = codegen::target_by_name(request.target);
    CompileOutcome out;
    auto parsed = script::parse_source(request.script);
    out.diagnostics = parsed.diagnostics;
    if (!parsed.ok()) return out;
    auto checks = script::validate(parsed.ast);
    out.diagnostics.insert(out.diagnostics.end(), checks.begin(), checks.end());
    if (script::has_errors(out.diagnostics)) return out;
    try {
        out.program = codegen::compile(parsed.ast, space);
        out.assignment = codegen::bind(out.program, codegen::default_bindings(out.program, request.overrides));
        out.values = codegen::run(out.program, out.assignment);
        out.scene = codegen::scene_of(out.program, out.values);
        out.code = codegen::emit_code(out.program, out.assignment, target);
    } catch (const Error& e) {
        script::Diagnostic d{script::Severity::Error, e.code(), e.what(), {}};
        if (auto* se = dynamic_cast<const codegen::ScriptError*>(&e)) d.span = se->span();
        out.diagnostics.push_back(d);
        return out;
    }
    for (const auto* ws : {&out.program.warnings, &out.assignment.warnings, &out.scene.warnings})
        out.diagnostics.insert(out.diagnostics.end(), ws->begin(), ws->end());
    out.ok = true;
    return out;
}

CompileRequest compile_request_from_json(const json& j) {
    if (!j.is_object()) util::schema_error("$", "expected an object");
    CompileRequest r;
    r.script = util::str_field(j, "script", "$");
    r.space = util::opt_str_field(j, "space", "$", "cga3d");
    r.target = util::opt_str_field(j, "target", "$", "python");
    if (j.contains("bindings") && !j["bindings"].is_null()) {
        const json& b = util::object_field(j, "bindings", "$");
        for (const auto& [k, v] : b.items()) {
            if (!v.is_number()) util::schema_error("$.bindings." + k, "expected a number");
            r.overrides[k] = v.get<double>();
        }
    }
    return r;
}

json to_json(const CompileOutcome& o) {
    json diags = json::array();
    for (const auto& d : o.diagnostics) diags.push_back(agents::to_json(d));
    if (!o.ok) return {{"diagnostics", diags}};
    json inputs = json::array();
    for (const auto& [name, value] : o.assignment.bindings) inputs.push_back({{"name", name}, {"value", value}});
    return {{"code", o.code}, {"scene", codegen::to_json(o.scene)}, {"inputs", inputs}, {"warnings", diags}};
}

} // namespace gavis::service
