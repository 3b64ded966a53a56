#include <sstream>

#include "gavis/codegen/program.hpp"
#include "gavis/script/script.hpp"
#include "util/json_read.hpp"

namespace gavis::codegen {

namespace {

using nlohmann::json;
using namespace util;

std::string py_string(const std::string& s) { return json(s).dump(); }

std::string emit_python(const BladeProgram& p, const AssignmentSection& a) {
    std::ostringstream out;
    out << "import math\n\n";
    out << "# --- assignments ---\n";
    for (const auto& [name, v] : a.bindings) out << name << " = " << python_number(v) << "\n";
    out << "\n# --- optimization code ---\n";
    for (const auto& s : p.steps)
        out << s.name << " = " << emit(s.expr, EmissionStyle::Python) << "  # " << blade_name(s.blade) << "\n";
    out << "\n# --- visualization ---\n";
    if (p.draws.empty()) {
        out << "visualization = []\n";
        return out.str();
    }
    const auto blades_of = [&](const std::string& name) -> const std::vector<Blade>* {
        for (const auto& o : p.outputs)
            if (o.name == name) return &o.blades;
        return nullptr;
    };
    out << "visualization = [\n";
    for (const auto& d : p.draws) {
        out << "    {\"name\": " << py_string(d.name) << ", \"color\": " << py_string(script::color_text(d.color))
            << ", \"blades\": {";
        if (const auto* bl = blades_of(d.name)) {
            for (std::size_t i = 0; i < bl->size(); ++i) {
                if (i) out << ", ";
                out << py_string(blade_name((*bl)[i])) << ": " << d.name << "_" << (*bl)[i].bits;
            }
        }
        out << "}},\n";
    }
    out << "]\n";
    return out.str();
}


std::string emit_ir(const BladeProgram& p, const AssignmentSection& a) {
    json doc;
    doc["format"] = "gavis-json-ir";
    doc["version"] = 1;
    doc["space"] = p.space->name;
    doc["inputs"] = p.inputs;
    doc["assignments"] = json::array();
    for (const auto& [name, v] : a.bindings) doc["assignments"].push_back({{"name", name}, {"value", v}});
    doc["steps"] = json::array();
    for (const auto& s : p.steps)
        doc["steps"].push_back({{"name", s.name}, {"var", s.var}, {"blade", s.blade.bits}, {"expr", to_json_ir(s.expr)}});
    doc["outputs"] = json::array();
    for (const auto& o : p.outputs) {
        json blades = json::array();
        for (Blade b : o.blades) blades.push_back(b.bits);
        doc["outputs"].push_back({{"name", o.name}, {"blades", blades}});
    }
    doc["draws"] = json::array();
    for (const auto& d : p.draws) doc["draws"].push_back({{"name", d.name}, {"color", color_json(d.color)}});
    return doc.dump(2) + "\n";
}

Blade blade_field(const json& v, const std::string& path, const Space& space) {
    if (!v.is_number_unsigned()) schema_error(path, "expected a blade bitmask");
    auto bits = v.get<std::uint32_t>();
    if (bits >= space->blade_count()) schema_error(path, "blade outside the algebra");
    return Blade(bits);
}

} // namespace

std::string emit_code(const BladeProgram& program, const AssignmentSection& assignment, Target target) {
    return target == Target::Python ? emit_python(program, assignment) : emit_ir(program, assignment);
}

ParsedIr parse_json_ir(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("SchemaViolation", std::string("$: ") + e.what());
    }
    if (str_field(doc, "format", "$") != "gavis-json-ir") schema_error("$.format", "unexpected format");
    const json& version = field(doc, "version", "$");
    if (version != 1) schema_error("$.version", "unsupported version");
    ParsedIr out;
    BladeProgram& p = out.program;
    try {
        p.space = space_by_name(str_field(doc, "space", "$"));
    } catch (const Error& e) {
        schema_error("$.space", e.what());
    }
    const json& inputs = array_field(doc, "inputs", "$");
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        if (!inputs[i].is_string()) schema_error("$.inputs[" + std::to_string(i) + "]", "expected a string");
        p.inputs.push_back(inputs[i].get<std::string>());
    }
    const json& assigns = array_field(doc, "assignments", "$");
    for (std::size_t i = 0; i < assigns.size(); ++i) {
        std::string path = "$.assignments[" + std::to_string(i) + "]";
        const json& v = field(assigns[i], "value", path);
        if (!v.is_number()) schema_error(path + ".value", "expected a number");
        out.assignment.bindings.emplace_back(str_field(assigns[i], "name", path), v.get<double>());
    }
    const json& steps = array_field(doc, "steps", "$");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        std::string path = "$.steps[" + std::to_string(i) + "]";
        Step s;
        s.name = str_field(steps[i], "name", path);
        s.var = str_field(steps[i], "var", path);
        s.blade = blade_field(field(steps[i], "blade", path), path + ".blade", p.space);
        try {
            s.expr = from_json_ir(field(steps[i], "expr", path));
        } catch (const Error& e) {
            schema_error(path + ".expr", e.what());
        }
        p.steps.push_back(std::move(s));
    }
    const json& outputs = array_field(doc, "outputs", "$");
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        std::string path = "$.outputs[" + std::to_string(i) + "]";
        OutputInfo o{str_field(outputs[i], "name", path), {}};
        const json& bl = array_field(outputs[i], "blades", path);
        for (std::size_t k = 0; k < bl.size(); ++k)
            o.blades.push_back(blade_field(bl[k], path + ".blades[" + std::to_string(k) + "]", p.space));
        p.outputs.push_back(std::move(o));
    }
    const json& draws = array_field(doc, "draws", "$");
    for (std::size_t i = 0; i < draws.size(); ++i) {
        std::string path = "$.draws[" + std::to_string(i) + "]";
        p.draws.push_back({str_field(draws[i], "name", path), parse_color(field(draws[i], "color", path), path + ".color")});
    }
    return out;
}

} // namespace gavis::codegen
