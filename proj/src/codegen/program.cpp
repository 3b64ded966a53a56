#include <algorithm>

#include "gavis/codegen/program.hpp"

namespace gavis::codegen {

AssignmentSection bind(const BladeProgram& program, const Bindings& values) {
    AssignmentSection out;
    for (const auto& in : program.inputs) {
        auto it = values.find(in);
        if (it == values.end()) throw Error("MissingInput", "no value for input " + in);
        out.bindings.emplace_back(in, it->second);
    }
    for (const auto& [name, v] : values) {
        if (std::find(program.inputs.begin(), program.inputs.end(), name) == program.inputs.end())
            out.warnings.push_back({script::Severity::Warning, "ExtraInput", name + " is not an input of the program", {}});
    }
    return out;
}

Bindings default_bindings(const BladeProgram& program, const Bindings& overrides) {
    Bindings out(program.defaults.begin(), program.defaults.end());
    for (const auto& [k, v] : overrides) out[k] = v;
    return out;
}

Target target_by_name(std::string_view name) {
    if (name == "python") return Target::Python;
    if (name == "json-ir") return Target::JsonIr;
    throw Error("UnknownTarget", "unknown target '" + std::string(name) + "' (expected python or json-ir)");
}

} // namespace gavis::codegen
