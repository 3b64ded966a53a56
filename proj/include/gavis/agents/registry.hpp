#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gavis/agents/records.hpp"

namespace gavis::agents {

struct ParameterSpec {
    std::string name;
    std::string type;  // "scalar" or an object kind; "multivector" accepts anything
    std::string description;
};

/// One callable entry of the function library. Templates use `{param}`
/// placeholders plus `{out}` (or `{out1}`.. `{outN}` when outputs > 1) for
/// the result names and `{tmp}` for a generated helper name.
struct FunctionSpec {
    std::string name;
    SubtaskCategory category = SubtaskCategory::GeometryObjectCreation;
    std::string description;
    std::vector<ParameterSpec> parameters;
    std::string returns;  // kind of each result; "same" copies the first object argument
    int outputs = 1;
    std::string temporary;  // kind used to name {tmp}
    std::string script_template;

    const ParameterSpec* parameter(std::string_view n) const;
};

class Registry {
public:
    Registry() = default;
    explicit Registry(std::vector<FunctionSpec> functions);

    const std::vector<FunctionSpec>& functions() const noexcept { return functions_; }
    const FunctionSpec* find(std::string_view name) const;
    std::vector<const FunctionSpec*> in_category(SubtaskCategory c) const;

private:
    std::vector<FunctionSpec> functions_;
};

/// Placeholder names used by a template, in order of first use.
std::vector<std::string> placeholders(std::string_view script_template);

/// Throws Error("SchemaViolation") with a path for malformed documents,
/// unknown categories, duplicate names or stray placeholders.
Registry load_registry(const nlohmann::json& doc);
Registry load_registry_file(const std::string& path);
/// The registry compiled into the library.
const Registry& builtin_registry();

nlohmann::json to_json(const FunctionSpec& f);
nlohmann::json to_json(const Registry& r);

} // namespace gavis::agents
