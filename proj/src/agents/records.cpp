#include <algorithm>
#include <set>

#include "gavis/agents/records.hpp"
#include "util/json_read.hpp"

namespace gavis::agents {

using nlohmann::json;
using namespace util;

namespace {

constexpr std::array<std::string_view, 5> kCategoryNames = {
    "GeometryObjectCreation", "FundamentalAlgebraicOperations", "GeometricElementOperations",
    "GeometricTransformation", "NumericalOperations"};

constexpr std::array<std::string_view, 3> kPhaseNames = {"Observation", "Thoughts", "Action"};

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& path) {
    std::vector<std::string> out;
    const json& arr = array_field(obj, key, path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_string()) schema_error(path + "." + key + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(arr[i].get<std::string>());
    }
    return out;
}

} // namespace

const std::array<SubtaskCategory, 5>& all_categories() {
    static const std::array<SubtaskCategory, 5> all = {
        SubtaskCategory::GeometryObjectCreation, SubtaskCategory::FundamentalAlgebraicOperations,
        SubtaskCategory::GeometricElementOperations, SubtaskCategory::GeometricTransformation,
        SubtaskCategory::NumericalOperations};
    return all;
}

std::string_view to_string(SubtaskCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

SubtaskCategory category_by_name(std::string_view name) {
    for (std::size_t i = 0; i < kCategoryNames.size(); ++i)
        if (kCategoryNames[i] == name) return static_cast<SubtaskCategory>(i);
    throw Error("SchemaViolation", "unknown subtask category '" + std::string(name) + "'");
}

std::string_view to_string(Phase p) { return kPhaseNames[static_cast<std::size_t>(p)]; }

void check_plan(const Plan& plan) {
    if (plan.subtasks.empty()) schema_error("$.subtasks", "a plan needs at least one subtask");
    std::map<std::string, std::size_t> index;
    std::map<std::string, std::string> producer;  // variable -> task id
    for (std::size_t i = 0; i < plan.subtasks.size(); ++i) {
        const auto& r = plan.subtasks[i];
        std::string path = "$.subtasks[" + std::to_string(i) + "]";
        if (r.task_id.empty()) schema_error(path + ".task_id", "empty task id");
        if (!index.emplace(r.task_id, i).second) schema_error(path + ".task_id", "duplicate task id " + r.task_id);
        for (const auto& dep : r.depends_on)
            if (!index.count(dep) || dep == r.task_id)
                schema_error(path + ".depends_on", "'" + dep + "' is not an earlier subtask");
        for (const auto& [slot, var] : r.references) {
            auto it = producer.find(var);
            if (it == producer.end())
                schema_error(path + ".references." + slot, "'" + var + "' is not produced by an earlier subtask");
            if (std::find(r.depends_on.begin(), r.depends_on.end(), it->second) == r.depends_on.end())
                schema_error(path + ".depends_on", "missing dependency " + it->second + " for '" + var + "'");
        }
        for (const auto& v : r.visualization)
            if (v.variable.empty() ||
                std::find(r.variable_names.begin(), r.variable_names.end(), v.variable) == r.variable_names.end())
                schema_error(path + ".visualization", "'" + v.variable + "' is not one of the subtask's variables");
        for (const auto& v : r.variable_names)
            if (!v.empty()) producer[v] = r.task_id;
    }
    const auto& steps = plan.trace.steps;
    for (std::size_t i = 0; i < steps.size(); ++i)
        if (static_cast<std::size_t>(steps[i].phase) != i % 3)
            schema_error("$.trace[" + std::to_string(i) + "].phase", "phases must cycle Observation, Thoughts, Action");
    if (steps.size() % 3 != 0) schema_error("$.trace", "incomplete Observation/Thoughts/Action cycle");
}

json to_json(const script::ColorSpec& c) { return color_json(c); }

json to_json(const SubtaskRecord& r) {
    json vis = json::array();
    for (const auto& v : r.visualization) vis.push_back({{"variable", v.variable}, {"color", to_json(v.color)}});
    json values = json::object();
    for (const auto& [k, v] : r.specific_values) values[k] = v;
    json refs = json::object();
    for (const auto& [k, v] : r.references) refs[k] = v;
    return {{"task_id", r.task_id},
            {"task_name", r.task_name},
            {"task_description", r.task_description},
            {"variable_names", r.variable_names},
            {"code_language", r.code_language},
            {"ga_type", r.ga_type},
            {"specific_values", values},
            {"visualization", vis},
            {"category", std::string(to_string(r.category))},
            {"depends_on", r.depends_on},
            {"operation", r.operation},
            {"references", refs}};
}

json to_json(const ReActTrace& t) {
    json out = json::array();
    for (const auto& s : t.steps)
        out.push_back({{"phase", std::string(to_string(s.phase))}, {"text", s.text}, {"timestamp", s.timestamp}});
    return out;
}

json to_json(const PlanRequest& r) {
    return {{"description", r.description}, {"formula", r.formula}, {"space", r.space}, {"language", r.language}};
}

json to_json(const Plan& p) {
    json subtasks = json::array();
    for (const auto& r : p.subtasks) subtasks.push_back(to_json(r));
    return {{"source", to_json(p.source)}, {"subtasks", subtasks}, {"trace", to_json(p.trace)}};
}

script::ColorSpec color_from_json(const json& j, const std::string& path) { return parse_color(j, path); }

SubtaskRecord subtask_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) schema_error(path, "expected an object");
    SubtaskRecord r;
    r.task_id = str_field(j, "task_id", path);
    r.task_name = str_field(j, "task_name", path);
    r.task_description = str_field(j, "task_description", path);
    r.variable_names = string_list(j, "variable_names", path);
    r.code_language = str_field(j, "code_language", path);
    if (r.code_language != "python" && r.code_language != "json-ir")
        schema_error(path + ".code_language", "expected python or json-ir");
    r.ga_type = str_field(j, "ga_type", path);
    for (const auto& [k, v] : object_field(j, "specific_values", path).items()) {
        if (!v.is_number()) schema_error(path + ".specific_values." + k, "expected a number");
        r.specific_values[k] = v.get<double>();
    }
    const json& vis = array_field(j, "visualization", path);
    for (std::size_t i = 0; i < vis.size(); ++i) {
        std::string vp = path + ".visualization[" + std::to_string(i) + "]";
        r.visualization.push_back({str_field(vis[i], "variable", vp), color_from_json(field(vis[i], "color", vp), vp + ".color")});
    }
    try {
        r.category = category_by_name(str_field(j, "category", path));
    } catch (const Error& e) {
        schema_error(path + ".category", e.what());
    }
    r.depends_on = string_list(j, "depends_on", path);
    r.operation = str_field(j, "operation", path);
    if (j.contains("references")) {
        for (const auto& [k, v] : object_field(j, "references", path).items()) {
            if (!v.is_string()) schema_error(path + ".references." + k, "expected a string");
            r.references[k] = v.get<std::string>();
        }
    }
    return r;
}

ReActTrace trace_from_json(const json& j, const std::string& path) {
    if (!j.is_array()) schema_error(path, "expected an array");
    ReActTrace t;
    for (std::size_t i = 0; i < j.size(); ++i) {
        std::string sp = path + "[" + std::to_string(i) + "]";
        std::string phase = str_field(j[i], "phase", sp);
        auto it = std::find(kPhaseNames.begin(), kPhaseNames.end(), phase);
        if (it == kPhaseNames.end()) schema_error(sp + ".phase", "unknown phase '" + phase + "'");
        ReActStep step{static_cast<Phase>(it - kPhaseNames.begin()), str_field(j[i], "text", sp), i};
        if (j[i].contains("timestamp")) {
            if (!j[i]["timestamp"].is_number_unsigned()) schema_error(sp + ".timestamp", "expected a tick count");
            step.timestamp = j[i]["timestamp"].get<std::uint64_t>();
        }
        t.steps.push_back(std::move(step));
    }
    return t;
}

PlanRequest request_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) schema_error(path, "expected an object");
    PlanRequest r;
    r.description = str_field(j, "description", path);
    r.formula = opt_str_field(j, "formula", path, "");
    r.space = opt_str_field(j, "space", path, "cga3d");
    r.language = opt_str_field(j, "language", path, "python");
    if (r.language != "python" && r.language != "json-ir") schema_error(path + ".language", "expected python or json-ir");
    return r;
}

Plan plan_from_json(const json& j) {
    Plan p;
    p.source = request_from_json(field(j, "source", "$"), "$.source");
    const json& subtasks = array_field(j, "subtasks", "$");
    for (std::size_t i = 0; i < subtasks.size(); ++i)
        p.subtasks.push_back(subtask_from_json(subtasks[i], "$.subtasks[" + std::to_string(i) + "]"));
    p.trace = trace_from_json(field(j, "trace", "$"), "$.trace");
    return p;
}

} // namespace gavis::agents
