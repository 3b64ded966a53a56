#pragma once

#include <array>
#include <set>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gavis/error.hpp"
#include "gavis/script/ast.hpp"

namespace gavis::agents {

enum class SubtaskCategory {
    GeometryObjectCreation,
    FundamentalAlgebraicOperations,
    GeometricElementOperations,
    GeometricTransformation,
    NumericalOperations,
};

const std::array<SubtaskCategory, 5>& all_categories();
std::string_view to_string(SubtaskCategory c);
/// Throws Error("SchemaViolation") for an unknown name.
SubtaskCategory category_by_name(std::string_view name);

struct VisualSetting {
    std::string variable;
    script::ColorSpec color;  // Kind::None draws with the default color
};

struct SubtaskRecord {
    std::string task_id;
    std::string task_name;
    std::string task_description;
    /// Result variables in call order; "" asks the analysis agent for a name.
    std::vector<std::string> variable_names;
    std::string code_language = "python";
    std::string ga_type = "cga3d";
    /// "<var>.<param>" (or "<param>" for a single call); point literals use
    /// "<var>.<param>.x" and so on.
    std::map<std::string, double> specific_values;
    std::vector<VisualSetting> visualization;
    SubtaskCategory category = SubtaskCategory::GeometryObjectCreation;
    std::vector<std::string> depends_on;
    /// Registry function the subtask calls.
    std::string operation;
    /// "<var>.<param>" -> variable produced by an earlier subtask.
    std::map<std::string, std::string> references;
};

enum class Phase { Observation, Thoughts, Action };
std::string_view to_string(Phase p);

struct ReActStep {
    Phase phase = Phase::Observation;
    std::string text;
    std::uint64_t timestamp = 0;  // logical tick
};

struct ReActTrace {
    std::vector<ReActStep> steps;
    void add(Phase p, std::string text) { steps.push_back({p, std::move(text), steps.size()}); }
};

struct PlanRequest {
    std::string description;
    std::string formula;
    std::string space = "cga3d";
    std::string language = "python";
};

struct Plan {
    PlanRequest source;
    std::vector<SubtaskRecord> subtasks;
    ReActTrace trace;
};

/// Structural checks shared by the planner and the external backend path:
/// non-empty, unique ids, earlier-only dependencies, references produced by
/// a listed dependency, drawn variables among the subtask's names, trace
/// phases cycling Observation, Thoughts, Action. Throws SchemaViolation.
void check_plan(const Plan& plan);

nlohmann::json to_json(const script::ColorSpec& c);
nlohmann::json to_json(const SubtaskRecord& r);
nlohmann::json to_json(const ReActTrace& t);
nlohmann::json to_json(const PlanRequest& r);
nlohmann::json to_json(const Plan& p);

// Readers throw Error("SchemaViolation") naming the offending path.
script::ColorSpec color_from_json(const nlohmann::json& j, const std::string& path);
SubtaskRecord subtask_from_json(const nlohmann::json& j, const std::string& path);
ReActTrace trace_from_json(const nlohmann::json& j, const std::string& path);
PlanRequest request_from_json(const nlohmann::json& j, const std::string& path = "$");
Plan plan_from_json(const nlohmann::json& j);

} // namespace gavis::agents
