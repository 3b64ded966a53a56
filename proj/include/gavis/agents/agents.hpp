#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gavis/agents/planner.hpp"
#include "gavis/agents/records.hpp"
#include "gavis/agents/registry.hpp"
#include "gavis/script/ast.hpp"

namespace gavis::agents {

enum class AgentRole { Analysis, Code, Assignment, Visualization, Validate, Format };

std::string_view to_string(AgentRole r);  // "analysis_agent", ...

struct ContextVariable {
    std::string name;
    std::string kind;
    std::string task_id;
};

/// Script text one subtask contributes, split by the agent that wrote it.
struct Sections {
    std::string optimization;
    std::string assignments;
    std::string draws;
};

/// Shared state of one pipeline run. Variables of finished subtasks are
/// visible to later ones.
struct PipelineContext {
    std::string space = "cga3d";
    const Registry* registry = &builtin_registry();
    std::map<std::string, ContextVariable> variables;
    NameAllocator names;
    std::set<std::string> inputs;  // input names handed out so far
    std::vector<std::pair<std::string, Sections>> done;  // task id, sections
};

struct CallElements {
    std::vector<std::string> results;
    std::string tmp;                            // helper name, "" if unused
    std::map<std::string, std::string> args;    // parameter -> script text
};

struct ExtractedElements {
    std::string task_id;
    SubtaskCategory category = SubtaskCategory::GeometryObjectCreation;
    std::string operation;
    std::string result_kind;
    std::vector<CallElements> calls;
    /// Program inputs in first-use order with their values.
    std::vector<std::pair<std::string, double>> values;
    std::vector<std::string> referenced;
    std::vector<VisualSetting> colors;
};

/// Resolves the subtask against the registry and context: names anonymous
/// results, turns numbers into named inputs and checks referenced kinds.
/// Throws MissingValue, TypeMismatch or NoMatchingFunction.
ExtractedElements analysis_agent(const SubtaskRecord& subtask, PipelineContext& context);

/// Optimization-section fragment. Throws NoMatchingFunction.
std::string code_agent(const ExtractedElements& elements, const Registry& registry);

/// `name = value;` per free input of the fragment. Throws MissingValue.
std::string assignment_agent(const ExtractedElements& elements, const std::string& fragment);

/// `:name color;` per requested visualization. Throws UnknownColor.
std::string visualization_agent(const ExtractedElements& elements);

struct OwnedRange {
    AgentRole owner;
    std::string task_id;
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct AssembledScript {
    std::string text;
    std::vector<OwnedRange> ranges;
};

/// Sections in three-section order with ownership ranges; with chaining the
/// sections of earlier subtasks come first.
AssembledScript assemble(const std::vector<std::pair<std::string, Sections>>& sections);

struct Verdict {
    bool ok = true;
    std::vector<script::Diagnostic> diagnostics;
    /// Agents owning the failing spans (code_agent when no span matches).
    std::vector<AgentRole> blamed;
    /// Task id of the first blamed range ("" when unknown).
    std::string task_id;
};

Verdict validate_agent(const AssembledScript& script);
Verdict validate_agent(const std::string& script);

struct FinalScript {
    std::string optimization;
    std::string assignments;
    std::string draws;
    std::string text;
};

/// Canonical three-section script. Empty sections are left out.
FinalScript format_agent(const std::vector<Sections>& sections);

} // namespace gavis::agents
