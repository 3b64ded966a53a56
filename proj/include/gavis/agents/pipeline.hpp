#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gavis/agents/agents.hpp"
#include "gavis/codegen/program.hpp"
#include "gavis/codegen/scene.hpp"

namespace gavis::agents {

inline constexpr int kMaxRetries = 2;

/// Rewrites an agent's output before validation; fault injection for tests.
using TamperHook =
    std::function<std::string(AgentRole role, const std::string& task_id, const std::string& output, int attempt)>;

struct PipelineConfig {
    int max_retries = kMaxRetries;
    /// Validate each subtask together with the sections of earlier ones.
    bool context_chaining = true;
    const Registry* registry = nullptr;  // builtin when null
    TamperHook tamper;
};

struct SubtaskOutcome {
    std::string task_id;
    Sections sections;
    std::map<AgentRole, int> invocations;
    int retries = 0;
    std::vector<script::Diagnostic> diagnostics;  // from rejected attempts
};

struct PipelineResult {
    Plan plan;
    FinalScript script;
    codegen::BladeProgram program;
    codegen::AssignmentSection assignment;
    std::string code;
    codegen::Scene scene;
    std::map<std::string, Mv> values;
    std::vector<SubtaskOutcome> subtasks;
    std::vector<script::Diagnostic> warnings;
};

class PipelineFailed : public Error {
public:
    PipelineFailed(std::string subtask_id, std::vector<script::Diagnostic> diagnostics, int retries_used,
                   std::vector<AgentRole> blamed);

    const std::string& subtask_id() const noexcept { return subtask_id_; }
    const std::vector<script::Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
    int retries_used() const noexcept { return retries_used_; }
    const std::vector<AgentRole>& blamed() const noexcept { return blamed_; }

private:
    std::string subtask_id_;
    std::vector<script::Diagnostic> diagnostics_;
    int retries_used_;
    std::vector<AgentRole> blamed_;
};

/// Runs the subtasks in order through the agents, regenerating blamed
/// agents at most `max_retries` times per subtask, then compiles, binds the
/// script's own values, runs and builds the scene. Throws PipelineFailed.
PipelineResult execute_plan(const Plan& plan, const PipelineConfig& config = {});

nlohmann::json to_json(const script::Diagnostic& d);
nlohmann::json to_json(const PipelineResult& r);
nlohmann::json to_json(const PipelineFailed& f);

} // namespace gavis::agents
