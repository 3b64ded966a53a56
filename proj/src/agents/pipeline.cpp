#include <algorithm>
#include <set>

#include "gavis/agents/pipeline.hpp"
#include "gavis/algebra/blade.hpp"
#include "gavis/script/script.hpp"

namespace gavis::agents {

using nlohmann::json;

PipelineFailed::PipelineFailed(std::string subtask_id, std::vector<script::Diagnostic> diagnostics, int retries_used,
                               std::vector<AgentRole> blamed)
    : Error("PipelineFailed",
            (subtask_id.empty() ? std::string("pipeline") : "subtask " + subtask_id) + " failed" +
                (diagnostics.empty() ? std::string() : ": " + script::format(diagnostics.front()))),
      subtask_id_(std::move(subtask_id)),
      diagnostics_(std::move(diagnostics)),
      retries_used_(retries_used),
      blamed_(std::move(blamed)) {}

namespace {

script::Diagnostic diagnostic_of(const Error& e) {
    script::Diagnostic d;
    d.code = e.code();
    d.message = e.what();
    if (auto* se = dynamic_cast<const codegen::ScriptError*>(&e)) d.span = se->span();
    return d;
}

// Downstream agents that must rerun when an agent regenerates.
std::set<AgentRole> with_downstream(const std::vector<AgentRole>& blamed) {
    std::set<AgentRole> out;
    for (AgentRole r : blamed) {
        out.insert(r);
        if (r == AgentRole::Analysis) {
            out.insert({AgentRole::Code, AgentRole::Assignment, AgentRole::Visualization});
        } else if (r == AgentRole::Code) {
            out.insert(AgentRole::Assignment);
        }
    }
    return out;
}

[[noreturn]] void fail_final(const Error& e) { throw PipelineFailed("", {diagnostic_of(e)}, 0, {}); }

} // namespace

PipelineResult execute_plan(const Plan& plan, const PipelineConfig& config) {
    check_plan(plan);
    const Registry& registry = config.registry ? *config.registry : builtin_registry();
    PipelineResult result;
    result.plan = plan;

    PipelineContext ctx;
    ctx.space = plan.source.space;
    ctx.registry = &registry;
    for (const auto& s : plan.subtasks)
        for (const auto& n : s.variable_names)
            if (!n.empty()) ctx.names.reserve(n);

    auto tamper = [&](AgentRole role, const std::string& task, std::string out, int attempt) {
        return config.tamper ? config.tamper(role, task, out, attempt) : out;
    };

    for (const auto& subtask : plan.subtasks) {
        SubtaskOutcome outcome;
        outcome.task_id = subtask.task_id;
        const NameAllocator names_before = ctx.names;
        const std::set<std::string> inputs_before = ctx.inputs;

        ExtractedElements elements;
        Sections sections;
        std::set<AgentRole> pending = {AgentRole::Analysis, AgentRole::Code, AgentRole::Assignment,
                                       AgentRole::Visualization};
        std::vector<AgentRole> blamed;
        std::vector<script::Diagnostic> last;
        bool accepted = false;

        for (int attempt = 0; attempt <= config.max_retries && !accepted; ++attempt) {
            last.clear();
            blamed.clear();
            auto run = [&](AgentRole role, auto&& body) {
                if (!pending.count(role) || !blamed.empty()) return;
                ++outcome.invocations[role];
                try {
                    body();
                    pending.erase(role);
                } catch (const Error& e) {
                    last.push_back(diagnostic_of(e));
                    blamed.push_back(role);
                }
            };
            run(AgentRole::Analysis, [&] {
                ctx.names = names_before;
                ctx.inputs = inputs_before;
                elements = analysis_agent(subtask, ctx);
            });
            run(AgentRole::Code, [&] {
                sections.optimization = tamper(AgentRole::Code, subtask.task_id, code_agent(elements, registry), attempt);
            });
            run(AgentRole::Assignment, [&] {
                sections.assignments = tamper(AgentRole::Assignment, subtask.task_id,
                                              assignment_agent(elements, sections.optimization), attempt);
            });
            run(AgentRole::Visualization, [&] {
                sections.draws =
                    tamper(AgentRole::Visualization, subtask.task_id, visualization_agent(elements), attempt);
            });
            if (blamed.empty()) {
                auto parts = config.context_chaining ? ctx.done : decltype(ctx.done){};
                parts.push_back({subtask.task_id, sections});
                ++outcome.invocations[AgentRole::Validate];
                Verdict v = validate_agent(assemble(parts));
                if (v.ok) {
                    accepted = true;
                    break;
                }
                for (const auto& d : v.diagnostics)
                    if (d.severity == script::Severity::Error) last.push_back(d);
                blamed = v.blamed;
            }
            outcome.diagnostics.insert(outcome.diagnostics.end(), last.begin(), last.end());
            auto rerun = with_downstream(blamed);
            pending.insert(rerun.begin(), rerun.end());
            if (attempt < config.max_retries) ++outcome.retries;
        }
        if (!accepted) throw PipelineFailed(subtask.task_id, last, outcome.retries, blamed);

        for (const auto& call : elements.calls)
            for (const auto& n : call.results) ctx.variables[n] = {n, elements.result_kind, subtask.task_id};
        ctx.done.push_back({subtask.task_id, sections});
        outcome.sections = sections;
        result.subtasks.push_back(std::move(outcome));
    }

    std::vector<Sections> all;
    for (const auto& [task, s] : ctx.done) all.push_back(s);
    ++result.subtasks.back().invocations[AgentRole::Format];
    result.script = format_agent(all);
    Verdict final_check = validate_agent(result.script.text);
    if (!final_check.ok) throw PipelineFailed("", final_check.diagnostics, 0, final_check.blamed);

    try {
        auto parsed = script::parse_source(result.script.text);
        result.program = codegen::compile(parsed.ast, space_by_name(plan.source.space));
        result.assignment = codegen::bind(result.program, codegen::default_bindings(result.program));
        result.values = codegen::run(result.program, result.assignment);
        result.scene = codegen::scene_of(result.program, result.values);
        result.code = codegen::emit_code(result.program, result.assignment, codegen::target_by_name(plan.source.language));
    } catch (const Error& e) {
        fail_final(e);
    }
    result.warnings = result.program.warnings;
    result.warnings.insert(result.warnings.end(), result.assignment.warnings.begin(), result.assignment.warnings.end());
    result.warnings.insert(result.warnings.end(), result.scene.warnings.begin(), result.scene.warnings.end());
    return result;
}

json to_json(const script::Diagnostic& d) {
    json j = {{"severity", d.severity == script::Severity::Error ? "error" : "warning"},
              {"code", d.code},
              {"message", d.message}};
    if (d.span.valid())
        j["span"] = {{"line", d.span.line}, {"column", d.span.column}, {"offset", d.span.offset}, {"length", d.span.length}};
    return j;
}

namespace {

json diagnostics_json(const std::vector<script::Diagnostic>& ds) {
    json out = json::array();
    for (const auto& d : ds) out.push_back(to_json(d));
    return out;
}

} // namespace

json to_json(const PipelineResult& r) {
    json subtasks = json::array();
    for (const auto& s : r.subtasks) {
        json inv = json::object();
        for (const auto& [role, n] : s.invocations) inv[std::string(to_string(role))] = n;
        subtasks.push_back({{"task_id", s.task_id},
                            {"sections",
                             {{"optimization", s.sections.optimization},
                              {"assignments", s.sections.assignments},
                              {"draws", s.sections.draws}}},
                            {"invocations", inv},
                            {"retries", s.retries},
                            {"diagnostics", diagnostics_json(s.diagnostics)}});
    }
    json values = json::object();
    for (const auto& [name, mv] : r.values) {
        json blades = json::object();
        for (const auto& [b, c] : mv.terms()) blades[blade_name(b)] = c;
        values[name] = blades;
    }
    return {{"plan", to_json(r.plan)},
            {"script", r.script.text},
            {"code", r.code},
            {"scene", codegen::to_json(r.scene)},
            {"values", values},
            {"subtasks", subtasks},
            {"warnings", diagnostics_json(r.warnings)}};
}

json to_json(const PipelineFailed& f) {
    json blamed = json::array();
    for (AgentRole r : f.blamed()) blamed.push_back(std::string(to_string(r)));
    return {{"error", f.code()},
            {"message", f.what()},
            {"subtask_id", f.subtask_id()},
            {"retries_used", f.retries_used()},
            {"blamed", blamed},
            {"diagnostics", diagnostics_json(f.diagnostics())}};
}

} // namespace gavis::agents
