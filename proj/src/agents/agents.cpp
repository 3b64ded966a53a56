#include <algorithm>
#include <cctype>

#include "gavis/agents/agents.hpp"
#include "gavis/script/script.hpp"
#include "util/number_format.hpp"

namespace gavis::agents {

namespace {

constexpr std::array<std::string_view, 6> kRoleNames = {"analysis_agent", "code_agent", "assignment_agent",
                                                        "visualization_agent", "validate_agent", "format_agent"};

std::string input_base(const std::string& result) {
    std::string s = result;
    s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
    return s;
}

std::string unique_input(PipelineContext& ctx, const std::string& wanted) {
    std::string name = wanted;
    for (int n = 2; ctx.inputs.count(name) || ctx.variables.count(name) || ctx.names.taken(name); ++n)
        name = wanted + "_" + std::to_string(n);
    ctx.inputs.insert(name);
    return name;
}

std::string expand(std::string text, const std::map<std::string, std::string>& subst) {
    std::string out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '{') {
            std::size_t close = text.find('}', i);
            if (close != std::string::npos) {
                auto it = subst.find(text.substr(i + 1, close - i - 1));
                if (it == subst.end())
                    throw Error("NoMatchingFunction", "template placeholder " + text.substr(i, close - i + 1) + " has no value");
                out += it->second;
                i = close + 1;
                continue;
            }
        }
        out += text[i++];
    }
    return out;
}

const FunctionSpec& lookup(const Registry& registry, const std::string& operation, SubtaskCategory category) {
    const FunctionSpec* fn = registry.find(operation);
    if (!fn) throw Error("NoMatchingFunction", "no registry function named '" + operation + "'");
    if (fn->category != category)
        throw Error("NoMatchingFunction", "'" + operation + "' belongs to " + std::string(to_string(fn->category)) +
                                              ", not " + std::string(to_string(category)));
    return *fn;
}

} // namespace

std::string_view to_string(AgentRole r) { return kRoleNames[static_cast<std::size_t>(r)]; }

ExtractedElements analysis_agent(const SubtaskRecord& subtask, PipelineContext& ctx) {
    const FunctionSpec& fn = lookup(*ctx.registry, subtask.operation, subtask.category);
    ExtractedElements el;
    el.task_id = subtask.task_id;
    el.category = subtask.category;
    el.operation = fn.name;
    el.colors = subtask.visualization;

    const auto& names = subtask.variable_names;
    std::size_t outputs = static_cast<std::size_t>(fn.outputs);
    if (names.empty() || names.size() % outputs != 0)
        throw Error("MissingValue", subtask.task_id + ": " + fn.name + " yields " + std::to_string(outputs) +
                                        " result(s) per call, got " + std::to_string(names.size()) + " names");
    std::size_t ncalls = names.size() / outputs;

    for (std::size_t k = 0; k < ncalls; ++k) {
        CallElements call;
        std::string prefix = ncalls == 1 ? "" : names[k * outputs] + ".";
        if (ncalls > 1 && names[k * outputs].empty())
            throw Error("MissingValue", subtask.task_id + ": anonymous results need a single call per subtask");

        std::string first_kind;
        for (const auto& p : fn.parameters) {
            std::string key = prefix + p.name;
            if (p.type == "scalar") continue;
            auto ref = subtask.references.find(key);
            if (ref == subtask.references.end()) continue;
            auto var = ctx.variables.find(ref->second);
            if (var == ctx.variables.end())
                throw Error("MissingValue", subtask.task_id + ": '" + ref->second + "' (" + key +
                                                ") is not defined by an earlier subtask");
            const std::string& kind = var->second.kind;
            if (p.type != "multivector" && kind != "multivector" && kind != p.type)
                throw Error("TypeMismatch", subtask.task_id + ": " + key + " expects a " + p.type + ", '" +
                                                ref->second + "' is a " + kind);
            if (first_kind.empty()) first_kind = kind;
        }
        std::string kind = fn.returns == "same" ? (first_kind.empty() ? "multivector" : first_kind) : fn.returns;
        el.result_kind = kind;

        for (std::size_t j = 0; j < outputs; ++j) {
            std::string n = names[k * outputs + j];
            if (n.empty()) n = ctx.names.allocate(kind);
            ctx.names.reserve(n);
            call.results.push_back(n);
        }
        std::string base = input_base(call.results[0]);
        for (const auto& p : fn.parameters) {
            std::string key = prefix + p.name;
            if (p.type == "scalar") {
                auto v = subtask.specific_values.find(key);
                if (v == subtask.specific_values.end())
                    throw Error("MissingValue", subtask.task_id + ": no value for '" + key + "'");
                std::string in = unique_input(ctx, base + "_" + p.name);
                el.values.push_back({in, v->second});
                call.args[p.name] = in;
                continue;
            }
            if (auto ref = subtask.references.find(key); ref != subtask.references.end()) {
                call.args[p.name] = ref->second;
                if (std::find(el.referenced.begin(), el.referenced.end(), ref->second) == el.referenced.end())
                    el.referenced.push_back(ref->second);
                continue;
            }
            if (p.type == "point" || p.type == "multivector") {
                std::vector<std::string> coords;
                for (const char* axis : {"x", "y", "z"}) {
                    auto v = subtask.specific_values.find(key + "." + axis);
                    if (v == subtask.specific_values.end()) break;
                    std::string in = unique_input(ctx, base + "_" + p.name + "_" + axis);
                    el.values.push_back({in, v->second});
                    coords.push_back(in);
                }
                if (coords.size() == 3) {
                    call.args[p.name] = "createPoint(" + coords[0] + ", " + coords[1] + ", " + coords[2] + ")";
                    continue;
                }
            }
            throw Error("MissingValue", subtask.task_id + ": no variable or value for '" + key + "'");
        }
        if (!fn.temporary.empty()) call.tmp = ctx.names.allocate(fn.temporary);
        el.calls.push_back(std::move(call));
    }
    return el;
}

std::string code_agent(const ExtractedElements& el, const Registry& registry) {
    const FunctionSpec& fn = lookup(registry, el.operation, el.category);
    std::string out;
    for (const auto& call : el.calls) {
        std::map<std::string, std::string> subst = call.args;
        if (call.results.size() == 1) {
            subst["out"] = call.results[0];
        } else {
            for (std::size_t j = 0; j < call.results.size(); ++j) subst["out" + std::to_string(j + 1)] = call.results[j];
        }
        if (!call.tmp.empty()) subst["tmp"] = call.tmp;
        out += expand(fn.script_template, subst);
        out += "\n";
    }
    return out;
}

std::string assignment_agent(const ExtractedElements& el, const std::string& fragment) {
    auto lexed = script::lex(fragment);
    const auto& t = lexed.tokens;
    std::set<std::string> assigned;
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (t[i].kind == script::TokenKind::Identifier && t[i + 1].lexeme == "=") assigned.insert(t[i].lexeme);
    std::vector<std::string> free;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i].kind != script::TokenKind::Identifier || !script::is_input_name(t[i].lexeme) ||
            script::is_basis_name(t[i].lexeme))
            continue;
        if (i + 1 < t.size() && t[i + 1].lexeme == "(") continue;
        const std::string& n = t[i].lexeme;
        if (assigned.count(n) || std::find(el.referenced.begin(), el.referenced.end(), n) != el.referenced.end()) continue;
        if (std::find(free.begin(), free.end(), n) == free.end()) free.push_back(n);
    }
    std::string out;
    for (const auto& n : free) {
        auto it = std::find_if(el.values.begin(), el.values.end(), [&](const auto& v) { return v.first == n; });
        if (it == el.values.end()) throw Error("MissingValue", el.task_id + ": input '" + n + "' has no value");
        out += n + " = " + util::short_number(it->second) + ";\n";
    }
    return out;
}

std::string visualization_agent(const ExtractedElements& el) {
    std::string out;
    for (const auto& v : el.colors) {
        if (v.color.kind == script::ColorSpec::Kind::Named && !script::is_color_keyword(v.color.name))
            throw Error("UnknownColor", el.task_id + ": unknown color '" + v.color.name + "' for " + v.variable);
        std::string color = script::color_text(v.color);
        out += ":" + v.variable + (color.empty() ? "" : " " + color) + ";\n";
    }
    return out;
}

AssembledScript assemble(const std::vector<std::pair<std::string, Sections>>& sections) {
    AssembledScript out;
    auto add = [&](AgentRole role, std::string Sections::*part) {
        for (const auto& [task, s] : sections) {
            const std::string& text = s.*part;
            if (text.empty()) continue;
            std::size_t begin = out.text.size();
            out.text += text;
            if (out.text.back() != '\n') out.text += '\n';
            out.ranges.push_back({role, task, begin, out.text.size()});
        }
    };
    add(AgentRole::Code, &Sections::optimization);
    add(AgentRole::Assignment, &Sections::assignments);
    add(AgentRole::Visualization, &Sections::draws);
    return out;
}

Verdict validate_agent(const AssembledScript& s) {
    Verdict v;
    auto parsed = script::parse_source(s.text);
    v.diagnostics = parsed.diagnostics;
    if (parsed.ok()) {
        auto more = script::validate(parsed.ast);
        v.diagnostics.insert(v.diagnostics.end(), more.begin(), more.end());
    }
    v.ok = !script::has_errors(v.diagnostics);
    for (const auto& d : v.diagnostics) {
        if (d.severity != script::Severity::Error) continue;
        AgentRole role = AgentRole::Code;
        std::string task;
        for (const auto& r : s.ranges) {
            if (d.span.valid() && d.span.offset >= r.begin && d.span.offset < r.end) {
                role = r.owner;
                task = r.task_id;
                break;
            }
        }
        if (std::find(v.blamed.begin(), v.blamed.end(), role) == v.blamed.end()) v.blamed.push_back(role);
        if (v.task_id.empty()) v.task_id = task;
    }
    return v;
}

Verdict validate_agent(const std::string& text) { return validate_agent(AssembledScript{text, {}}); }

FinalScript format_agent(const std::vector<Sections>& sections) {
    FinalScript f;
    for (const auto& s : sections) {
        f.optimization += s.optimization;
        f.assignments += s.assignments;
        f.draws += s.draws;
    }
    auto canonical = [](const std::string& text) {
        if (text.empty()) return text;
        auto parsed = script::parse_source(text);
        if (!parsed.ok()) throw Error("InvalidScript", "format_agent received an invalid section");
        return script::pretty_print(parsed.ast);
    };
    f.optimization = canonical(f.optimization);
    f.assignments = canonical(f.assignments);
    f.draws = canonical(f.draws);
    std::string text;
    if (!f.optimization.empty()) text += "// optimization code\n" + f.optimization;
    if (!f.assignments.empty()) text += "// parameter assignment\n" + f.assignments;
    if (!f.draws.empty()) text += "// visualization\n" + f.draws;
    f.text = canonical(text);
    return f;
}

} // namespace gavis::agents
