#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "gavis/agents/registry.hpp"
#include "util/json_read.hpp"

namespace gavis::agents {

std::string_view builtin_registry_json();

using nlohmann::json;
using namespace util;

const ParameterSpec* FunctionSpec::parameter(std::string_view n) const {
    for (const auto& p : parameters)
        if (p.name == n) return &p;
    return nullptr;
}

Registry::Registry(std::vector<FunctionSpec> functions) : functions_(std::move(functions)) {}

const FunctionSpec* Registry::find(std::string_view name) const {
    for (const auto& f : functions_)
        if (f.name == name) return &f;
    return nullptr;
}

std::vector<const FunctionSpec*> Registry::in_category(SubtaskCategory c) const {
    std::vector<const FunctionSpec*> out;
    for (const auto& f : functions_)
        if (f.category == c) out.push_back(&f);
    return out;
}

std::vector<std::string> placeholders(std::string_view t) {
    std::vector<std::string> out;
    for (std::size_t i = t.find('{'); i != std::string_view::npos; i = t.find('{', i + 1)) {
        std::size_t close = t.find('}', i);
        if (close == std::string_view::npos) break;
        std::string name(t.substr(i + 1, close - i - 1));
        if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
    }
    return out;
}

namespace {

void check_template(const FunctionSpec& f, const std::string& path) {
    std::set<std::string> allowed;
    for (const auto& p : f.parameters) allowed.insert(p.name);
    if (f.outputs == 1) {
        allowed.insert("out");
    } else {
        for (int i = 1; i <= f.outputs; ++i) allowed.insert("out" + std::to_string(i));
    }
    if (!f.temporary.empty()) allowed.insert("tmp");
    auto used = placeholders(f.script_template);
    for (const auto& u : used)
        if (!allowed.count(u)) schema_error(path + ".script_template", "unknown placeholder {" + u + "}");
    for (const auto& a : allowed)
        if (std::find(used.begin(), used.end(), a) == used.end())
            schema_error(path + ".script_template", "placeholder {" + a + "} is never used");
}

} // namespace

Registry load_registry(const json& doc) {
    if (!doc.is_object()) schema_error("$", "expected an object");
    if (field(doc, "version", "$") != 1) schema_error("$.version", "unsupported version");
    const json& arr = array_field(doc, "functions", "$");
    std::vector<FunctionSpec> fns;
    std::set<std::string> names;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        std::string path = "$.functions[" + std::to_string(i) + "]";
        const json& j = arr[i];
        FunctionSpec f;
        f.name = str_field(j, "name", path);
        if (!names.insert(f.name).second) schema_error(path + ".name", "duplicate function " + f.name);
        try {
            f.category = category_by_name(str_field(j, "category", path));
        } catch (const Error& e) {
            schema_error(path + ".category", e.what());
        }
        f.description = str_field(j, "description", path);
        const json& params = array_field(j, "parameters", path);
        for (std::size_t k = 0; k < params.size(); ++k) {
            std::string pp = path + ".parameters[" + std::to_string(k) + "]";
            f.parameters.push_back({str_field(params[k], "name", pp), str_field(params[k], "type", pp),
                                    str_field(params[k], "description", pp)});
        }
        f.returns = str_field(j, "returns", path);
        if (j.contains("outputs")) {
            if (!j["outputs"].is_number_integer() || j["outputs"].get<int>() < 1)
                schema_error(path + ".outputs", "expected a positive integer");
            f.outputs = j["outputs"].get<int>();
        }
        f.temporary = opt_str_field(j, "temporary", path, "");
        f.script_template = str_field(j, "script_template", path);
        check_template(f, path);
        fns.push_back(std::move(f));
    }
    return Registry(std::move(fns));
}

Registry load_registry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IoError", "cannot read registry " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        schema_error("$", e.what());
    }
    return load_registry(doc);
}

const Registry& builtin_registry() {
    static const Registry r = load_registry(json::parse(builtin_registry_json()));
    return r;
}

json to_json(const FunctionSpec& f) {
    json params = json::array();
    for (const auto& p : f.parameters) params.push_back({{"name", p.name}, {"type", p.type}, {"description", p.description}});
    json j = {{"name", f.name},
              {"category", std::string(to_string(f.category))},
              {"description", f.description},
              {"parameters", params},
              {"returns", f.returns},
              {"outputs", f.outputs},
              {"script_template", f.script_template}};
    if (!f.temporary.empty()) j["temporary"] = f.temporary;
    return j;
}

json to_json(const Registry& r) {
    json fns = json::array();
    for (const auto& f : r.functions()) fns.push_back(to_json(f));
    return {{"version", 1}, {"functions", fns}};
}

} // namespace gavis::agents
