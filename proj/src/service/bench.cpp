#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gavis/agents/planner.hpp"
#include "gavis/algebra/signature.hpp"
#include "gavis/service/bench.hpp"
#include "util/json_read.hpp"

namespace gavis::service {

using nlohmann::json;

namespace {

const char* kind_name(Assertion::Kind k) {
    switch (k) {
    case Assertion::Kind::Executes: return "executes";
    case Assertion::Kind::ObjectExists: return "object_exists";
    case Assertion::Kind::PointNear: return "point_near";
    case Assertion::Kind::OnAllSpheres: return "on_all_spheres";
    }
    return "?";
}

Assertion assertion_from_json(const json& j, const std::string& path) {
    if (!j.is_object()) util::schema_error(path, "expected an object");
    Assertion a;
    std::string kind = util::str_field(j, "kind", path);
    if (kind == "executes") {
        a.kind = Assertion::Kind::Executes;
    } else if (kind == "object_exists") {
        a.kind = Assertion::Kind::ObjectExists;
        a.object = util::str_field(j, "object", path);
        double n = util::num_field(j, "count", path);
        if (n < 0 || n != std::floor(n)) util::schema_error(path + ".count", "expected a non-negative integer");
        a.count = static_cast<int>(n);
    } else if (kind == "point_near") {
        a.kind = Assertion::Kind::PointNear;
        a.x = util::num_field(j, "x", path);
        a.y = util::num_field(j, "y", path);
        a.z = util::num_field(j, "z", path);
        a.tol = util::num_field(j, "tol", path);
    } else if (kind == "on_all_spheres") {
        a.kind = Assertion::Kind::OnAllSpheres;
        a.tol = util::num_field(j, "tol", path);
    } else {
        util::schema_error(path + ".kind", "unknown assertion kind '" + kind + "'");
    }
    if (a.tol < 0) util::schema_error(path + ".tol", "must be non-negative");
    return a;
}

struct Pt {
    double x, y, z;
};

Pt point_params(const json& p) { return {p.at("x").get<double>(), p.at("y").get<double>(), p.at("z").get<double>()}; }

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

} // namespace

BenchmarkCase case_from_json(const json& j) {
    if (!j.is_object()) util::schema_error("$", "expected an object");
    BenchmarkCase c;
    c.id = util::str_field(j, "id", "$");
    c.origin = util::opt_str_field(j, "origin", "$", "extension");
    if (c.origin != "paper" && c.origin != "extension") util::schema_error("$.origin", "expected paper or extension");
    c.category = util::opt_str_field(j, "category", "$", "");
    c.request.description = util::str_field(j, "task_description", "$");
    c.request.formula = util::opt_str_field(j, "ga_formula", "$", "");
    c.request.space = util::opt_str_field(j, "space", "$", "cga3d");
    c.request.language = util::opt_str_field(j, "language", "$", "python");
    const json& expected = util::array_field(j, "expected", "$");
    for (std::size_t i = 0; i < expected.size(); ++i)
        c.expected.push_back(assertion_from_json(expected[i], "$.expected[" + std::to_string(i) + "]"));
    return c;
}

std::vector<BenchmarkCase> parse_dataset(const std::string& text) {
    std::vector<BenchmarkCase> cases;
    std::set<std::string> ids;
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        BenchmarkCase c;
        try {
            c = case_from_json(json::parse(line));
            space_by_name(c.request.space);
        } catch (const json::parse_error& e) {
            throw DatasetError(n, std::string("not valid JSON: ") + e.what());
        } catch (const Error& e) {
            throw DatasetError(n, e.what());
        }
        bool executes = false;
        for (const auto& a : c.expected) executes |= a.kind == Assertion::Kind::Executes;
        if (!executes) throw DatasetError(n, "case '" + c.id + "' has no executes assertion");
        if (!ids.insert(c.id).second) throw DatasetError(n, "duplicate case id '" + c.id + "'");
        cases.push_back(std::move(c));
    }
    if (cases.empty()) throw DatasetError(n, "dataset has no cases");
    return cases;
}

std::vector<BenchmarkCase> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("DatasetError", "cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_dataset(text.str());
}

std::vector<AssertionOutcome> check_assertions(const std::vector<Assertion>& expected,
                                               const agents::PipelineResult* result) {
    std::vector<Pt> points;
    std::vector<std::pair<Pt, double>> spheres;
    std::map<std::string, int> counts;
    if (result) {
        for (const auto& o : result->scene.objects) {
            ++counts[o.kind];
            if (o.kind == "point") points.push_back(point_params(o.params));
            if (o.kind == "sphere")
                spheres.push_back({{o.params.at("cx").get<double>(), o.params.at("cy").get<double>(),
                                    o.params.at("cz").get<double>()},
                                   o.params.at("r").get<double>()});
        }
    }
    std::vector<AssertionOutcome> out;
    for (const auto& a : expected) {
        AssertionOutcome r{a, false, ""};
        if (!result) {
            r.detail = "pipeline did not complete";
            out.push_back(r);
            continue;
        }
        switch (a.kind) {
        case Assertion::Kind::Executes:
            r.ok = true;
            break;
        case Assertion::Kind::ObjectExists: {
            int have = counts.count(a.object) ? counts.at(a.object) : 0;
            r.ok = have == a.count;
            if (!r.ok) r.detail = "expected " + std::to_string(a.count) + " " + a.object + ", found " + std::to_string(have);
            break;
        }
        case Assertion::Kind::PointNear: {
            double best = INFINITY;
            for (const auto& p : points) best = std::min(best, std::hypot(p.x - a.x, p.y - a.y, p.z - a.z));
            r.ok = best <= a.tol;
            if (!r.ok) r.detail = points.empty() ? "no points in scene" : "nearest point at distance " + fmt(best);
            break;
        }
        case Assertion::Kind::OnAllSpheres: {
            double worst = 0;
            for (const auto& p : points)
                for (const auto& [c, rad] : spheres)
                    worst = std::max(worst, std::abs(std::hypot(p.x - c.x, p.y - c.y, p.z - c.z) - rad));
            r.ok = !points.empty() && !spheres.empty() && worst <= a.tol;
            if (!r.ok)
                r.detail = points.empty() || spheres.empty() ? "scene lacks points or spheres"
                                                             : "largest sphere residual " + fmt(worst);
            break;
        }
        }
        out.push_back(r);
    }
    return out;
}

BenchmarkReport run_bench(const std::vector<BenchmarkCase>& cases, const BenchOptions& options) {
    if (cases.empty()) throw DatasetError(0, "dataset has no cases");
    const agents::Registry& registry = options.pipeline.registry ? *options.pipeline.registry : agents::builtin_registry();
    BenchmarkReport report;
    for (const auto& c : cases) {
        CaseOutcome o{c.id, c.origin, c.category, false, {}, nullptr};
        std::optional<agents::PipelineResult> result;
        try {
            agents::Plan p = options.backend ? agents::external_plan(c.request, *options.backend)
                                             : agents::plan(c.request, registry);
            result = agents::execute_plan(p, options.pipeline);
        } catch (const agents::PipelineFailed& f) {
            o.error = agents::to_json(f);
        } catch (const Error& e) {
            o.error = {{"error", e.code()}, {"message", e.what()}};
        }
        o.assertions = check_assertions(c.expected, result ? &*result : nullptr);
        o.success = result.has_value();
        for (const auto& a : o.assertions) o.success = o.success && a.ok;
        report.successes += o.success;
        report.outcomes.push_back(std::move(o));
    }
    report.total = static_cast<int>(cases.size());
    report.success_rate = 100.0 * report.successes / report.total;
    return report;
}

json to_json(const Assertion& a) {
    json j = {{"kind", kind_name(a.kind)}};
    switch (a.kind) {
    case Assertion::Kind::Executes: break;
    case Assertion::Kind::ObjectExists:
        j["object"] = a.object;
        j["count"] = a.count;
        break;
    case Assertion::Kind::PointNear:
        j["x"] = a.x;
        j["y"] = a.y;
        j["z"] = a.z;
        j["tol"] = a.tol;
        break;
    case Assertion::Kind::OnAllSpheres: j["tol"] = a.tol; break;
    }
    return j;
}

json to_json(const BenchmarkReport& r) {
    json outcomes = json::array();
    for (const auto& o : r.outcomes) {
        json as = json::array();
        for (const auto& a : o.assertions) {
            json aj = to_json(a.assertion);
            aj["ok"] = a.ok;
            if (!a.detail.empty()) aj["detail"] = a.detail;
            as.push_back(aj);
        }
        outcomes.push_back({{"id", o.id},
                            {"origin", o.origin},
                            {"category", o.category},
                            {"success", o.success},
                            {"assertions", as},
                            {"error", o.error}});
    }
    return {{"version", 1},
            {"total", r.total},
            {"successes", r.successes},
            {"success_rate", r.success_rate},
            {"outcomes", outcomes}};
}

} // namespace gavis::service
