#include <doctest.h>

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "gavis/agents/agents.hpp"
#include "gavis/agents/backend.hpp"
#include "gavis/agents/pipeline.hpp"
#include "gavis/agents/planner.hpp"
#include "gavis/codegen/program.hpp"
#include "gavis/script/script.hpp"
#include "support/corpus.hpp"
#include "support/sphere_oracle.hpp"

using namespace gavis;
using namespace gavis::agents;

namespace {

const std::string kThreeSpheres =
    "Visualization formula $S = C - \\frac{1}{2} r^2 e_\\infty$: In conformal space, create three spheres S1, S2, S3 "
    "with centers at X1 (0, 0, 0), X2 (0, 0.4, 0), and X3 (0, 0.45, 0.2) with radii of 0.5, 0.4, and 0.3, "
    "respectively, S1, S2, S3 are visualized in blue, red, and green, respectively. Finally, calculate the "
    "intersection points x4 and x5 of the three balls and visualize them in yellow. I need Python code.";

std::string error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

Plan plan_of(const std::string& text, const std::string& formula = "") {
    PlanRequest r;
    r.description = text;
    r.formula = formula;
    return plan(r);
}

std::string color_of(const SubtaskRecord& r, const std::string& var) {
    for (const auto& v : r.visualization)
        if (v.variable == var) return script::color_text(v.color);
    return "";
}

SubtaskRecord record(std::string id, std::string op, SubtaskCategory cat, std::vector<std::string> names) {
    SubtaskRecord r;
    r.task_id = std::move(id);
    r.operation = std::move(op);
    r.category = cat;
    r.variable_names = std::move(names);
    return r;
}

// Sphere equations checked directly: |p - c|^2 = r^2.
double sphere_residual(const nlohmann::json& point, const nlohmann::json& sphere) {
    double dx = point["x"].get<double>() - sphere["cx"].get<double>();
    double dy = point["y"].get<double>() - sphere["cy"].get<double>();
    double dz = point["z"].get<double>() - sphere["cz"].get<double>();
    return std::abs(std::sqrt(dx * dx + dy * dy + dz * dz) - sphere["r"].get<double>());
}

struct MockBackend {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit MockBackend(std::function<void(const httplib::Request&, httplib::Response&)> handler) {
        server.Post("/plan", handler);
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~MockBackend() {
        server.stop();
        thread.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port) + "/plan"; }
};

nlohmann::json backend_body(const Plan& p) {
    nlohmann::json j = to_json(p);
    return {{"source", j["source"]}, {"subtasks", j["subtasks"]}, {"trace", j["trace"]}};
}

} // namespace

TEST_CASE("registry covers every category and every template compiles and runs") {
    const Registry& reg = builtin_registry();
    for (auto c : all_categories()) CHECK(reg.in_category(c).size() >= 6);
    CHECK(reg.functions().size() >= 30);

    // Prerequisite objects per parameter kind; slot i of a kind gets the i-th entry.
    const std::map<std::string, std::vector<std::string>> defs = {
        {"point", {"createPoint(0.3, -0.2, 0.5)", "createPoint(1, 0.5, -0.25)", "createPoint(-0.4, 0.1, 0.9)",
                   "createPoint(0.2, 0.8, 0.1)"}},
        {"sphere",
         {"createPoint(0, 0, 0) - 0.125 * einf", "createPoint(0, 0.4, 0) - 0.08 * einf",
          "createPoint(0, 0.45, 0.2) - 0.045 * einf"}},
        {"plane", {"createPlane(0, 0, 1, 0.1)"}},
        {"point_pair", {"(createPoint(0, 0, 0) - 0.125 * einf) ^ (createPoint(0, 0.4, 0) - 0.08 * einf) ^ "
                        "(createPoint(0, 0.45, 0.2) - 0.045 * einf)"}},
        {"multivector", {"createPoint(0, 0, 0) - 0.125 * einf", "createPoint(0, 0.4, 0) - 0.08 * einf",
                         "createPoint(0, 0.45, 0.2) - 0.045 * einf"}},
    };
    for (const auto& fn : reg.functions()) {
        CAPTURE(fn.name);
        PipelineContext ctx;
        SubtaskRecord r = record("t1", fn.name, fn.category, {});
        for (int k = 0; k < fn.outputs; ++k) r.variable_names.push_back("R" + std::to_string(k + 1));
        std::string prelude;
        std::map<std::string, int> used;
        int slot = 0;
        for (const auto& p : fn.parameters) {
            if (p.type == "scalar") {
                r.specific_values[p.name] = 0.7;
                continue;
            }
            std::string var = "A" + std::to_string(slot++);
            std::string expr = defs.at(p.type).at(static_cast<std::size_t>(used[p.type]++));
            if (fn.name == "squareRoot" || fn.name == "absolute") expr = "2.25";
            prelude += var + " = " + expr + ";\n";
            ctx.variables[var] = {var, p.type, "t0"};
            r.references[p.name] = var;
        }
        auto el = analysis_agent(r, ctx);
        std::string frag = code_agent(el, reg);
        std::string assign = assignment_agent(el, frag);
        std::string text = prelude + frag + assign;
        Verdict v = validate_agent(text);
        INFO(text);
        REQUIRE(v.ok);
        auto parsed = script::parse_source(text);
        auto program = codegen::compile(parsed.ast, cga3d());
        auto values = codegen::run(program, codegen::bind(program, codegen::default_bindings(program)));
        for (const auto& n : r.variable_names) CHECK(values.count(n) == 1);
    }
}

TEST_CASE("registry loader rejects stray placeholders and duplicates") {
    nlohmann::json doc = to_json(builtin_registry());
    auto bad = doc;
    bad["functions"][0]["script_template"] = "?{out} = createPoint({x}, {y}, {w});";
    CHECK(error_code([&] { load_registry(bad); }) == "SchemaViolation");
    bad = doc;
    bad["functions"][1]["name"] = bad["functions"][0]["name"];
    CHECK(error_code([&] { load_registry(bad); }) == "SchemaViolation");
    bad = doc;
    bad["functions"][0]["category"] = "Cooking";
    CHECK(error_code([&] { load_registry(bad); }) == "SchemaViolation");
    CHECK(load_registry(doc).functions().size() == builtin_registry().functions().size());
}

TEST_CASE("three-sphere request decomposes into three ordered subtasks") {
    Plan p = plan_of(kThreeSpheres);
    REQUIRE(p.subtasks.size() == 3);
    const auto& pts = p.subtasks[0];
    const auto& sph = p.subtasks[1];
    const auto& cut = p.subtasks[2];
    CHECK(pts.operation == "createPoint");
    CHECK(pts.variable_names == std::vector<std::string>{"X1", "X2", "X3"});
    CHECK(pts.specific_values.at("X2.y") == 0.4);
    CHECK(pts.specific_values.at("X3.z") == 0.2);
    CHECK(sph.operation == "createSphere");
    CHECK(sph.variable_names == std::vector<std::string>{"S1", "S2", "S3"});
    CHECK(sph.specific_values.at("S1.r") == 0.5);
    CHECK(sph.specific_values.at("S2.r") == 0.4);
    CHECK(sph.specific_values.at("S3.r") == 0.3);
    CHECK(sph.references.at("S3.center") == "X3");
    CHECK(sph.depends_on == std::vector<std::string>{"t1"});
    CHECK(color_of(sph, "S1") == "blue");
    CHECK(color_of(sph, "S2") == "red");
    CHECK(color_of(sph, "S3") == "green");
    CHECK(cut.operation == "intersectThreeSpheres");
    CHECK(cut.category == SubtaskCategory::GeometricElementOperations);
    CHECK(cut.variable_names == std::vector<std::string>{"x4", "x5"});
    CHECK(color_of(cut, "x4") == "yellow");
    CHECK(color_of(cut, "x5") == "yellow");
    CHECK(p.source.formula == "S = C - \\frac{1}{2} r^2 e_\\infty");
    CHECK(p.source.space == "cga3d");
    CHECK(p.source.language == "python");

    REQUIRE(p.trace.steps.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(static_cast<std::size_t>(p.trace.steps[i].phase) == i % 3);
        CHECK(p.trace.steps[i].timestamp == i);
    }
}

TEST_CASE("dataset table rows plan as single creation subtasks") {
    Plan point = plan_of("Create point $p_1(4,5,6)$ (color: blue)",
                         "P = xe_1 + ye_2 + ze_3 + \\frac{1}{2}(x^2+y^2+z^2)e_\\infty + e_0");
    REQUIRE(point.subtasks.size() == 1);
    const auto& r = point.subtasks[0];
    CHECK(r.category == SubtaskCategory::GeometryObjectCreation);
    CHECK(r.specific_values == std::map<std::string, double>{{"x", 4}, {"y", 5}, {"z", 6}});
    CHECK(r.variable_names == std::vector<std::string>{"p1"});
    CHECK(color_of(r, "p1") == "blue");
    CHECK(r.operation == "createPointFormula");
    CHECK(plan_of("Create point $p_1(4,5,6)$ (color: blue)").subtasks[0].operation == "createPoint");

    Plan sphere = plan_of("Create sphere $s_1$ centered at $p_2(1,2,3)$ with radius 0.5 (color: red)",
                          "S = C - \\frac{1}{2}r^2e_\\infty");
    REQUIRE(sphere.subtasks.size() == 2);
    CHECK(sphere.subtasks[0].variable_names == std::vector<std::string>{"p2"});
    CHECK(sphere.subtasks[1].operation == "createSphere");
    CHECK(sphere.subtasks[1].references.at("center") == "p2");
    CHECK(sphere.subtasks[1].specific_values.at("r") == 0.5);
    CHECK(color_of(sphere.subtasks[1], "s1") == "red");
}

TEST_CASE("planner rejects what it cannot read") {
    CHECK(error_code([] { plan_of("Bake a cake"); }) == "UnrecognizedIntent");
    CHECK(error_code([] { plan_of(""); }) == "UnrecognizedIntent");
    CHECK(error_code([] { plan_of("Create sphere S centered at (0, 0, 0)."); }) == "UnrecognizedIntent");
    CHECK(error_code([] { plan_of("Translate Q by (1, 0, 0)."); }) == "UnrecognizedIntent");
    CHECK(error_code([] { plan_of("Create point P (1, 2, 3). Rotate P by 30 degrees."); }) == "UnrecognizedIntent");
}

TEST_CASE("anonymous objects get per-kind names that skip taken ones") {
    NameAllocator names;
    names.reserve("p1");
    CHECK(names.allocate("point") == "p2");
    CHECK(names.allocate("point") == "p3");
    CHECK(names.allocate("sphere") == "s1");
    CHECK(names.allocate("plane") == "pl1");
    CHECK(names.allocate("point_pair") == "pp1");
    CHECK(names.allocate("bivector-ish") == "m1");
    CHECK(names.taken("s1"));

    Plan p = plan_of("Create line L through the points (0, 0, 0) and (1, 0, 0). Create point p1 (5, 5, 5).");
    REQUIRE(p.subtasks.size() == 3);
    CHECK(p.subtasks[0].variable_names == std::vector<std::string>{"p2", "p3"});
    CHECK(p.subtasks[1].references == std::map<std::string, std::string>{{"a", "p2"}, {"b", "p3"}});

    PipelineContext ctx;
    auto r = record("t1", "createSphere", SubtaskCategory::GeometryObjectCreation, {""});
    r.specific_values = {{"center.x", 1}, {"center.y", 2}, {"center.z", 3}, {"r", 0.5}};
    auto el = analysis_agent(r, ctx);
    CHECK(el.calls.at(0).results == std::vector<std::string>{"s1"});
    CHECK(code_agent(el, builtin_registry()) ==
          "?s1 = createPoint(s1_center_x, s1_center_y, s1_center_z) - 0.5 * s1_r * s1_r * einf;\n");
}

TEST_CASE("analysis agent extracts values and references") {
    PipelineContext ctx;
    ctx.variables["p2"] = {"p2", "point", "t1"};
    auto r = record("t2", "createSphere", SubtaskCategory::GeometryObjectCreation, {"s1"});
    r.references["center"] = "p2";
    r.specific_values["r"] = 0.5;
    r.visualization.push_back({"s1", script::ColorSpec{script::ColorSpec::Kind::Named, "red", 0, 0, 0, {}}});
    auto el = analysis_agent(r, ctx);
    CHECK(el.operation == "createSphere");
    CHECK(el.result_kind == "sphere");
    CHECK(el.referenced == std::vector<std::string>{"p2"});
    CHECK(el.values == std::vector<std::pair<std::string, double>>{{"s1_r", 0.5}});
    CHECK(el.calls.at(0).args.at("center") == "p2");
    CHECK(el.colors.at(0).color.name == "red");

    SUBCASE("missing number") {
        r.specific_values.clear();
        CHECK(error_code([&] { analysis_agent(r, ctx); }) == "MissingValue");
    }
    SUBCASE("undefined prior variable") {
        r.references["center"] = "p9";
        CHECK(error_code([&] { analysis_agent(r, ctx); }) == "MissingValue");
    }
    SUBCASE("wrong kind") {
        ctx.variables["E"] = {"E", "plane", "t1"};
        r.references["center"] = "E";
        CHECK(error_code([&] { analysis_agent(r, ctx); }) == "TypeMismatch");
    }
    SUBCASE("unknown operation") {
        r.operation = "bakeCake";
        CHECK(error_code([&] { analysis_agent(r, ctx); }) == "NoMatchingFunction");
    }
}

TEST_CASE("code agent expands templates") {
    PipelineContext ctx;
    auto r = record("t1", "createPoint", SubtaskCategory::GeometryObjectCreation, {"p1"});
    r.specific_values = {{"x", 4}, {"y", 5}, {"z", 6}};
    auto el = analysis_agent(r, ctx);
    CHECK(code_agent(el, builtin_registry()) == "?p1 = createPoint(p1_x, p1_y, p1_z);\n");

    ctx.variables["S1"] = {"S1", "sphere", "t1"};
    ctx.variables["S2"] = {"S2", "sphere", "t1"};
    ctx.variables["S3"] = {"S3", "sphere", "t1"};
    auto cut = record("t2", "intersectThreeSpheres", SubtaskCategory::GeometricElementOperations, {"x4", "x5"});
    cut.references = {{"a", "S1"}, {"b", "S2"}, {"c", "S3"}};
    CHECK(code_agent(analysis_agent(cut, ctx), builtin_registry()) ==
          "pp1 = S1 ^ S2 ^ S3;\n"
          "pp1d = dual(pp1);\n"
          "pp1s = sqrt(pp1d . pp1d);\n"
          "?x4 = (pp1d + pp1s) / -(einf . pp1d);\n"
          "?x5 = (pp1d - pp1s) / -(einf . pp1d);\n");

    auto unknown = el;
    unknown.operation = "bakeCake";
    CHECK(error_code([&] { code_agent(unknown, builtin_registry()); }) == "NoMatchingFunction");
    auto wrong_category = el;
    wrong_category.category = SubtaskCategory::NumericalOperations;
    CHECK(error_code([&] { code_agent(wrong_category, builtin_registry()); }) == "NoMatchingFunction");
}

TEST_CASE("assignment agent binds each free input") {
    PipelineContext ctx;
    auto r = record("t1", "createPoint", SubtaskCategory::GeometryObjectCreation, {"p1"});
    r.specific_values = {{"x", 4}, {"y", 5}, {"z", 6}};
    auto el = analysis_agent(r, ctx);
    std::string frag = code_agent(el, builtin_registry());
    CHECK(assignment_agent(el, frag) == "p1_x = 4;\np1_y = 5;\np1_z = 6;\n");
    CHECK(assignment_agent(el, "?Q = createPoint(p1_x, p1_y, p1_z) + e1;\n") == "p1_x = 4;\np1_y = 5;\np1_z = 6;\n");
    CHECK(error_code([&] { assignment_agent(el, frag + "?W = q * e1;\n"); }) == "MissingValue");
    ExtractedElements none;
    CHECK(assignment_agent(none, "?A = e1 ^ e2;\n").empty());
}

TEST_CASE("visualization agent writes draw statements") {
    ExtractedElements el;
    el.colors.push_back({"S1", {script::ColorSpec::Kind::Named, "blue", 0, 0, 0, {}}});
    CHECK(visualization_agent(el) == ":S1 blue;\n");
    el.colors.push_back({"S2", {script::ColorSpec::Kind::Rgb, "", 0.5, 0, 1, {}}});
    el.colors.push_back({"S3", {}});
    CHECK(visualization_agent(el) == ":S1 blue;\n:S2 rgb(0.5, 0, 1);\n:S3;\n");
    CHECK(visualization_agent(ExtractedElements{}).empty());
    el.colors.push_back({"S4", {script::ColorSpec::Kind::Named, "chartreuse", 0, 0, 0, {}}});
    CHECK(error_code([&] { visualization_agent(el); }) == "UnknownColor");
}

TEST_CASE("validate agent blames the section holding the error") {
    auto corpus = corpus::read_file(std::string(GAVIS_SOURCE_DIR) + "/data/scripts/three_spheres.gas");
    CHECK(validate_agent(corpus).ok);

    std::vector<std::pair<std::string, Sections>> parts = {
        {"t1", {"?P = createPoint(p_x, p_y, p_z);\n", "p_x = 1;\np_y = 2;\np_z = 3;\n", ":P blu;\n"}}};
    Verdict v = validate_agent(assemble(parts));
    CHECK_FALSE(v.ok);
    CHECK(v.blamed == std::vector<AgentRole>{AgentRole::Visualization});
    CHECK(v.task_id == "t1");

    parts[0].second.draws = ":P blue;\n";
    parts[0].second.assignments = "p_x = 1;\np_y = ;\np_z = 3;\n";
    v = validate_agent(assemble(parts));
    CHECK(v.blamed == std::vector<AgentRole>{AgentRole::Assignment});

    parts[0].second.assignments = "p_x = 1;\np_y = 2;\np_z = 3;\n";
    parts[0].second.optimization = "?P = createPoint(p_x, p_y);\n";
    v = validate_agent(assemble(parts));
    CHECK(v.blamed == std::vector<AgentRole>{AgentRole::Code});
}

TEST_CASE("context chaining decides whether later subtasks see earlier variables") {
    Sections first{"?X1 = createPoint(x1_x, x1_y, x1_z);\n", "x1_x = 0;\nx1_y = 0;\nx1_z = 0;\n", ""};
    Sections second{"?S1 = X1 - 0.5 * s1_r * s1_r * einf;\n", "s1_r = 0.5;\n", ":S1 blue;\n"};
    CHECK(validate_agent(assemble({{"t1", first}, {"t2", second}})).ok);
    Verdict alone = validate_agent(assemble({{"t2", second}}));
    CHECK_FALSE(alone.ok);
    CHECK(alone.blamed == std::vector<AgentRole>{AgentRole::Code});

    Plan p = plan_of(kThreeSpheres);
    PipelineConfig off;
    off.context_chaining = false;
    try {
        execute_plan(p, off);
        FAIL("expected PipelineFailed");
    } catch (const PipelineFailed& e) {
        CHECK(e.subtask_id() == "t2");
        CHECK(e.retries_used() == kMaxRetries);
    }
    CHECK_NOTHROW(execute_plan(p));
}

TEST_CASE("format agent emits the canonical three-section script") {
    std::vector<Sections> parts = {
        {"?X1 = createPoint(x1_x,x1_y,x1_z);\n", "x1_x = 1;\nx1_y=2;\nx1_z = 3;\n", ":X1 blue;\n"},
        {"?S1 = X1 - 0.5*s1_r*s1_r*einf;\n", "s1_r = 0.5;\n", ":S1   red;\n"}};
    FinalScript f = format_agent(parts);
    CHECK(f.text ==
          "// optimization code\n"
          "?X1 = createPoint(x1_x, x1_y, x1_z);\n"
          "?S1 = X1 - 0.5 * s1_r * s1_r * einf;\n"
          "// parameter assignment\n"
          "x1_x = 1;\n"
          "x1_y = 2;\n"
          "x1_z = 3;\n"
          "s1_r = 0.5;\n"
          "// visualization\n"
          ":X1 blue;\n"
          ":S1 red;\n");
    CHECK(format_agent(parts).text == f.text);
    auto parsed = script::parse_source(f.text);
    REQUIRE(parsed.ok());
    CHECK(script::pretty_print(parsed.ast) == f.text);
    CHECK(script::validate(parsed.ast).empty());

    for (auto& s : parts) s.draws.clear();
    FinalScript two = format_agent(parts);
    CHECK(two.draws.empty());
    CHECK(two.text.find("// visualization") == std::string::npos);
    CHECK(two.text.find("// parameter assignment") != std::string::npos);
}

TEST_CASE("three-sphere pipeline draws three spheres and two yellow points on all of them") {
    PipelineResult res = execute_plan(plan_of(kThreeSpheres));
    REQUIRE(res.scene.objects.size() == 5);
    std::vector<nlohmann::json> spheres, points;
    for (const auto& o : res.scene.objects) {
        if (o.kind == "sphere") spheres.push_back(o.params);
        if (o.kind == "point") {
            points.push_back(o.params);
            CHECK(o.color.r == 1.0);
            CHECK(o.color.g == 1.0);
            CHECK(o.color.b == 0.0);
        }
    }
    REQUIRE(spheres.size() == 3);
    REQUIRE(points.size() == 2);
    for (const auto& p : points)
        for (const auto& s : spheres) CHECK(sphere_residual(p, s) <= 1e-9);

    auto expect = oracle::three_spheres_x0({0, 0, 0, 0.5}, {0, 0.4, 0, 0.4}, {0, 0.45, 0.2, 0.3});
    REQUIRE(expect);
    for (const auto& want : *expect) {
        bool found = false;
        for (const auto& p : points)
            found = found || (std::abs(p["x"].get<double>() - want.x) <= 1e-9 &&
                              std::abs(p["y"].get<double>() - want.y) <= 1e-9 &&
                              std::abs(p["z"].get<double>() - want.z) <= 1e-9);
        CHECK(found);
    }
    CHECK(res.code.find("# --- optimization code ---") != std::string::npos);
    for (const auto& s : res.subtasks) {
        CHECK(s.retries == 0);
        for (const auto& [role, n] : s.invocations) CHECK(n == 1);
    }
}

TEST_CASE("blamed agent regenerates within the retry bound") {
    Plan p = plan_of(kThreeSpheres);
    std::map<std::pair<AgentRole, std::string>, int> calls;

    SUBCASE("transient fault is repaired") {
        PipelineConfig cfg;
        cfg.tamper = [&](AgentRole role, const std::string& task, const std::string& out, int attempt) {
            ++calls[{role, task}];
            if (role == AgentRole::Visualization && task == "t2" && attempt == 0) return std::string(":S1 blu;\n");
            return out;
        };
        PipelineResult res = execute_plan(p, cfg);
        CHECK(res.subtasks[1].retries == 1);
        CHECK(res.subtasks[1].invocations.at(AgentRole::Visualization) == 2);
        CHECK(res.subtasks[1].invocations.at(AgentRole::Code) == 1);
        CHECK(res.subtasks[1].invocations.at(AgentRole::Analysis) == 1);
        CHECK(res.subtasks[1].diagnostics.size() >= 1);
    }
    SUBCASE("persistent fault fails after the last retry") {
        PipelineConfig cfg;
        cfg.tamper = [&](AgentRole role, const std::string& task, const std::string& out, int) {
            ++calls[{role, task}];
            return role == AgentRole::Visualization && task == "t3" ? std::string(":x4 yelow;\n") : out;
        };
        try {
            execute_plan(p, cfg);
            FAIL("expected PipelineFailed");
        } catch (const PipelineFailed& e) {
            CHECK(e.subtask_id() == "t3");
            CHECK(e.retries_used() == 2);
            CHECK(e.blamed() == std::vector<AgentRole>{AgentRole::Visualization});
            CHECK_FALSE(e.diagnostics().empty());
            CHECK(to_json(e)["blamed"][0] == "visualization_agent");
        }
    }
    for (const auto& [key, n] : calls) CHECK(n <= 1 + kMaxRetries);
}

TEST_CASE("poisoned registry template fails after two retries") {
    std::vector<FunctionSpec> fns = builtin_registry().functions();
    for (auto& f : fns)
        if (f.name == "createPoint") f.script_template = "?{out} = createPointt({x}, {y}, {z});";
    Registry poisoned(fns);
    PipelineConfig cfg;
    cfg.registry = &poisoned;
    try {
        execute_plan(plan_of(kThreeSpheres), cfg);
        FAIL("expected PipelineFailed");
    } catch (const PipelineFailed& e) {
        CHECK(e.subtask_id() == "t1");
        CHECK(e.retries_used() == 2);
        CHECK(e.blamed() == std::vector<AgentRole>{AgentRole::Code});
    }
}

TEST_CASE("identical requests give byte-identical results") {
    auto a = to_json(execute_plan(plan_of(kThreeSpheres))).dump();
    auto b = to_json(execute_plan(plan_of(kThreeSpheres))).dump();
    CHECK(a == b);
    CHECK(to_json(plan_of(kThreeSpheres)).dump() == to_json(plan_of(kThreeSpheres)).dump());
}

TEST_CASE("every benchmark plan consumes only earlier results") {
    std::ifstream in(std::string(GAVIS_SOURCE_DIR) + "/data/bench/cases.jsonl");
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        CAPTURE(j["id"].get<std::string>());
        PlanRequest r{j["task_description"], j["ga_formula"], j["space"], j["language"]};
        Plan p = plan(r);
        std::map<std::string, std::size_t> produced;
        for (std::size_t i = 0; i < p.subtasks.size(); ++i) {
            for (const auto& [slot, var] : p.subtasks[i].references) {
                REQUIRE(produced.count(var));
                CHECK(produced[var] < i);
            }
            for (const auto& v : p.subtasks[i].variable_names) produced[v] = i;
        }
        ++n;
    }
    CHECK(n == 40);
}

TEST_CASE("records survive a json round trip") {
    Plan p = plan_of(kThreeSpheres);
    Plan back = plan_from_json(nlohmann::json::parse(to_json(p).dump()));
    CHECK(to_json(back) == to_json(p));
    auto j = to_json(p);
    j["subtasks"][1]["visualization"][0]["color"] = 7;
    try {
        plan_from_json(j);
        FAIL("expected SchemaViolation");
    } catch (const Error& e) {
        CHECK(e.code() == "SchemaViolation");
        CHECK(std::string(e.what()).find("$.subtasks[1].visualization[0].color") != std::string::npos);
    }
}

TEST_CASE("external planner backend") {
    PlanRequest req;
    req.description = kThreeSpheres;
    Plan local = plan(req);

    SUBCASE("mock returning the deterministic plan gives the same result") {
        nlohmann::json seen;
        MockBackend mock([&](const httplib::Request& rq, httplib::Response& rs) {
            seen = nlohmann::json::parse(rq.body);
            rs.set_content(backend_body(local).dump(), "application/json");
        });
        Plan remote = external_plan(req, {mock.url(), 5.0});
        CHECK(seen["subtask_schema_version"] == "1");
        CHECK(seen["description"] == kThreeSpheres);
        CHECK(to_json(remote) == to_json(local));
        CHECK(to_json(execute_plan(remote)).dump() == to_json(execute_plan(local)).dump());
    }
    SUBCASE("malformed field") {
        MockBackend mock([&](const httplib::Request&, httplib::Response& rs) {
            auto body = backend_body(local);
            body["subtasks"][2]["category"] = 42;
            rs.set_content(body.dump(), "application/json");
        });
        try {
            external_plan(req, {mock.url(), 5.0});
            FAIL("expected SchemaViolation");
        } catch (const Error& e) {
            CHECK(e.code() == "SchemaViolation");
            CHECK(std::string(e.what()).find("$.subtasks[2].category") != std::string::npos);
        }
    }
    SUBCASE("dangling reference") {
        MockBackend mock([&](const httplib::Request&, httplib::Response& rs) {
            auto body = backend_body(local);
            body["subtasks"][1]["depends_on"] = nlohmann::json::array();
            rs.set_content(body.dump(), "application/json");
        });
        CHECK(error_code([&] { external_plan(req, {mock.url(), 5.0}); }) == "SchemaViolation");
    }
    SUBCASE("timeout") {
        MockBackend mock([&](const httplib::Request&, httplib::Response& rs) {
            std::this_thread::sleep_for(std::chrono::milliseconds(1500));
            rs.set_content("{}", "application/json");
        });
        CHECK(error_code([&] { external_plan(req, {mock.url(), 0.2}); }) == "BackendUnavailable");
    }
    SUBCASE("nothing listening") {
        int port;
        {
            MockBackend probe([](const httplib::Request&, httplib::Response&) {});
            port = probe.port;
        }
        CHECK(error_code([&] {
                  external_plan(req, {"http://127.0.0.1:" + std::to_string(port) + "/plan", 1.0});
              }) == "BackendUnavailable");
    }
}
