#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>

#include "gavis/cga/objects.hpp"
#include "gavis/codegen/program.hpp"
#include "gavis/codegen/scene.hpp"
#include "gavis/script/script.hpp"
#include "support/corpus.hpp"
#include "support/sphere_oracle.hpp"

using namespace gavis;
using namespace gavis::codegen;

namespace {

const std::string kScripts = std::string(GAVIS_SOURCE_DIR) + "/data/scripts";

script::ScriptAst parse_ok(const std::string& src) {
    auto r = script::parse_source(src);
    REQUIRE(r.ok());
    return r.ast;
}

BladeProgram compile_src(const std::string& src, const Space& space = cga3d()) { return compile(parse_ok(src), space); }

std::string error_code(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

// Compares against a golden file; GAVIS_UPDATE_GOLDEN=1 rewrites it.
void check_golden(const std::string& name, const std::string& text) {
    std::filesystem::path path = std::filesystem::path(GAVIS_GOLDEN_DIR) / name;
    if (std::getenv("GAVIS_UPDATE_GOLDEN")) {
        std::ofstream(path, std::ios::binary) << text;
    }
    INFO("golden file ", path.string());
    REQUIRE(std::filesystem::exists(path));
    CHECK(corpus::read_file(path) == text);
}

Bindings random_bindings(const BladeProgram& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> wide(-2.0, 2.0), jitter(-0.05, 0.05);
    Bindings defaults = default_bindings(p);
    bool near = !defaults.empty() && rng() % 2 == 0;
    Bindings b;
    for (const auto& in : p.inputs) {
        auto it = defaults.find(in);
        b[in] = near && it != defaults.end() ? it->second + jitter(rng) : wide(rng);
    }
    return b;
}

} // namespace

TEST_CASE("compile a point") {
    auto p = compile_src("?P = createPoint(x,y,z);");
    CHECK(p.inputs == std::vector<std::string>{"x", "y", "z"});
    REQUIRE(p.steps.size() == 5);
    std::vector<std::uint32_t> blades;
    for (const auto& s : p.steps) blades.push_back(s.blade.bits);
    CHECK(blades == std::vector<std::uint32_t>{1, 2, 4, 8, 16});
    // einf coefficient over the null basis is (c4 + c5) / 2.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-5, 5);
    for (int i = 0; i < 50; ++i) {
        Bindings b{{"x", d(rng)}, {"y", d(rng)}, {"z", d(rng)}};
        double c4 = evaluate(p.steps[3].expr, b), c5 = evaluate(p.steps[4].expr, b);
        CHECK(0.5 * (c4 + c5) == doctest::Approx(0.5 * (b["x"] * b["x"] + b["y"] * b["y"] + b["z"] * b["z"])).epsilon(1e-14));
        CHECK(c5 - c4 == doctest::Approx(1.0));
    }
    CHECK(p.outputs.size() == 1);
    CHECK(p.steps[0].name == "P_1");
}

TEST_CASE("zero elimination") {
    auto z = compile_src("?Z = e1^e1;", euclid3d());
    CHECK(z.steps.empty());
    REQUIRE(z.outputs.size() == 1);
    CHECK(z.outputs[0].blades.empty());
    REQUIRE(z.warnings.size() == 1);
    CHECK(z.warnings[0].code == "EmptyMultivector");

    std::string src = corpus::read_file(kScripts + "/three_spheres.gas");
    auto p = compile_src(src);
    CHECK(p.warnings.empty());
    CHECK(p.steps.size() < 32 * p.outputs.size());
    // Point outputs carry only vector blades once the trivector residue is gone.
    for (const auto& o : p.outputs)
        if (o.name == "x4" || o.name == "x5")
            for (Blade b : o.blades) CHECK(b.grade() == 1);
}

TEST_CASE("compile errors") {
    std::string div_src = "?A = e2 / (1 + e1);";
    try {
        compile_src(div_src, euclid3d());
        FAIL("expected SymbolicDivisionByNonScalar");
    } catch (const ScriptError& e) {
        CHECK(e.code() == "SymbolicDivisionByNonScalar");
        CHECK(e.span().column == 6);
        CHECK(e.span().length == div_src.size() - 6);
    }
    CHECK(error_code([] { compile_src("?A = sqrt(e1);", euclid3d()); }) == "NonScalarArgument");
    CHECK(error_code([] { compile_src("?A = einf;", euclid3d()); }) == "UnsupportedSpace");
    CHECK(error_code([] { compile_src("?A = rotor(2 * (e1 ^ e2), t);", euclid3d()); }) == "RotorPlaneNotUnit");
    CHECK(error_code([] { compile_src("?A = C;"); }) == "InvalidScript");
    CHECK(error_code([] { compile_src("?A = e1 / e2;", euclid3d()); }).empty());
}

TEST_CASE("bind") {
    auto p = compile_src("?P = createPoint(x,y,z);");
    auto a = codegen::bind(p, {{"x", 4}, {"y", 5}, {"z", 6}});
    CHECK(a.bindings.size() == 3);
    CHECK(a.warnings.empty());
    CHECK(error_code([&] { codegen::bind(p, {{"x", 4}, {"y", 5}}); }) == "MissingInput");
    auto extra = codegen::bind(p, {{"x", 4}, {"y", 5}, {"z", 6}, {"w", 1}});
    REQUIRE(extra.warnings.size() == 1);
    CHECK(extra.warnings[0].code == "ExtraInput");
    CHECK(extra.warnings[0].severity == script::Severity::Warning);

    auto q = compile_src("?S = createSphere(createPoint(x, y, z), r); r = 0.5;");
    CHECK(q.defaults.size() == 1);
    CHECK(default_bindings(q, {{"r", 2}}).at("r") == 2.0);
}

TEST_CASE("run matches the cga constructors") {
    auto p = compile_src(corpus::read_file(kScripts + "/point_xyz.gas"));
    auto r = run(p, codegen::bind(p, {{"x", 4}, {"y", 5}, {"z", 6}}));
    CHECK(max_abs_diff(r.at("P"), cga::embed_point({4, 5, 6})) <= 1e-12);

    auto s = compile_src(corpus::read_file(kScripts + "/sphere_center_radius.gas"));
    auto rs = run(s, codegen::bind(s, default_bindings(s)));
    CHECK(max_abs_diff(rs.at("S1"), cga::sphere_ipns({1, 2, 3}, 0.5)) <= 1e-12);

    auto d = compile_src("?A = e1 / r;", euclid3d());
    CHECK(error_code([&] { run(d, codegen::bind(d, {{"r", 0.0}})); }) == "DomainError");
}

TEST_CASE("python emission matches golden files") {
    auto scripts = corpus::load(kScripts);
    REQUIRE(scripts.size() >= 20);
    for (const auto& s : scripts) {
        INFO(s.name);
        auto p = compile_src(s.source, s.space);
        auto a = codegen::bind(p, default_bindings(p));
        std::string code = emit_code(p, a, Target::Python);
        CHECK(code == emit_code(compile_src(s.source, s.space), a, Target::Python));
        check_golden(s.name + ".py.golden", code);
    }
    auto p = compile_src(corpus::read_file(kScripts + "/point_xyz.gas"));
    check_golden("point_xyz.json.golden", emit_code(p, codegen::bind(p, default_bindings(p)), Target::JsonIr));
}

TEST_CASE("emission details") {
    auto p = compile_src("?P = createPoint(x, y, z);");
    auto a = codegen::bind(p, {{"x", 4}, {"y", 5}, {"z", 6}});
    std::string code = emit_code(p, a, Target::Python);
    auto at = [&](const char* h) { return code.find(h); };
    CHECK(at("# --- assignments ---\n") < at("# --- optimization code ---\n"));
    CHECK(at("# --- optimization code ---\n") < at("# --- visualization ---\n"));
    CHECK(code.find("visualization = []\n") != std::string::npos);
    CHECK(code.find("P_8 = 0.5 * (x**2 + y**2 + z**2) - 0.5  # e4\n") != std::string::npos);
    CHECK_THROWS(target_by_name("cluscript"));
}

TEST_CASE("json-ir round trip") {
    for (const auto& s : corpus::load(kScripts)) {
        INFO(s.name);
        auto p = compile_src(s.source, s.space);
        auto a = codegen::bind(p, default_bindings(p));
        std::string text = emit_code(p, a, Target::JsonIr);
        ParsedIr back = parse_json_ir(text);
        CHECK(emit_code(back.program, back.assignment, Target::JsonIr) == text);
        auto r1 = run(p, a);
        auto r2 = run(back.program, back.assignment);
        for (const auto& [k, v] : r1) CHECK(max_abs_diff(v, r2.at(k)) == 0.0);
    }
    CHECK(error_code([] { parse_json_ir("{"); }) == "SchemaViolation");
    CHECK(error_code([] { parse_json_ir(R"({"format":"gavis-json-ir","version":1,"space":"cga3d"})"); }) ==
          "SchemaViolation");
    try {
        parse_json_ir(R"({"format":"gavis-json-ir","version":1,"space":"cga3d","inputs":[],"assignments":[],
            "steps":[{"name":"A_1","var":"A","blade":64,"expr":{"op":"const","value":1}}],"outputs":[],"draws":[]})");
        FAIL("expected SchemaViolation");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("$.steps[0].blade") != std::string::npos);
    }
}

TEST_CASE("scene of the three-sphere program") {
    auto p = compile_src(corpus::read_file(kScripts + "/three_spheres.gas"));
    auto results = run(p, codegen::bind(p, default_bindings(p)));
    Scene scene = scene_of(p, results);
    CHECK(scene.warnings.empty());
    REQUIRE(scene.objects.size() == 5);
    const char* kinds[] = {"sphere", "sphere", "sphere", "point", "point"};
    Rgb colors[] = {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 1, 0}};
    for (int i = 0; i < 5; ++i) {
        CHECK(scene.objects[i].kind == kinds[i]);
        CHECK(scene.objects[i].color.r == colors[i].r);
        CHECK(scene.objects[i].color.g == colors[i].g);
        CHECK(scene.objects[i].color.b == colors[i].b);
    }
    auto want = oracle::three_spheres_x0({0, 0, 0, 0.5}, {0, 0.4, 0, 0.4}, {0, 0.45, 0.2, 0.3});
    REQUIRE(want);
    std::vector<Mv> spheres = {results.at("S1"), results.at("S2"), results.at("S3")};
    for (int i = 3; i < 5; ++i) {
        const auto& prm = scene.objects[i].params;
        cga::EuclidPoint x{prm["x"], prm["y"], prm["z"]};
        double best = std::min(cga::distance(x, {(*want)[0].x, (*want)[0].y, (*want)[0].z}),
                               cga::distance(x, {(*want)[1].x, (*want)[1].y, (*want)[1].z}));
        CHECK(best <= 1e-9);
        for (const auto& s : spheres) CHECK(std::abs(lcont(cga::embed_point(x), s).scalar_part()) <= 1e-9);
    }
    auto doc = to_json(scene);
    CHECK(doc["version"] == 1);
    CHECK(doc["objects"][0]["params"].contains("cx"));

    auto none = compile_src("?P = createPoint(1, 2, 3);");
    CHECK(scene_of(none, run(none, codegen::bind(none, {}))).objects.empty());

    auto zero = compile_src("?Z = e1 ^ e1; :Z red;");
    Scene zs = scene_of(zero, run(zero, codegen::bind(zero, {})));
    REQUIRE(zs.objects.size() == 1);
    CHECK(zs.objects[0].kind == "unknown");
    REQUIRE(zs.warnings.size() == 1);
    CHECK(zs.warnings[0].code == "UnclassifiableDraw");
}

TEST_CASE("compiled programs agree with direct interpretation") {
    auto scripts = corpus::load(kScripts);
    REQUIRE(scripts.size() >= 20);
    std::mt19937_64 rng(42);
    for (const auto& s : scripts) {
        INFO(s.name);
        auto ast = parse_ok(s.source);
        auto p = compile(ast, s.space);
        int agreed = 0, attempts = 0, one_sided = 0;
        while (agreed < 100 && attempts < 5000) {
            ++attempts;
            Bindings b = random_bindings(p, rng);
            std::map<std::string, Mv> compiled, direct;
            bool ok1 = true, ok2 = true;
            try {
                compiled = run(p, codegen::bind(p, b));
            } catch (const Error&) {
                ok1 = false;
            }
            try {
                direct = interpret(ast, s.space, b);
            } catch (const Error&) {
                ok2 = false;
            }
            if (ok1 != ok2) ++one_sided;
            if (!ok1 || !ok2) continue;
            ++agreed;
            for (const auto& [name, v] : compiled) {
                double diff = max_abs_diff(v, direct.at(name));
                if (diff > 1e-10) {
                    INFO(name, " differs by ", diff);
                    CHECK(diff <= 1e-10);
                }
            }
        }
        CHECK(agreed == 100);
        CHECK(one_sided <= attempts / 20);
    }
}

TEST_CASE("eliminated blades are zero at random bindings") {
    std::mt19937_64 rng(5);
    std::size_t checked = 0;
    for (const auto& s : corpus::load(kScripts)) {
        auto p = compile_src(s.source, s.space);
        if (p.eliminated.empty()) continue;
        INFO(s.name);
        int samples = 0;
        for (int attempt = 0; attempt < 2000 && samples < 20; ++attempt) {
            Bindings b = random_bindings(p, rng);
            // Replay the step prefix each dropped expression saw.
            std::vector<double> values;
            bool ok = true;
            Bindings env = b;
            std::size_t done = 0;
            for (const auto& e : p.eliminated) {
                try {
                    for (; done < e.after_steps; ++done) env[p.steps[done].name] = evaluate(p.steps[done].expr, env);
                    values.push_back(evaluate(e.expr, env));
                } catch (const Error&) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            ++samples;
            for (double v : values) CHECK(std::abs(v) <= 1e-12);
        }
        CHECK(samples == 20);
        checked += p.eliminated.size();
    }
    CHECK(checked > 0);
}
