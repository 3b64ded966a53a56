#include <set>

#include "gavis/cga/objects.hpp"
#include "gavis/codegen/scene.hpp"

namespace gavis::codegen {

namespace {

using nlohmann::json;

json xyz(const cga::EuclidPoint& p) { return {{"x", p.x}, {"y", p.y}, {"z", p.z}}; }

json params_of(const cga::ClassifiedObject& obj) {
    using namespace cga;
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, PointParams>) {
                return xyz(p.p);
            } else if constexpr (std::is_same_v<T, SphereParams>) {
                return {{"cx", p.center.x}, {"cy", p.center.y}, {"cz", p.center.z}, {"r", p.radius}};
            } else if constexpr (std::is_same_v<T, PlaneParams>) {
                return {{"nx", p.normal.x}, {"ny", p.normal.y}, {"nz", p.normal.z}, {"d", p.d}};
            } else if constexpr (std::is_same_v<T, LineParams>) {
                return {{"px", p.point.x},     {"py", p.point.y},     {"pz", p.point.z},
                        {"dx", p.direction.x}, {"dy", p.direction.y}, {"dz", p.direction.z}};
            } else if constexpr (std::is_same_v<T, CircleParams>) {
                return {{"cx", p.center.x}, {"cy", p.center.y}, {"cz", p.center.z}, {"nx", p.normal.x},
                        {"ny", p.normal.y}, {"nz", p.normal.z}, {"r", p.radius}};
            } else if constexpr (std::is_same_v<T, PointPairParams>) {
                return {{"p1", xyz(p.p1)}, {"p2", xyz(p.p2)}};
            } else {
                return json::object();
            }
        },
        obj.params);
}

json raw_blades(const Mv& m) {
    json blades = json::object();
    for (const auto& [b, c] : m.terms()) blades[blade_name(b)] = c;
    return {{"blades", blades}};
}

} // namespace

Rgb resolve_color(const script::ColorSpec& c) {
    using K = script::ColorSpec::Kind;
    if (c.kind == K::Rgb) return {c.r, c.g, c.b};
    if (c.kind == K::None) return {};
    static const std::map<std::string, Rgb, std::less<>> named = {
        {"blue", {0, 0, 1}},   {"red", {1, 0, 0}},   {"green", {0, 1, 0}}, {"yellow", {1, 1, 0}},
        {"black", {0, 0, 0}},  {"white", {1, 1, 1}}, {"cyan", {0, 1, 1}},  {"magenta", {1, 0, 1}},
    };
    auto it = named.find(c.name);
    return it == named.end() ? Rgb{} : it->second;
}

Scene scene_of(const BladeProgram& program, const std::map<std::string, Mv>& results) {
    Scene scene;
    std::map<std::string, int> seen;
    for (const auto& d : program.draws) {
        SceneObject obj;
        int n = ++seen[d.name];
        obj.id = n == 1 ? d.name : d.name + "#" + std::to_string(n);
        obj.label = d.name;
        obj.color = resolve_color(d.color);
        auto it = results.find(d.name);
        Mv value = it == results.end() ? Mv(program.space) : it->second;
        cga::ClassifiedObject cls;
        if (program.space && program.space->name == "cga3d") cls = cga::classify(value);
        if (cls.kind == cga::ObjectKind::Unknown) {
            scene.warnings.push_back({script::Severity::Warning, "UnclassifiableDraw",
                                      d.name + (value.is_zero() ? " is zero" : " is not a recognised object") +
                                          "; drawn as raw coefficients",
                                      {}});
            obj.kind = "unknown";
            obj.params = raw_blades(value);
        } else {
            obj.kind = cga::to_string(cls.kind);
            obj.params = params_of(cls);
        }
        scene.objects.push_back(std::move(obj));
    }
    return scene;
}

nlohmann::json to_json(const Scene& scene) {
    json objects = json::array();
    for (const auto& o : scene.objects) {
        objects.push_back({{"id", o.id},
                           {"kind", o.kind},
                           {"color", {{"r", o.color.r}, {"g", o.color.g}, {"b", o.color.b}}},
                           {"label", o.label},
                           {"params", o.params}});
    }
    return {{"version", 1}, {"objects", objects}};
}

} // namespace gavis::codegen
