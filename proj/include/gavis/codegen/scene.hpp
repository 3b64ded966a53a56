#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "gavis/codegen/program.hpp"

namespace gavis::codegen {

struct Rgb {
    double r = 0.5, g = 0.5, b = 0.5;
};

struct SceneObject {
    std::string id;
    std::string kind;
    Rgb color;
    std::string label;
    nlohmann::json params;
};

struct Scene {
    std::vector<SceneObject> objects;
    std::vector<script::Diagnostic> warnings;  // not part of the document
};

Rgb resolve_color(const script::ColorSpec& c);

/// Drawn values are read as IPNS (see cga::classify).
Scene scene_of(const BladeProgram& program, const std::map<std::string, Mv>& results);

nlohmann::json to_json(const Scene& scene);

} // namespace gavis::codegen
