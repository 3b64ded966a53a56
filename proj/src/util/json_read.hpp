#pragma once

#include <string>

#include <json.hpp>

#include "gavis/error.hpp"
#include "gavis/script/script.hpp"

namespace gavis::util {

using nlohmann::json;

[[noreturn]] inline void schema_error(const std::string& path, const std::string& what) {
    throw Error("SchemaViolation", path + ": " + what);
}

inline const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) schema_error(path, std::string("missing field '") + key + "'");
    return obj.at(key);
}

inline std::string str_field(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_string()) schema_error(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline std::string opt_str_field(const json& obj, const char* key, const std::string& path, std::string fallback) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
    return str_field(obj, key, path);
}

inline double num_field(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_number()) schema_error(path + "." + key, "expected a number");
    return v.get<double>();
}

inline const json& array_field(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_array()) schema_error(path + "." + key, "expected an array");
    return v;
}

inline const json& object_field(const json& obj, const char* key, const std::string& path) {
    const json& v = field(obj, key, path);
    if (!v.is_object()) schema_error(path + "." + key, "expected an object");
    return v;
}

/// A color as written in scripts ("blue", "rgb(1, 0, 0)") or null.
inline script::ColorSpec parse_color(const json& v, const std::string& path) {
    script::ColorSpec c;
    if (v.is_null()) return c;
    if (!v.is_string()) schema_error(path, "expected a color string or null");
    auto parsed = script::parse_source(":_c " + v.get<std::string>() + ";");
    if (!parsed.ok() || parsed.ast.statements.size() != 1) schema_error(path, "malformed color");
    c = std::get<script::DrawStmt>(parsed.ast.statements[0]).color;
    c.span = {};
    return c;
}

inline json color_json(const script::ColorSpec& c) {
    if (c.kind == script::ColorSpec::Kind::None) return nullptr;
    return script::color_text(c);
}

} // namespace gavis::util
