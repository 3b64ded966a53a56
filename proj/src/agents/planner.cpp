#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <regex>
#include <sstream>

#include "gavis/agents/planner.hpp"
#include "gavis/script/script.hpp"
#include "util/number_format.hpp"

namespace gavis::agents {

std::string kind_prefix(const std::string& kind) {
    static const std::map<std::string, std::string> prefixes = {
        {"point", "p"},      {"sphere", "s"},     {"plane", "pl"},  {"line", "l"},
        {"circle", "c"},     {"point_pair", "pp"}, {"vector", "v"}, {"scalar", "k"},
        {"translator", "t"}, {"rotor", "r"}};
    auto it = prefixes.find(kind);
    return it == prefixes.end() ? "m" : it->second;
}

std::string NameAllocator::allocate(const std::string& kind) {
    std::string prefix = kind_prefix(kind);
    int& n = counters_[prefix];
    std::string name;
    do {
        name = prefix + std::to_string(++n);
    } while (taken_.count(name));
    taken_.insert(name);
    return name;
}

namespace {


std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n,");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n,");
    return s.substr(a, b - a + 1);
}

std::string tuple_text(const std::vector<double>& v) {
    std::string out = "(";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + util::short_number(v[i]);
    return out + ")";
}

[[noreturn]] void unrecognized(const std::string& clause, const std::string& why) {
    throw Error("UnrecognizedIntent", why + ": \"" + clause + "\"");
}

// ---------------------------------------------------------------- tokens

struct Tok {
    enum Kind { Word, Num, Tuple, Comma, Other } kind = Other;
    std::string text;
    std::string low;
    double num = 0.0;
    std::vector<double> tuple;
};

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::optional<std::vector<double>> number_list(const std::string& inner) {
    std::vector<double> vals;
    std::stringstream ss(inner);
    std::string part;
    while (std::getline(ss, part, ',')) {
        double v;
        if (!parse_number(trim(part), v)) return std::nullopt;
        vals.push_back(v);
    }
    if (vals.empty()) return std::nullopt;
    return vals;
}

std::vector<Tok> tokenize(const std::string& s) {
    std::vector<Tok> out;
    std::size_t i = 0;
    auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '(') {
            std::size_t close = s.find(')', i);
            if (close == std::string::npos) {
                out.push_back({Tok::Other, "(", "(", 0, {}});
                ++i;
                continue;
            }
            std::string inner = s.substr(i + 1, close - i - 1);
            if (auto vals = number_list(inner)) {
                out.push_back({Tok::Tuple, "(" + inner + ")", "", 0, *vals});
            } else {
                auto inner_toks = tokenize(inner);
                out.insert(out.end(), inner_toks.begin(), inner_toks.end());
            }
            i = close + 1;
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   ((c == '-' || c == '.') && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t j = i + 1;
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
            if (j > i && s[j - 1] == '.') --j;  // sentence-final period
            std::string text = s.substr(i, j - i);
            double v = 0;
            parse_number(text, v);
            out.push_back({Tok::Num, text, text, v, {}});
            i = j;
        } else if (is_word(c)) {
            std::size_t j = i;
            while (j < s.size() && is_word(s[j])) ++j;
            std::string text = s.substr(i, j - i);
            out.push_back({Tok::Word, text, lower(text), 0, {}});
            i = j;
        } else if (c == ',') {
            out.push_back({Tok::Comma, ",", ",", 0, {}});
            ++i;
        } else {
            out.push_back({Tok::Other, std::string(1, c), std::string(1, c), 0, {}});
            ++i;
        }
    }
    return out;
}

// ---------------------------------------------------------------- vocabulary

const std::map<std::string, std::string>& kind_nouns() {
    static const std::map<std::string, std::string> m = {
        {"point", "point"},   {"points", "point"},     {"sphere", "sphere"},   {"spheres", "sphere"},
        {"ball", "sphere"},   {"balls", "sphere"},     {"plane", "plane"},     {"planes", "plane"},
        {"line", "line"},     {"lines", "line"},       {"circle", "circle"},   {"circles", "circle"},
        {"vector", "vector"}, {"vectors", "vector"},   {"bivector", "multivector"},
        {"multivector", "multivector"}, {"multivectors", "multivector"}, {"element", "multivector"}};
    return m;
}

const std::set<std::string>& keywords() {
    static const std::set<std::string> k = {
        "a", "an", "the", "of", "and", "with", "at", "by", "to", "in", "on", "onto", "into", "as", "from",
        "between", "through", "get", "obtain", "named", "called", "centered", "centred", "center", "centre",
        "centers", "centres", "radius", "radii", "normal", "distance", "components", "coordinates", "respectively",
        "it", "them", "is", "are", "degrees", "degree", "radians", "radian", "about", "around", "along", "across",
        "plane", "axis", "one", "two", "three", "four", "both", "all", "origin", "result", "be", "its", "their",
        "then", "finally", "color", "colour", "compute", "calculate", "find", "determine", "create", "construct",
        "define", "build", "make", "generate", "draw", "visualize", "visualise", "visualized", "visualised",
        "intersection", "intersect", "translate", "rotate", "reflect", "project", "normalize", "normalise",
        "scale", "giving", "yielding", "store", "call", "name", "using", "formula", "new", "given"};
    return k;
}

int count_word(const std::string& w) {
    static const std::map<std::string, int> m = {{"one", 1}, {"two", 2}, {"both", 2}, {"three", 3}, {"four", 4}};
    auto it = m.find(w);
    return it == m.end() ? 0 : it->second;
}

bool looks_like_name(const std::string& w) {
    if (w.empty() || w.size() > 6 || !std::isalpha(static_cast<unsigned char>(w[0]))) return false;
    std::size_t i = 0;
    while (i < w.size() && std::isalpha(static_cast<unsigned char>(w[i]))) ++i;
    if (i > 3) return false;
    bool digits = i < w.size();
    for (std::size_t j = i; j < w.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(w[j]))) return false;
    return digits || std::isupper(static_cast<unsigned char>(w[0]));
}

// ---------------------------------------------------------------- object phrases

struct PointRef {
    std::string name;                 // empty for a literal
    std::optional<std::vector<double>> coords;
};

struct ObjSpec {
    std::string kind;  // may be empty when only a reference is given
    std::string name;
    std::optional<std::vector<double>> coords;
    std::optional<PointRef> center;
    std::optional<double> radius;
    std::optional<std::vector<double>> normal;
    std::optional<double> distance;
    std::vector<PointRef> through;

    bool reference_only() const {
        return !coords && !center && !radius && !normal && !distance && through.empty();
    }
};

struct Symbol {
    std::string name;
    std::string kind;
    std::string task_id;
};

/// One registry call before grouping into subtasks.
struct Call {
    std::string fn;
    std::vector<std::string> results;
    std::string kind;  // kind of each result
    std::vector<std::pair<std::string, double>> values;        // param -> value
    std::vector<std::pair<std::string, std::string>> refs;     // param -> variable
    bool primary = false;
    std::string summary;
};

class Cursor {
public:
    Cursor(std::vector<Tok> toks, std::string clause, const std::map<std::string, Symbol>* symbols)
        : t_(std::move(toks)), clause_(std::move(clause)), symbols_(symbols) {}

    bool done() const { return i_ >= t_.size(); }
    const Tok* peek(std::size_t ahead = 0) const { return i_ + ahead < t_.size() ? &t_[i_ + ahead] : nullptr; }
    std::size_t pos() const { return i_; }
    void seek(std::size_t p) { i_ = p; }
    void next() { ++i_; }
    const std::string& clause() const { return clause_; }

    bool is_word(std::size_t ahead, std::string_view w) const {
        const Tok* t = peek(ahead);
        return t && t->kind == Tok::Word && t->low == w;
    }
    bool accept(std::string_view w) {
        if (!is_word(0, w)) return false;
        ++i_;
        return true;
    }
    bool accept_any(std::initializer_list<std::string_view> ws) {
        for (auto w : ws)
            if (accept(w)) return true;
        return false;
    }
    bool accept_comma() {
        const Tok* t = peek();
        if (t && t->kind == Tok::Comma) {
            ++i_;
            return true;
        }
        return false;
    }
    // An article that is also a defined object name (or precedes a
    // coordinate triple) is kept as a name.
    void skip_fillers() {
        while (const Tok* t = peek()) {
            if (t->kind != Tok::Word || (t->low != "the" && t->low != "a" && t->low != "an")) return;
            if (symbols_ && symbols_->count(t->text)) return;
            if (const Tok* n = peek(1); n && n->kind == Tok::Tuple) return;
            ++i_;
        }
    }

    bool at_name(std::size_t ahead = 0) const {
        const Tok* t = peek(ahead);
        if (!t || t->kind != Tok::Word) return false;
        if (kind_nouns().count(t->low) || script::is_color_keyword(t->low)) return false;
        const Tok* after = peek(ahead + 1);
        bool tuple_follows = after && (after->kind == Tok::Tuple ||
                                       (after->kind == Tok::Word && after->low == "at" && peek(ahead + 2) &&
                                        peek(ahead + 2)->kind == Tok::Tuple));
        if (symbols_ && symbols_->count(t->text)) return true;
        bool capital_letter = t->text.size() == 1 && std::isupper(static_cast<unsigned char>(t->text[0])) && i_ + ahead > 0;
        if (keywords().count(t->low) && !(tuple_follows && t->text.size() == 1) && !capital_letter) return false;
        return tuple_follows || looks_like_name(t->text);
    }

    std::optional<double> number() {
        const Tok* t = peek();
        if (t && t->kind == Tok::Num) {
            ++i_;
            return t->num;
        }
        return std::nullopt;
    }

    std::optional<std::vector<double>> tuple(std::size_t n = 3) {
        const Tok* t = peek();
        if (t && t->kind == Tok::Tuple && t->tuple.size() == n) {
            ++i_;
            return t->tuple;
        }
        return std::nullopt;
    }

    std::vector<double> number_list() {
        std::vector<double> out;
        while (true) {
            if (auto v = number()) {
                out.push_back(*v);
            } else {
                break;
            }
            std::size_t save = i_;
            accept_comma();
            accept("and");
            if (!peek() || peek()->kind != Tok::Num) {
                i_ = save;
                break;
            }
        }
        return out;
    }

    std::optional<PointRef> point_ref() {
        skip_fillers();
        accept_any({"point", "points"});
        if (at_name()) {
            PointRef r{peek()->text, std::nullopt};
            ++i_;
            std::size_t save = i_;
            accept("at");
            if (auto c = tuple()) {
                r.coords = c;
            } else {
                i_ = save;
            }
            return r;
        }
        if (auto c = tuple()) return PointRef{"", c};
        return std::nullopt;
    }

    std::vector<PointRef> point_ref_list() {
        std::vector<PointRef> out;
        while (auto r = point_ref()) {
            out.push_back(*r);
            std::size_t save = i_;
            accept_comma();
            accept("and");
            std::size_t probe = i_;
            skip_fillers();
            bool more = at_name() || (peek() && peek()->kind == Tok::Tuple) || is_word(0, "point");
            i_ = probe;
            if (!more) {
                i_ = save;
                break;
            }
        }
        return out;
    }

    // Attributes of a single object, in any order.
    void attributes(ObjSpec& s) {
        while (true) {
            std::size_t save = i_;
            while (accept_any({"with", "and", "having", "whose"}) || accept_comma()) {
            }
            accept_any({"a", "the"});
            if (auto c = tuple()) {
                s.coords = c;
            } else if (is_word(0, "at") && peek(1) && peek(1)->kind == Tok::Tuple && peek(1)->tuple.size() == 3) {
                next();
                s.coords = tuple();
            } else if (accept_any({"components", "coordinates"})) {
                s.coords = tuple();
                if (!s.coords) unrecognized(clause_, "expected a coordinate triple");
            } else if (accept_any({"centered", "centred", "center", "centre"})) {
                accept_any({"at", "of", "in"});
                s.center = point_ref();
                if (!s.center) unrecognized(clause_, "expected a centre");
            } else if (accept_any({"radius"})) {
                accept_any({"of", "r"});
                accept("=");
                s.radius = number();
                if (!s.radius) unrecognized(clause_, "expected a radius");
            } else if (accept("normal")) {
                accept_any({"vector", "direction"});
                s.normal = tuple();
                if (!s.normal) unrecognized(clause_, "expected a normal vector");
            } else if (accept("distance")) {
                accept_any({"from", "to"});
                accept("the");
                accept("origin");
                accept("of");
                s.distance = number();
                if (!s.distance) unrecognized(clause_, "expected a distance");
            } else if (accept("through")) {
                accept("the");
                s.through = point_ref_list();
                if (s.through.empty()) unrecognized(clause_, "expected points");
            } else {
                i_ = save;
                return;
            }
        }
    }

    /// A list of objects sharing (or switching) kinds, including the
    /// "S1, S2, S3 with centers at ... with radii of ..., respectively" form.
    std::vector<ObjSpec> objects(std::string kind = "") {
        std::vector<ObjSpec> out;
        while (true) {
            skip_fillers();
            int expected = 0;
            if (const Tok* t = peek(); t && t->kind == Tok::Word && count_word(t->low)) {
                expected = count_word(t->low);
                next();
            }
            if (const Tok* t = peek(); t && t->kind == Tok::Word && kind_nouns().count(t->low)) {
                kind = kind_nouns().at(t->low);
                next();
                if (kind == "point" && accept("pair")) kind = "point_pair";
            }
            (void)expected;
            ObjSpec s;
            s.kind = kind;
            if (at_name()) {
                s.name = peek()->text;
                next();
            }
            attributes(s);
            if (s.name.empty() && s.reference_only()) break;
            out.push_back(std::move(s));
            std::size_t save = i_;
            bool sep = accept_comma();
            sep = accept("and") || sep;
            std::size_t probe = i_;
            skip_fillers();
            bool more = sep && (at_name() || (peek() && peek()->kind == Tok::Word && kind_nouns().count(peek()->low)));
            i_ = probe;
            if (!more) {
                i_ = save;
                break;
            }
        }
        plural_attributes(out);
        return out;
    }

    void plural_attributes(std::vector<ObjSpec>& objs) {
        while (true) {
            std::size_t save = i_;
            while (accept_any({"with", "and", "having"}) || accept_comma()) {
            }
            accept("the");
            if (accept_any({"centers", "centres"})) {
                accept_any({"at", "of"});
                auto refs = point_ref_list();
                if (refs.size() != objs.size()) unrecognized(clause_, "number of centres does not match the objects");
                for (std::size_t k = 0; k < objs.size(); ++k) objs[k].center = refs[k];
            } else if (accept("radii")) {
                accept("of");
                auto vals = number_list();
                if (vals.size() != objs.size()) unrecognized(clause_, "number of radii does not match the objects");
                for (std::size_t k = 0; k < objs.size(); ++k) objs[k].radius = vals[k];
            } else if (accept("respectively")) {
            } else {
                i_ = save;
                return;
            }
        }
    }

private:
    std::vector<Tok> t_;
    std::size_t i_ = 0;
    std::string clause_;
    const std::map<std::string, Symbol>* symbols_;
};

// ---------------------------------------------------------------- colors

struct ColorRequest {
    std::vector<std::string> names;  // empty: the clause's primary results
    std::vector<std::string> colors;
};

script::ColorSpec named_color(const std::string& c) {
    script::ColorSpec spec;
    spec.kind = script::ColorSpec::Kind::Named;
    spec.name = lower(c);
    return spec;
}

std::vector<std::string> word_list(const std::string& s) {
    std::vector<std::string> out;
    static const std::regex word(R"([A-Za-z_][A-Za-z0-9_]*)");
    for (auto it = std::sregex_iterator(s.begin(), s.end(), word); it != std::sregex_iterator(); ++it) {
        std::string w = it->str();
        if (lower(w) != "and" && lower(w) != "respectively") out.push_back(w);
    }
    return out;
}

// Pulls color phrases out of a clause.
std::string extract_colors(std::string clause, std::vector<ColorRequest>& out) {
    static const std::regex tagged(R"(\(\s*colou?r\s*:\s*([A-Za-z]+)\s*\))", std::regex::icase);
    static const std::regex listed(
        R"(([A-Za-z][A-Za-z0-9_]*(?:\s*,\s*(?:and\s+)?[A-Za-z][A-Za-z0-9_]*|\s+and\s+[A-Za-z][A-Za-z0-9_]*)*)\s+(?:are|is)\s+(?:visuali[sz]ed|drawn|shown|displayed|colou?red)\s+in\s+([A-Za-z]+(?:\s*,\s*(?:and\s+)?[A-Za-z]+|\s+and\s+[A-Za-z]+)*)(?:\s*,?\s*respectively)?)",
        std::regex::icase);
    static const std::regex pronoun(
        R"((?:,?\s*and\s+)?(?:visuali[sz]e|draw|show|display|colou?r)\s+(?:them|it|the\s+result|the\s+results)\s+in\s+([A-Za-z]+))",
        std::regex::icase);
    static const std::regex bare(R"((?:,?\s*and\s+)?(?:visuali[sz]ed|drawn|shown)\s+in\s+([A-Za-z]+))", std::regex::icase);
    std::smatch m;
    while (std::regex_search(clause, m, tagged)) {
        out.push_back({{}, {m[1].str()}});
        clause = m.prefix().str() + " " + m.suffix().str();
    }
    while (std::regex_search(clause, m, listed)) {
        out.push_back({word_list(m[1].str()), word_list(m[2].str())});
        clause = m.prefix().str() + " " + m.suffix().str();
    }
    for (const auto* re : {&pronoun, &bare}) {
        while (std::regex_search(clause, m, *re)) {
            out.push_back({{}, {m[1].str()}});
            clause = m.prefix().str() + " " + m.suffix().str();
        }
    }
    return clause;
}

// ---------------------------------------------------------------- planner state

struct ClauseResult {
    std::vector<Call> calls;
    std::string intent;
};

class Planner {
public:
    Planner(PlanRequest req, const Registry& reg) : req_(std::move(req)), reg_(reg) {}

    Plan run();

private:
    // clause handlers
    ClauseResult create_clause(Cursor& c);
    ClauseResult operation_clause(Cursor& c, const std::string& clause_low);

    std::string materialize(const ObjSpec& s, std::vector<Call>& aux, std::vector<Call>& prim, const std::string& clause);
    std::string point_operand(const PointRef& r, std::vector<Call>& aux, const std::string& clause);
    std::vector<std::string> operands(Cursor& c, std::vector<Call>& aux, const std::string& clause,
                                      const std::string& kind_hint = "");
    std::vector<std::string> result_names(Cursor& c);
    std::string kind_of(const std::string& name) const;
    void declare(const std::string& name, const std::string& kind);
    std::string fresh(const std::string& kind) { return names_.allocate(kind); }

    void emit(const std::string& clause, ClauseResult result, const std::vector<ColorRequest>& colors);

    PlanRequest req_;
    const Registry& reg_;
    Plan plan_;
    NameAllocator names_;
    std::map<std::string, Symbol> symbols_;
    std::vector<std::string> order_;  // symbol creation order
    bool point_formula_ = false;
    bool first_cycle_ = true;
};

std::string Planner::kind_of(const std::string& name) const {
    auto it = symbols_.find(name);
    return it == symbols_.end() ? "" : it->second.kind;
}

void Planner::declare(const std::string& name, const std::string& kind) {
    if (!symbols_.count(name)) order_.push_back(name);
    symbols_[name] = {name, kind, ""};
    names_.reserve(name);
}

std::string Planner::point_operand(const PointRef& r, std::vector<Call>& aux, const std::string& clause) {
    if (!r.coords) {
        if (!symbols_.count(r.name)) unrecognized(clause, "'" + r.name + "' is not defined");
        return r.name;
    }
    std::string name = r.name.empty() ? fresh("point") : r.name;
    const auto& v = *r.coords;
    Call call{point_formula_ ? "createPointFormula" : "createPoint", {name}, "point",
              {{"x", v[0]}, {"y", v[1]}, {"z", v[2]}}, {}, false, name + " at " + tuple_text(v)};
    aux.push_back(call);
    declare(name, "point");
    return name;
}

std::string Planner::materialize(const ObjSpec& s, std::vector<Call>& aux, std::vector<Call>& prim,
                                 const std::string& clause) {
    if (s.reference_only()) {
        if (!symbols_.count(s.name)) unrecognized(clause, "'" + s.name + "' is not defined");
        return s.name;
    }
    std::string kind = s.kind.empty() ? "point" : s.kind;
    std::string name = s.name;
    auto need_name = [&](const std::string& k) {
        if (name.empty()) name = fresh(k);
    };
    Call call;
    call.primary = true;
    if ((kind == "point" || kind == "vector") && s.coords) {
        need_name(kind);
        const auto& v = *s.coords;
        call = {kind == "vector" ? "createVector" : (point_formula_ ? "createPointFormula" : "createPoint"),
                {name}, kind, {{"x", v[0]}, {"y", v[1]}, {"z", v[2]}}, {}, true, name + " at " + tuple_text(v)};
    } else if (kind == "sphere" && s.center && s.radius) {
        call.fn = "createSphere";
        call.kind = "sphere";
        std::string center_text;
        if (s.center->name.empty()) {
            const auto& v = *s.center->coords;
            call.values = {{"center.x", v[0]}, {"center.y", v[1]}, {"center.z", v[2]}};
            center_text = tuple_text(v);
        } else {
            std::string c = point_operand(*s.center, aux, clause);
            call.refs = {{"center", c}};
            center_text = c;
        }
        need_name("sphere");
        call.results = {name};
        call.values.push_back({"r", *s.radius});
        call.summary = name + " centred at " + center_text + " with radius " + util::short_number(*s.radius);
    } else if (kind == "sphere" && s.through.size() == 4) {
        call.fn = "createSphereFromPoints";
        call.kind = "sphere";
        const char* slots[] = {"a", "b", "c", "d"};
        std::string pts;
        for (int k = 0; k < 4; ++k) {
            std::string p = point_operand(s.through[k], aux, clause);
            call.refs.push_back({slots[k], p});
            pts += (k ? ", " : "") + p;
        }
        need_name("sphere");
        call.results = {name};
        call.summary = name + " through " + pts;
    } else if (kind == "plane" && s.normal && s.distance) {
        need_name("plane");
        const auto& n = *s.normal;
        call = {"createPlane", {name}, "plane", {{"nx", n[0]}, {"ny", n[1]}, {"nz", n[2]}, {"d", *s.distance}}, {}, true,
                name + " with normal " + tuple_text(n) + " and distance " + util::short_number(*s.distance)};
    } else if ((kind == "line" && s.through.size() == 2) || (kind == "circle" && s.through.size() == 3)) {
        call.fn = kind == "line" ? "createLine" : "createCircle";
        call.kind = kind;
        const char* slots[] = {"a", "b", "c"};
        std::string pts;
        for (std::size_t k = 0; k < s.through.size(); ++k) {
            std::string p = point_operand(s.through[k], aux, clause);
            call.refs.push_back({slots[k], p});
            pts += (k ? ", " : "") + p;
        }
        need_name(kind);
        call.results = {name};
        call.summary = name + " through " + pts;
    } else {
        unrecognized(clause, "incomplete description of " + kind + (s.name.empty() ? "" : " " + s.name));
    }
    declare(name, call.kind);
    prim.push_back(std::move(call));
    return name;
}

ClauseResult Planner::create_clause(Cursor& c) {
    c.next();  // the verb
    ClauseResult r;
    r.intent = "create";
    auto objs = c.objects();
    if (objs.empty()) unrecognized(c.clause(), "nothing to create");
    std::vector<Call> aux, prim;
    for (const auto& o : objs) {
        if (o.reference_only()) unrecognized(c.clause(), "incomplete description of " + o.name);
        materialize(o, aux, prim, c.clause());
    }
    r.calls = aux;
    r.calls.insert(r.calls.end(), prim.begin(), prim.end());
    return r;
}

std::vector<std::string> Planner::operands(Cursor& c, std::vector<Call>& aux, const std::string& clause,
                                           const std::string& kind_hint) {
    std::vector<std::string> out;
    // "the three balls", "both planes"
    std::size_t save = c.pos();
    c.skip_fillers();
    int count = 0;
    if (const Tok* t = c.peek(); t && t->kind == Tok::Word && count_word(t->low)) {
        count = count_word(t->low);
        c.next();
    }
    if (const Tok* t = c.peek(); count && t && t->kind == Tok::Word && kind_nouns().count(t->low) && !c.at_name(1) &&
                                 !(c.peek(1) && c.peek(1)->kind == Tok::Tuple)) {
        std::string kind = kind_nouns().at(t->low);
        c.next();
        for (auto it = order_.rbegin(); it != order_.rend() && static_cast<int>(out.size()) < count; ++it)
            if (symbols_.at(*it).kind == kind) out.insert(out.begin(), *it);
        if (static_cast<int>(out.size()) != count)
            unrecognized(clause, "fewer than " + std::to_string(count) + " " + kind + "s defined");
        return out;
    }
    c.seek(save);
    std::vector<Call> prim;
    for (const auto& o : c.objects(kind_hint)) out.push_back(materialize(o, aux, prim, clause));
    // Inline definitions are helpers of the operation, not its result.
    for (auto& p : prim) p.primary = false;
    aux.insert(aux.end(), prim.begin(), prim.end());
    return out;
}

std::vector<std::string> Planner::result_names(Cursor& c) {
    std::vector<std::string> out;
    std::size_t save = c.pos();
    if (c.accept("to")) {
        if (!c.accept_any({"get", "obtain", "produce", "give"})) {
            c.seek(save);
            return out;
        }
    } else if (!c.accept_any({"as", "named", "called", "giving", "yielding", "into"})) {
        return out;
    }
    c.skip_fillers();
    c.accept_any({"new", "result"});
    if (const Tok* t = c.peek(); t && t->kind == Tok::Word && kind_nouns().count(t->low)) {
        c.next();
        c.accept("pair");
    }
    while (c.at_name()) {
        out.push_back(c.peek()->text);
        c.next();
        std::size_t s2 = c.pos();
        c.accept_comma();
        c.accept("and");
        if (!c.at_name()) {
            c.seek(s2);
            break;
        }
    }
    return out;
}

struct SimpleOp {
    std::vector<std::string> phrase;
    std::string fn;
    int arity;
    std::string kind;  // "" = same as first operand
};

const std::vector<SimpleOp>& simple_ops() {
    static const std::vector<SimpleOp> ops = {
        {{"geometric", "product"}, "geometricProduct", 2, "multivector"},
        {{"outer", "product"}, "outerProduct", 2, "multivector"},
        {{"wedge", "product"}, "outerProduct", 2, "multivector"},
        {{"inner", "product"}, "innerProduct", 2, "multivector"},
        {{"dot", "product"}, "innerProduct", 2, "multivector"},
        {{"left", "contraction"}, "innerProduct", 2, "multivector"},
        {{"sum"}, "add", 2, "multivector"},
        {{"difference"}, "subtract", 2, "multivector"},
        {{"quotient"}, "divide", 2, "multivector"},
        {{"reverse"}, "reverse", 1, ""},
        {{"reversion"}, "reverse", 1, ""},
        {{"dual"}, "dual", 1, "multivector"},
        {{"inverse"}, "inverse", 1, ""},
        {{"negation"}, "negate", 1, ""},
        {{"negative"}, "negate", 1, ""},
        {{"square", "root"}, "squareRoot", 1, "scalar"},
        {{"absolute", "value"}, "absolute", 1, "scalar"},
        {{"norm"}, "norm", 1, "scalar"},
        {{"magnitude"}, "norm", 1, "scalar"},
        {{"length"}, "norm", 1, "scalar"},
        {{"radius"}, "sphereRadius", 1, "scalar"},
        {{"distance"}, "distance", 2, "scalar"},
    };
    return ops;
}

bool match_phrase(const Cursor& c, std::size_t at, const std::vector<std::string>& phrase) {
    for (std::size_t k = 0; k < phrase.size(); ++k)
        if (!c.is_word(at + k, phrase[k])) return false;
    return true;
}

ClauseResult Planner::operation_clause(Cursor& c, const std::string& low) {
    ClauseResult r;
    std::vector<Call> aux;
    const std::string& clause = c.clause();
    auto finish = [&](Call op) {
        op.primary = true;
        r.calls = aux;
        r.calls.push_back(std::move(op));
    };
    auto scan_to = [&](std::initializer_list<std::string_view> words) {
        while (!c.done()) {
            for (auto w : words)
                if (c.is_word(0, w)) return true;
            c.next();
        }
        return false;
    };
    static const std::regex angle_re(R"((-?\d+(?:\.\d+)?)\s*(degrees?|deg|°|radians?|rad)?)", std::regex::icase);

    if (std::regex_search(low, std::regex(R"(\b(intersect|intersection|intersecting|meet)\b)"))) {
        r.intent = "intersect";
        std::vector<std::string> results, o;
        std::string noun;
        scan_to({"intersect", "intersection", "meet"});
        bool verb_form = !c.done() && c.peek()->low != "intersection";
        c.next();
        if (verb_form) {
            // "intersect A, B and C to get the points x4 and x5"
            o = operands(c, aux, clause);
            static const std::regex noun_re(R"(\b(to|as|into)\b.*\b(points|point pair|circle|line)\b)");
            std::smatch m;
            if (std::regex_search(low, m, noun_re)) noun = m[2].str();
            results = result_names(c);
        } else {
            // "the intersection points x4 and x5 of A, B and C"
            if (c.accept("points")) {
                noun = "points";
            } else if (c.accept("point")) {
                noun = c.accept("pair") ? "point pair" : "point";
            } else if (c.accept("circle")) {
                noun = "circle";
            } else if (c.accept("line")) {
                noun = "line";
            }
            while (c.at_name()) {
                results.push_back(c.peek()->text);
                c.next();
                c.accept_comma();
                c.accept("and");
            }
            if (!c.accept_any({"of", "between"})) unrecognized(clause, "expected the intersected objects after 'of'");
            o = operands(c, aux, clause);
            auto more = result_names(c);
            results.insert(results.end(), more.begin(), more.end());
        }
        std::string kind = noun == "circle" ? "circle" : noun == "line" ? "line" : noun == "point pair" ? "point_pair" : "";
        bool two_points = noun == "points" || results.size() == 2;
        if (o.size() == 2) {
            if (kind.empty()) kind = "multivector";
            if (results.empty()) results = {fresh(kind)};
            finish({"intersect", {results[0]}, kind, {}, {{"a", o[0]}, {"b", o[1]}}, true,
                    results[0] + " = meet of " + o[0] + " and " + o[1]});
        } else if (o.size() == 3 && two_points) {
            while (results.size() < 2) results.push_back(fresh("point"));
            std::vector<std::string> pair = {results[0], results[1]};
            bool spheres = std::all_of(o.begin(), o.end(), [&](const std::string& n) { return kind_of(n) == "sphere"; });
            if (spheres) {
                finish({"intersectThreeSpheres", pair, "point", {}, {{"a", o[0]}, {"b", o[1]}, {"c", o[2]}}, true,
                        pair[0] + ", " + pair[1] + " = intersection points of " + o[0] + ", " + o[1] + ", " + o[2]});
            } else {
                std::string pp = fresh("point_pair");
                declare(pp, "point_pair");
                aux.push_back({"intersectThree", {pp}, "point_pair", {}, {{"a", o[0]}, {"b", o[1]}, {"c", o[2]}}, false,
                               pp + " = meet of " + o[0] + ", " + o[1] + ", " + o[2]});
                finish({"splitPointPair", pair, "point", {}, {{"pp", pp}}, true, pair[0] + ", " + pair[1] + " = points of " + pp});
            }
        } else if (o.size() == 3) {
            if (results.empty()) results = {fresh("point_pair")};
            finish({"intersectThree", {results[0]}, "point_pair", {}, {{"a", o[0]}, {"b", o[1]}, {"c", o[2]}}, true,
                    results[0] + " = meet of " + o[0] + ", " + o[1] + ", " + o[2]});
        } else {
            unrecognized(clause, "an intersection needs two or three objects");
        }
        for (const auto& call : r.calls)
            if (call.primary)
                for (const auto& n : call.results) declare(n, call.kind);
        return r;
    }

    auto rest_after = [&](const std::string& word) {
        std::size_t p = low.find(word);
        return p == std::string::npos ? std::string() : low.substr(p + word.size());
    };
    auto declare_results = [&]() {
        for (const auto& call : r.calls)
            if (call.primary)
                for (const auto& n : call.results) declare(n, call.kind);
    };
    auto result_or_fresh = [&](std::vector<std::string> names, const std::string& kind) {
        return names.empty() ? fresh(kind) : names[0];
    };

    if (c.accept_any({"translate", "move", "shift", "displace"})) {
        r.intent = "translate";
        auto o = operands(c, aux, clause);
        if (o.size() != 1) unrecognized(clause, "translate one object at a time");
        if (!c.accept_any({"by", "along"})) unrecognized(clause, "expected 'by (dx, dy, dz)'");
        c.accept_any({"the", "vector", "offset"});
        auto t = c.tuple();
        if (!t) unrecognized(clause, "expected an offset triple");
        std::string out = result_or_fresh(result_names(c), kind_of(o[0]));
        finish({"translate", {out}, kind_of(o[0]), {{"tx", (*t)[0]}, {"ty", (*t)[1]}, {"tz", (*t)[2]}}, {{"obj", o[0]}}, true,
                out + " = " + o[0] + " translated by " + tuple_text(*t)});
        declare_results();
        return r;
    }
    if (c.accept("rotate")) {
        r.intent = "rotate";
        auto o = operands(c, aux, clause);
        if (o.size() != 1) unrecognized(clause, "rotate one object at a time");
        std::string after = rest_after(" by ");
        std::smatch m;
        if (after.empty() || !std::regex_search(after, m, angle_re)) unrecognized(clause, "expected 'by <angle>'");
        double angle = std::stod(m[1].str());
        std::string unit = m[2].str();
        if (unit.empty() || unit[0] == 'd' || unit == "°") angle = angle * M_PI / 180.0;
        struct PlaneWord {
            const char* re;
            const char* fn;
            double sign;
        };
        static const PlaneWord planes[] = {
            {R"(\be1\s*\^?\s*e2\b|\bxy[- ]plane|\bz[- ]axis)", "rotateXY", 1},
            {R"(\be2\s*\^?\s*e1\b|\byx[- ]plane)", "rotateXY", -1},
            {R"(\be2\s*\^?\s*e3\b|\byz[- ]plane|\bx[- ]axis)", "rotateYZ", 1},
            {R"(\be3\s*\^?\s*e2\b|\bzy[- ]plane)", "rotateYZ", -1},
            {R"(\be3\s*\^?\s*e1\b|\bzx[- ]plane|\by[- ]axis)", "rotateZX", 1},
            {R"(\be1\s*\^?\s*e3\b|\bxz[- ]plane)", "rotateZX", -1},
        };
        const PlaneWord* plane = nullptr;
        for (const auto& p : planes)
            if (std::regex_search(low, std::regex(p.re))) {
                plane = &p;
                break;
            }
        if (!plane) unrecognized(clause, "expected a rotation plane (e1e2, e2e3, e3e1) or axis");
        scan_to({"to", "as", "named", "called", "giving"});
        std::string out = result_or_fresh(result_names(c), kind_of(o[0]));
        finish({plane->fn, {out}, kind_of(o[0]), {{"angle", plane->sign * angle}}, {{"obj", o[0]}}, true,
                out + " = " + o[0] + " rotated by " + util::short_number(plane->sign * angle) + " rad"});
        declare_results();
        return r;
    }
    if (c.accept_any({"reflect", "mirror"})) {
        r.intent = "reflect";
        auto o = operands(c, aux, clause);
        if (o.size() != 1) unrecognized(clause, "reflect one object at a time");
        if (!c.accept_any({"in", "across", "through", "about"})) unrecognized(clause, "expected 'in <plane>'");
        auto m = operands(c, aux, clause, "plane");
        if (m.size() != 1 || kind_of(m[0]) != "plane") unrecognized(clause, "the mirror must be a plane");
        std::string out = result_or_fresh(result_names(c), kind_of(o[0]));
        finish({"reflect", {out}, kind_of(o[0]), {}, {{"obj", o[0]}, {"plane", m[0]}}, true,
                out + " = " + o[0] + " mirrored in " + m[0]});
        declare_results();
        return r;
    }
    if (c.accept("project")) {
        r.intent = "project";
        auto a = operands(c, aux, clause);
        if (a.size() != 1 || !c.accept_any({"onto", "on"})) unrecognized(clause, "expected 'project A onto B'");
        auto b = operands(c, aux, clause);
        if (b.size() != 1) unrecognized(clause, "expected one target for the projection");
        std::string out = result_or_fresh(result_names(c), "multivector");
        finish({"project", {out}, "multivector", {}, {{"a", a[0]}, {"b", b[0]}}, true,
                out + " = projection of " + a[0] + " onto " + b[0]});
        declare_results();
        return r;
    }
    if (c.accept_any({"normalize", "normalise"})) {
        r.intent = "normalize";
        auto o = operands(c, aux, clause);
        if (o.size() != 1) unrecognized(clause, "normalize one object at a time");
        std::string out = result_or_fresh(result_names(c), kind_of(o[0]));
        finish({"normalize", {out}, kind_of(o[0]), {}, {{"a", o[0]}}, true, out + " = " + o[0] + " / |" + o[0] + "|"});
        declare_results();
        return r;
    }
    if (c.accept_any({"scale", "multiply"})) {
        r.intent = "scale";
        auto o = operands(c, aux, clause);
        if (o.size() != 1 || !c.accept("by")) unrecognized(clause, "expected 'scale A by k'");
        auto k = c.number();
        if (!k) unrecognized(clause, "expected a scale factor");
        std::string out = result_or_fresh(result_names(c), kind_of(o[0]));
        finish({"scalarMultiple", {out}, kind_of(o[0]), {{"k", *k}}, {{"a", o[0]}}, true,
                out + " = " + util::short_number(*k) + " " + o[0]});
        declare_results();
        return r;
    }

    // "compute the <op> [NAME] of A [and B]"
    for (std::size_t at = c.pos(); at < c.pos() + 64; ++at) {
        if (!c.peek(at - c.pos())) break;
        for (const auto& op : simple_ops()) {
            if (!match_phrase(c, at - c.pos(), op.phrase)) continue;
            r.intent = op.fn;
            c.seek(at + op.phrase.size());
            std::vector<std::string> results;
            while ((c.at_name() || (c.peek() && c.peek()->kind == Tok::Word && !keywords().count(c.peek()->low) &&
                                    (c.is_word(1, "of") || c.is_word(1, "between")))) &&
                   !c.is_word(0, "of")) {
                results.push_back(c.peek()->text);
                c.next();
            }
            if (!c.accept_any({"of", "between", "from"})) unrecognized(clause, "expected 'of' after the operation");
            auto o = operands(c, aux, clause);
            auto more = result_names(c);
            results.insert(results.end(), more.begin(), more.end());
            if (static_cast<int>(o.size()) != op.arity)
                unrecognized(clause, op.fn + " takes " + std::to_string(op.arity) + " operand(s)");
            std::string fn = op.fn;
            std::vector<std::pair<std::string, std::string>> refs;
            if (fn == "distance" && (kind_of(o[0]) == "plane" || kind_of(o[1]) == "plane")) {
                fn = "pointPlaneDistance";
                bool plane_first = kind_of(o[0]) == "plane";
                refs = {{"p", o[plane_first ? 1 : 0]}, {"plane", o[plane_first ? 0 : 1]}};
            } else if (fn == "sphereRadius") {
                refs = {{"s", o[0]}};
            } else {
                const char* slots[] = {"a", "b"};
                for (std::size_t k = 0; k < o.size(); ++k) refs.push_back({slots[k], o[k]});
            }
            std::string kind = op.kind.empty() ? kind_of(o[0]) : op.kind;
            std::string out = result_or_fresh(results, kind);
            std::string args;
            for (std::size_t k = 0; k < o.size(); ++k) args += (k ? ", " : "") + o[k];
            finish({fn, {out}, kind, {}, refs, true, out + " = " + fn + "(" + args + ")"});
            declare_results();
            return r;
        }
    }
    unrecognized(clause, "no known operation");
}

// ---------------------------------------------------------------- emission

std::string task_label(const std::string& fn, std::size_t n) {
    static const std::map<std::string, std::string> labels = {
        {"createPoint", "Create point"},           {"createPointFormula", "Create point"},
        {"createVector", "Create vector"},         {"createSphere", "Create sphere"},
        {"createSphereBuiltin", "Create sphere"},  {"createSphereFromPoints", "Create sphere"},
        {"createPlane", "Create plane"},           {"createLine", "Create line"},
        {"createCircle", "Create circle"},         {"intersect", "Intersect"},
        {"intersectThree", "Intersect"},           {"intersectThreeSpheres", "Intersect spheres"},
        {"splitPointPair", "Split point pair"},    {"translate", "Translate"},
        {"rotateXY", "Rotate"},                    {"rotateYZ", "Rotate"},
        {"rotateZX", "Rotate"},                    {"reflect", "Reflect"},
        {"project", "Project"},                    {"normalize", "Normalize"},
        {"norm", "Norm"},                          {"distance", "Distance"},
        {"pointPlaneDistance", "Distance"},        {"sphereRadius", "Sphere radius"},
        {"geometricProduct", "Geometric product"}, {"outerProduct", "Outer product"},
        {"innerProduct", "Inner product"},         {"add", "Sum"},
        {"subtract", "Difference"},                {"divide", "Quotient"},
        {"scalarMultiple", "Scale"},               {"reverse", "Reverse"},
        {"dual", "Dual"},                          {"inverse", "Inverse"},
        {"negate", "Negate"},                      {"squareRoot", "Square root"},
        {"absolute", "Absolute value"}};
    auto it = labels.find(fn);
    std::string label = it == labels.end() ? fn : it->second;
    if (n > 1 && label.rfind("Create ", 0) == 0) label += "s";
    return label;
}

void Planner::emit(const std::string& clause, ClauseResult result, const std::vector<ColorRequest>& colors) {
    // Primary results receive untargeted colors.
    std::vector<std::string> primary;
    for (const auto& call : result.calls)
        if (call.primary) primary.insert(primary.end(), call.results.begin(), call.results.end());

    std::size_t k = 0;
    while (k < result.calls.size()) {
        std::size_t end = k + 1;
        while (end < result.calls.size() && result.calls[end].fn == result.calls[k].fn &&
               result.calls[end].primary == result.calls[k].primary)
            ++end;
        const FunctionSpec* fn = reg_.find(result.calls[k].fn);
        if (!fn) throw Error("NoMatchingFunction", "registry has no function " + result.calls[k].fn);
        SubtaskRecord rec;
        rec.task_id = "t" + std::to_string(plan_.subtasks.size() + 1);
        rec.operation = fn->name;
        rec.category = fn->category;
        rec.code_language = req_.language;
        rec.ga_type = req_.space;
        bool single = end - k == 1;
        std::string desc;
        std::set<std::string> deps;
        for (std::size_t j = k; j < end; ++j) {
            const Call& call = result.calls[j];
            const std::string key = single ? "" : call.results[0] + ".";
            for (const auto& n : call.results) rec.variable_names.push_back(n);
            for (const auto& [p, v] : call.values) rec.specific_values[key + p] = v;
            for (const auto& [p, v] : call.refs) {
                rec.references[key + p] = v;
                deps.insert(symbols_.at(v).task_id);
            }
            desc += (desc.empty() ? "" : "; ") + call.summary;
        }
        std::string names;
        for (const auto& n : rec.variable_names) names += (names.empty() ? "" : ", ") + n;
        rec.task_name = task_label(fn->name, rec.variable_names.size()) + " " + names;
        rec.task_description = desc + ".";
        for (const auto& s : plan_.subtasks)
            if (deps.count(s.task_id)) rec.depends_on.push_back(s.task_id);
        for (const auto& n : rec.variable_names) symbols_[n].task_id = rec.task_id;

        // ReAct cycle for this subtask
        std::string obs;
        if (first_cycle_) {
            obs = "Request";
            if (!req_.formula.empty()) obs += " with formula " + req_.formula;
            obs += " in " + req_.space + ", output " + req_.language + ". ";
            first_cycle_ = false;
        }
        obs += "Clause \"" + clause + "\" matches intent '" + result.intent + "'";
        if (!single || !result.calls[k].primary) obs += (result.calls[k].primary ? "" : " (helper objects)");
        obs += ".";
        plan_.trace.add(Phase::Observation, obs);
        std::string thought = "Use " + fn->name + " (" + std::string(to_string(fn->category)) + ") for " + names;
        if (!rec.depends_on.empty()) {
            std::string d;
            for (const auto& x : rec.depends_on) d += (d.empty() ? "" : ", ") + x;
            thought += ", reusing results of " + d;
        }
        plan_.trace.add(Phase::Thoughts, thought + ".");
        plan_.trace.add(Phase::Action, "Emit " + rec.task_id + ": " + rec.task_name + ".");
        plan_.subtasks.push_back(std::move(rec));
        k = end;
    }

    auto add_color = [&](const std::string& var, const std::string& color) {
        for (auto& s : plan_.subtasks) {
            if (std::find(s.variable_names.begin(), s.variable_names.end(), var) == s.variable_names.end()) continue;
            auto it = std::find_if(s.visualization.begin(), s.visualization.end(),
                                   [&](const VisualSetting& v) { return v.variable == var; });
            if (it != s.visualization.end()) {
                it->color = named_color(color);
            } else {
                s.visualization.push_back({var, named_color(color)});
            }
            return;
        }
        unrecognized(clause, "cannot color unknown object " + var);
    };
    for (const auto& cr : colors) {
        if (cr.names.empty()) {
            for (const auto& v : primary) add_color(v, cr.colors[0]);
        } else if (cr.colors.size() == 1) {
            for (const auto& v : cr.names) add_color(v, cr.colors[0]);
        } else if (cr.colors.size() == cr.names.size()) {
            for (std::size_t j = 0; j < cr.names.size(); ++j) add_color(cr.names[j], cr.colors[j]);
        } else {
            unrecognized(clause, "number of colors does not match the objects");
        }
    }
}

std::vector<std::string> split_clauses(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        if (ch == '(') ++depth;
        if (ch == ')') depth = std::max(0, depth - 1);
        bool end = depth == 0 && (ch == ';' || (ch == '.' && (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))));
        if (end) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    // ", then" and " then " separate clauses as well
    std::vector<std::string> split;
    static const std::regex then_re(R"(\s*(?:,\s*|\s+and\s+)?\bthen\b\s*,?\s*)", std::regex::icase);
    for (const auto& s : out) {
        std::sregex_token_iterator it(s.begin(), s.end(), then_re, -1), end;
        for (; it != end; ++it) {
            std::string t = trim(it->str());
            if (!t.empty()) split.push_back(t);
        }
    }
    return split;
}

bool is_create_verb(const std::string& w) {
    static const std::set<std::string> verbs = {"create", "construct", "define", "build", "make", "generate", "draw", "add"};
    return verbs.count(w) > 0;
}

Plan Planner::run() {
    std::string text = req_.description;
    if (trim(text).empty()) throw Error("UnrecognizedIntent", "empty task description");
    plan_.source = req_;

    // Formula segments: "$...$" and a leading "Visualization formula ...:".
    static const std::regex math(R"(\$([^$]*)\$)");
    std::smatch m;
    // "$p_1(4,5,6)$" names an object inline; anything else is the formula.
    static const std::regex inline_name(R"(^\s*([A-Za-z]+)(?:_\{?([0-9]+)\}?)?\s*(\([^()]*\))?\s*$)");
    std::string rebuilt;
    while (std::regex_search(text, m, math)) {
        std::smatch n;
        std::string inner = m[1].str();
        rebuilt += m.prefix().str();
        if (std::regex_match(inner, n, inline_name)) {
            rebuilt += n[1].str() + n[2].str() + (n[3].matched ? " " + n[3].str() : "");
        } else if (plan_.source.formula.empty()) {
            plan_.source.formula = trim(inner);
        }
        text = m.suffix().str();
    }
    text = rebuilt + text;
    static const std::regex formula_prefix(R"(^\s*(?:visuali[sz]ation\s+)?formula\s*:?\s*([^:]*?)\s*:\s*)", std::regex::icase);
    if (std::regex_search(text, m, formula_prefix)) {
        if (plan_.source.formula.empty()) plan_.source.formula = trim(m[1].str());
        text = m.suffix().str();
    }
    static const std::regex language_re(R"(\bI\s+(?:need|want)\s+(python|json[- ]?ir)\s+code\b\.?)", std::regex::icase);
    if (std::regex_search(text, m, language_re)) {
        plan_.source.language = lower(m[1].str()).find("json") == 0 ? "json-ir" : "python";
        text = m.prefix().str() + m.suffix().str();
    }
    static const std::regex space_re(R"(\bin\s+(conformal|euclidean)\s+space\s*,?\s*)", std::regex::icase);
    if (std::regex_search(text, m, space_re)) {
        plan_.source.space = lower(m[1].str()) == "euclidean" ? "euclid3d" : "cga3d";
        text = m.prefix().str() + m.suffix().str();
    }
    req_ = plan_.source;
    std::string f = plan_.source.formula;
    f.erase(std::remove_if(f.begin(), f.end(), [](char ch) { return ch == ' ' || ch == '{' || ch == '}' || ch == '\\'; }),
            f.end());
    point_formula_ = (f.find("e_0") != std::string::npos || f.find("e0") != std::string::npos) &&
                     f.find("x^2") != std::string::npos;

    // Every name-like word in the request is off limits for generated names.
    for (const auto& t : tokenize(text))
        if (t.kind == Tok::Word && looks_like_name(t.text)) names_.reserve(t.text);

    for (std::string clause : split_clauses(text)) {
        static const std::regex lead(R"(^(?:finally|then|next|first|second|third|lastly|and|also|please)\b\s*,?\s*)",
                                     std::regex::icase);
        clause = std::regex_replace(clause, lead, "");
        if (clause.empty()) continue;
        std::vector<ColorRequest> colors;
        std::string body = trim(extract_colors(clause, colors));
        if (body.empty()) {
            if (colors.empty()) continue;
            unrecognized(clause, "color without an object");
        }
        Cursor c(tokenize(body), clause, &symbols_);
        c.skip_fillers();
        ClauseResult r;
        const Tok* first = c.peek();
        if (!first) continue;
        std::string low = lower(body);
        bool op_words = std::regex_search(low, std::regex(R"(\b(intersect|intersection|meet)\b)"));
        if (first->kind == Tok::Word && is_create_verb(first->low) && !op_words) {
            r = create_clause(c);
        } else {
            if (first->kind == Tok::Word &&
                (first->low == "compute" || first->low == "calculate" || first->low == "find" ||
                 first->low == "determine" || first->low == "get" || first->low == "evaluate" || is_create_verb(first->low)))
                c.next();
            c.skip_fillers();
            r = operation_clause(c, low);
        }
        emit(clause, std::move(r), colors);
    }
    if (plan_.subtasks.empty()) throw Error("UnrecognizedIntent", "no task found in \"" + req_.description + "\"");
    check_plan(plan_);
    return plan_;
}

} // namespace

Plan plan(const PlanRequest& request, const Registry& registry) {
    return Planner(request, registry).run();
}

} // namespace gavis::agents
