#include "gavis/cga/objects.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace gavis::cga {

namespace {

constexpr double kNullTolerance = 1e-9;
constexpr double kFlatTolerance = 1e-9;
constexpr double kTangentTolerance = 1e-12;

Space space() { return cga3d(); }

double max_coeff(const Mv& m) {
    double worst = 0.0;
    for (const auto& [b, c] : m.terms()) worst = std::max(worst, std::abs(c));
    return worst;
}

// Drops coefficients that are round-off relative to the largest one.
Mv cleaned(const Mv& m) {
    double scale = max_coeff(m);
    Mv out(m.space());
    for (const auto& [b, c] : m.terms())
        if (std::abs(c) > 1e-10 * std::max(1.0, scale)) out.add_term(b, c);
    return out;
}

EuclidPoint euclid_part(const Mv& v) { return {v[Blade(1)], v[Blade(2)], v[Blade(4)]}; }

// Coefficient of einf when a vector is written over e1, e2, e3, einf, e0.
double einf_coordinate(const Mv& v) { return 0.5 * (v[kEPlus] + v[kEMinus]); }

// -einf . v: the e0 weight of a vector.
double weight(const Mv& v) { return -lcont(einf(), v).scalar_part(); }

std::optional<SphereParams> decode_round_vector(const Mv& v) {
    double w = weight(v);
    if (std::abs(w) <= kZeroTolerance) return std::nullopt;
    Mv s = v * (1.0 / w);
    double r2 = gp(s, s).scalar_part();
    if (r2 < -kNullTolerance) return std::nullopt;
    return SphereParams{euclid_part(s), std::sqrt(std::max(r2, 0.0))};
}

EuclidPoint normalized(const EuclidPoint& p) {
    double len = p.length();
    return len > 0 ? p * (1.0 / len) : p;
}

ClassifiedObject classify_vector(const Mv& v) {
    double w = weight(v);
    if (std::abs(w) > kZeroTolerance) {
        Mv s = v * (1.0 / w);
        double sq = gp(s, s).scalar_part();
        if (std::abs(sq) <= kNullTolerance) return {ObjectKind::Point, PointParams{euclid_part(s)}};
        if (sq > 0) return {ObjectKind::Sphere, SphereParams{euclid_part(s), std::sqrt(sq)}};
        return {};
    }
    EuclidPoint n = euclid_part(v);
    double len = n.length();
    if (len <= kZeroTolerance) return {};
    return {ObjectKind::Plane, PlaneParams{n * (1.0 / len), einf_coordinate(v) / len}};
}

bool is_flat(const Mv& opns) {
    Mv w = wedge(opns, einf());
    return max_coeff(w) <= kFlatTolerance * std::max(1.0, max_coeff(opns));
}

// Direct line L = m ^ einf + e0 ^ d ^ einf with moment m = p ^ d.
ClassifiedObject decode_line(const Mv& line) {
    Mv d_mv = -lcont(eo(), lcont(einf(), line));
    EuclidPoint d = euclid_part(d_mv);
    double len2 = d.dot(d);
    if (len2 <= kZeroTolerance) return {};
    Mv contracted = lcont(eo(), line);
    Mv moment(space());
    for (const auto& [b, c] : contracted.terms())
        if (b.grade() == 2 && (b.bits & ~7u) == 0) moment.add_term(b, -c);
    Mv dv = vector(d);
    EuclidPoint support = euclid_part(grade_part(gp(moment, dv), 1)) * (1.0 / len2);
    return {ObjectKind::Line, LineParams{support, normalized(d)}};
}

ClassifiedObject classify_bivector(const Mv& c_ipns) {
    Mv k = dual(c_ipns);
    if (is_flat(k)) return decode_line(k);
    Mv plane = dual(wedge(k, einf()));
    double p2 = gp(plane, plane).scalar_part();
    if (std::abs(p2) <= kZeroTolerance) return {};
    Mv carrier = grade_part(gp(c_ipns, plane), 1) * (1.0 / p2);
    auto sphere = decode_round_vector(carrier);
    if (!sphere) return {};
    EuclidPoint n = normalized(euclid_part(plane));
    return {ObjectKind::Circle, CircleParams{sphere->center, n, sphere->radius}};
}

} // namespace

double EuclidPoint::length() const { return std::sqrt(dot(*this)); }

double distance(const EuclidPoint& a, const EuclidPoint& b) { return (a - b).length(); }

std::string to_string(ObjectKind kind) {
    switch (kind) {
        case ObjectKind::Point: return "point";
        case ObjectKind::PointPair: return "point_pair";
        case ObjectKind::Line: return "line";
        case ObjectKind::Circle: return "circle";
        case ObjectKind::Plane: return "plane";
        case ObjectKind::Sphere: return "sphere";
        case ObjectKind::Unknown: return "unknown";
    }
    return "unknown";
}

Mv e(int i) { return Mv::basis_vector(space(), i - 1); }
Mv einf() { return cga::einf<double>(space()); }
Mv eo() { return cga::eo<double>(space()); }
Mv vector(const EuclidPoint& v) { return euclid_vector<double>(space(), v.x, v.y, v.z); }

Mv embed_point(const EuclidPoint& p) { return cga::embed_point<double>(space(), p.x, p.y, p.z); }

EuclidPoint extract_point(const Mv& point) {
    Mv v = cleaned(point);
    if (!v.is_homogeneous(1)) throw Error("NotAPoint", "a point must be a grade-1 multivector");
    double w = weight(v);
    if (std::abs(w) <= kZeroTolerance) throw Error("NotAPoint", "vector has zero e0 weight");
    Mv s = v * (1.0 / w);
    if (std::abs(gp(s, s).scalar_part()) > kNullTolerance) {
        throw Error("NotAPoint", "vector is not null after normalization");
    }
    return euclid_part(s);
}

Mv sphere_ipns(const EuclidPoint& center, double r) { return cga::sphere_ipns<double>(embed_point(center), r); }

Mv plane_ipns(const EuclidPoint& normal, double d) {
    if (normal.length() <= kZeroTolerance) throw Error("DegenerateInput", "plane normal is zero");
    return cga::plane_ipns<double>(space(), normal.x, normal.y, normal.z, d);
}

Mv line_opns(const EuclidPoint& p1, const EuclidPoint& p2) {
    if (distance(p1, p2) <= kZeroTolerance) throw Error("DegenerateInput", "line through coincident points");
    return wedge(wedge(embed_point(p1), embed_point(p2)), einf());
}

Mv circle_opns(const EuclidPoint& p1, const EuclidPoint& p2, const EuclidPoint& p3) {
    EuclidPoint a = p2 - p1, b = p3 - p1;
    EuclidPoint cross{a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
    if (cross.length() <= kZeroTolerance) throw Error("DegenerateInput", "circle through collinear points");
    return wedge(wedge(embed_point(p1), embed_point(p2)), embed_point(p3));
}

Mv translator(const EuclidPoint& t) { return cga::translator<double>(space(), t.x, t.y, t.z); }

Mv rotor(const Mv& plane_bivector, double angle) { return exp_bivector(plane_bivector * (-angle / 2.0)); }

Mv reflect(const Mv& a, const Mv& mirror) {
    Mv r = sandwich(mirror, a);
    bool odd = !mirror.is_zero() && std::all_of(mirror.terms().begin(), mirror.terms().end(),
                                                [](const auto& t) { return t.first.grade() % 2 == 1; });
    return odd ? -r : r;
}

Mv project(const Mv& a, const Mv& b) { return gp(lcont(a, b), inverse(b)); }

Mv intersect_ipns(const std::vector<Mv>& objects) {
    if (objects.size() < 2 || objects.size() > 3) {
        throw Error("DegenerateInput", "intersection takes two or three objects");
    }
    Mv out = objects[0];
    for (std::size_t i = 1; i < objects.size(); ++i) out = wedge(out, objects[i]);
    return out;
}

std::pair<EuclidPoint, EuclidPoint> point_pair_split(const Mv& pair_ipns) {
    Mv t = dual(cleaned(pair_ipns));
    double disc = gp(t, t).scalar_part();
    if (disc < -kTangentTolerance) throw Error("ImaginaryPair", "the objects do not intersect");
    Mv denom = inverse(-lcont(einf(), t));
    if (disc <= kTangentTolerance) {
        EuclidPoint p = extract_point(gp(t, denom));
        return {p, p};
    }
    Mv root = Mv::scalar(space(), std::sqrt(disc));
    return {extract_point(gp(t + root, denom)), extract_point(gp(t - root, denom))};
}

ClassifiedObject classify(const Mv& mv, Representation rep) {
    try {
        Mv v = cleaned(mv);
        if (v.is_zero() || !v.space() || v.signature().dimension() != 5) return {};
        if (rep == Representation::Opns) return classify(dual(v), Representation::Ipns);
        int g = v.max_grade();
        if (!v.is_homogeneous(g)) return {};
        switch (g) {
            case 1: return classify_vector(v);
            case 2: return classify_bivector(v);
            case 3: {
                Mv t = dual(v);
                if (is_flat(t)) return {};
                auto [p1, p2] = point_pair_split(v);
                return {ObjectKind::PointPair, PointPairParams{p1, p2}};
            }
            default: return {};
        }
    } catch (const Error&) {
        return {};
    }
}

} // namespace gavis::cga
