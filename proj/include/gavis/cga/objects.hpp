#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gavis/algebra/multivector.hpp"
#include "gavis/cga/construct.hpp"

namespace gavis::cga {

struct EuclidPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    EuclidPoint operator-(const EuclidPoint& o) const { return {x - o.x, y - o.y, z - o.z}; }
    EuclidPoint operator+(const EuclidPoint& o) const { return {x + o.x, y + o.y, z + o.z}; }
    EuclidPoint operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const EuclidPoint& o) const { return x * o.x + y * o.y + z * o.z; }
    double length() const;
};

double distance(const EuclidPoint& a, const EuclidPoint& b);

enum class ObjectKind { Point, PointPair, Line, Circle, Plane, Sphere, Unknown };

std::string to_string(ObjectKind kind);

struct PointParams { EuclidPoint p; };
struct SphereParams { EuclidPoint center; double radius = 0.0; };
struct PlaneParams { EuclidPoint normal; double d = 0.0; };
struct LineParams { EuclidPoint point; EuclidPoint direction; };
struct CircleParams { EuclidPoint center; EuclidPoint normal; double radius = 0.0; };
struct PointPairParams { EuclidPoint p1; EuclidPoint p2; };

using ObjectParams = std::variant<std::monostate, PointParams, SphereParams, PlaneParams,
                                  LineParams, CircleParams, PointPairParams>;

struct ClassifiedObject {
    ObjectKind kind = ObjectKind::Unknown;
    ObjectParams params;
};

/// Whether a multivector is read as an inner- or outer-product null space.
enum class Representation { Ipns, Opns };

Mv e(int i);  // e(1) .. e(5) in cga3d
Mv einf();
Mv eo();
Mv vector(const EuclidPoint& v);

Mv embed_point(const EuclidPoint& p);
/// Throws NotAPoint for zero e0 weight or a non-null normalised vector.
EuclidPoint extract_point(const Mv& point);

Mv sphere_ipns(const EuclidPoint& center, double r);
/// Throws DegenerateInput for a zero normal.
Mv plane_ipns(const EuclidPoint& normal, double d);
/// P1 ^ P2 ^ einf; throws DegenerateInput for coincident points.
Mv line_opns(const EuclidPoint& p1, const EuclidPoint& p2);
/// P1 ^ P2 ^ P3; throws DegenerateInput for collinear points.
Mv circle_opns(const EuclidPoint& p1, const EuclidPoint& p2, const EuclidPoint& p3);

Mv translator(const EuclidPoint& t);
/// exp(-angle/2 * plane_bivector).
Mv rotor(const Mv& plane_bivector, double angle);
/// -M a M^-1 for odd mirrors, M a M^-1 for even ones.
Mv reflect(const Mv& a, const Mv& mirror);
/// (a . b) b^-1.
Mv project(const Mv& a, const Mv& b);

/// IPNS meet: wedge of all inputs (2 or 3 objects).
Mv intersect_ipns(const std::vector<Mv>& objects);

/// Splits a grade-3 IPNS point pair. Throws ImaginaryPair when the objects do
/// not intersect; a tangent pair returns the same point twice.
std::pair<EuclidPoint, EuclidPoint> point_pair_split(const Mv& pair_ipns);

/// Kind and decoded parameters; never throws (Unknown is the fallback).
ClassifiedObject classify(const Mv& mv, Representation rep = Representation::Ipns);

} // namespace gavis::cga
