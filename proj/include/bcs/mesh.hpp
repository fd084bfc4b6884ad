#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bcs/csg.hpp"
#include "bcs/linalg.hpp"
#include "bcs/source.hpp"

namespace bcs {

/// Triangle mesh in millimetres. face_source[i] is the id of the primitive leaf that produced
/// triangle i.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<NodeId> face_source;

    bool empty() const { return triangles.empty(); }
    std::size_t triangle_count() const { return triangles.size(); }

    void append(const Mesh& other) {
        const auto base = static_cast<std::uint32_t>(vertices.size());
        vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
        for (const auto& t : other.triangles) triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
        face_source.insert(face_source.end(), other.face_source.begin(), other.face_source.end());
    }

    std::array<Vec3, 3> corners(std::size_t tri) const {
        const auto& t = triangles[tri];
        return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
    }
    Vec3 normal(std::size_t tri) const {
        const auto c = corners(tri);
        return normalized(cross(c[1] - c[0], c[2] - c[0]));
    }
};

struct BoundingBox {
    Vec3 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
    Vec3 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};

    bool empty() const { return min.x > max.x; }
    void add(Vec3 p) {
        min = {std::min(min.x, p.x), std::min(min.y, p.y), std::min(min.z, p.z)};
        max = {std::max(max.x, p.x), std::max(max.y, p.y), std::max(max.z, p.z)};
    }
    bool overlaps(const BoundingBox& o, double margin) const {
        if (empty() || o.empty()) return false;
        return min.x <= o.max.x + margin && o.min.x <= max.x + margin && min.y <= o.max.y + margin &&
               o.min.y <= max.y + margin && min.z <= o.max.z + margin && o.min.z <= max.z + margin;
    }
};

inline BoundingBox bounds(const Mesh& m) {
    BoundingBox b;
    for (const auto& t : m.triangles)
        for (auto i : t) b.add(m.vertices[i]);
    return b;
}

/// Sum of signed tetrahedron volumes against the origin.
inline double mesh_volume(const Mesh& m) {
    double v = 0;
    for (std::size_t i = 0; i < m.triangles.size(); ++i) {
        const auto c = m.corners(i);
        v += dot(c[0], cross(c[1], c[2]));
    }
    return v / 6.0;
}

/// Every undirected edge is used by exactly two triangles, once in each direction.
inline bool is_watertight(const Mesh& m) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
    for (const auto& t : m.triangles)
        for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
    for (const auto& [edge, count] : directed) {
        if (count != 1) return false;
        const auto back = directed.find({edge.second, edge.first});
        if (back == directed.end() || back->second != 1) return false;
    }
    return true;
}

/// Applies an affine transform; mirrored transforms reverse the winding so normals stay outward.
inline Mesh transformed(Mesh m, const Mat4& matrix) {
    if (matrix.is_identity()) return m;
    for (Vec3& v : m.vertices) v = matrix.apply(v);
    if (matrix.linear().determinant() < 0)
        for (auto& t : m.triangles) std::swap(t[1], t[2]);
    return m;
}

class GeometryError : public Error {
public:
    explicit GeometryError(const std::string& message, std::optional<SourceSpan> span = std::nullopt)
        : Error("geometry_error", message), span_(span) {}
    const std::optional<SourceSpan>& span() const { return span_; }

private:
    std::optional<SourceSpan> span_;
};

namespace detail {

inline std::string fmt_number(double v) {
    std::string s = std::to_string(v);
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
}

inline void require_positive(double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v))
        throw GeometryError(std::string("non-positive dimension: ") + name + " = " + fmt_number(v));
}

inline Mesh tessellate_cube(Vec3 size, bool center) {
    require_positive(size.x, "size[0]");
    require_positive(size.y, "size[1]");
    require_positive(size.z, "size[2]");
    const Vec3 o = center ? size * -0.5 : Vec3{};
    Mesh m;
    for (int i = 0; i < 8; ++i)
        m.vertices.push_back({o.x + ((i & 1) ? size.x : 0), o.y + ((i & 2) ? size.y : 0), o.z + ((i & 4) ? size.z : 0)});
    // Corner bit layout: 1 = +x, 2 = +y, 4 = +z. Faces wound counter-clockwise seen from outside.
    m.triangles = {{0, 2, 3}, {0, 3, 1}, {4, 5, 7}, {4, 7, 6}, {0, 1, 5}, {0, 5, 4},
                   {2, 6, 7}, {2, 7, 3}, {0, 4, 6}, {0, 6, 2}, {1, 3, 7}, {1, 7, 5}};
    return m;
}

/// UV sphere: fn longitudes, max(2, fn/2) latitude bands, welded poles.
inline Mesh tessellate_sphere(double r, int fn) {
    require_positive(r, "r");
    fn = std::max(3, fn);
    const int bands = std::max(2, fn / 2);
    Mesh m;
    m.vertices.push_back({0, 0, r});
    for (int k = 1; k < bands; ++k) {
        const double phi = 180.0 * k / bands;
        const double z = r * cos_deg(phi), ring = r * sin_deg(phi);
        for (int j = 0; j < fn; ++j) {
            const double theta = 360.0 * j / fn;
            m.vertices.push_back({ring * cos_deg(theta), ring * sin_deg(theta), z});
        }
    }
    m.vertices.push_back({0, 0, -r});
    const auto north = 0u;
    const auto south = static_cast<std::uint32_t>(m.vertices.size() - 1);
    auto at = [fn](int ring, int j) { return static_cast<std::uint32_t>(1 + ring * fn + (j % fn)); };
    for (int j = 0; j < fn; ++j) m.triangles.push_back({north, at(0, j), at(0, j + 1)});
    for (int k = 0; k + 1 < bands - 1; ++k)
        for (int j = 0; j < fn; ++j) {
            m.triangles.push_back({at(k, j), at(k + 1, j), at(k + 1, j + 1)});
            m.triangles.push_back({at(k, j), at(k + 1, j + 1), at(k, j + 1)});
        }
    for (int j = 0; j < fn; ++j) m.triangles.push_back({at(bands - 2, j), south, at(bands - 2, j + 1)});
    return m;
}

/// fn-gon frustum with fan caps; a zero radius collapses that end to a single apex.
inline Mesh tessellate_cylinder(double h, double r1, double r2, bool center, int fn) {
    require_positive(h, "h");
    if (r1 < 0 || !std::isfinite(r1)) throw GeometryError("non-positive dimension: r1 = " + fmt_number(r1));
    if (r2 < 0 || !std::isfinite(r2)) throw GeometryError("non-positive dimension: r2 = " + fmt_number(r2));
    if (r1 == 0 && r2 == 0) throw GeometryError("non-positive dimension: r = 0");
    fn = std::max(3, fn);
    const double z0 = center ? -h / 2 : 0, z1 = z0 + h;
    Mesh m;
    auto ring = [&](double r, double z) -> std::vector<std::uint32_t> {
        std::vector<std::uint32_t> idx;
        if (r == 0) {
            m.vertices.push_back({0, 0, z});
            idx.assign(static_cast<std::size_t>(fn), static_cast<std::uint32_t>(m.vertices.size() - 1));
            return idx;
        }
        for (int j = 0; j < fn; ++j) {
            const double theta = 360.0 * j / fn;
            m.vertices.push_back({r * cos_deg(theta), r * sin_deg(theta), z});
            idx.push_back(static_cast<std::uint32_t>(m.vertices.size() - 1));
        }
        return idx;
    };
    const auto bottom = ring(r1, z0);
    const auto top = ring(r2, z1);
    for (int j = 0; j < fn; ++j) {
        const auto a = bottom[static_cast<std::size_t>(j)], b = bottom[static_cast<std::size_t>((j + 1) % fn)];
        const auto c = top[static_cast<std::size_t>((j + 1) % fn)], d = top[static_cast<std::size_t>(j)];
        if (r1 > 0) m.triangles.push_back({a, b, c});
        if (r2 > 0) m.triangles.push_back({a, c, d});
    }
    if (r1 > 0)
        for (int j = 1; j + 1 < fn; ++j)
            m.triangles.push_back({bottom[0], bottom[static_cast<std::size_t>(j + 1)], bottom[static_cast<std::size_t>(j)]});
    if (r2 > 0)
        for (int j = 1; j + 1 < fn; ++j)
            m.triangles.push_back({top[0], top[static_cast<std::size_t>(j)], top[static_cast<std::size_t>(j + 1)]});
    return m;
}

}  // namespace detail

/// Tessellates a primitive leaf in its local coordinates; `fn` overrides the node's segment count.
inline Mesh tessellate(const CsgNode& prim, std::optional<int> fn = std::nullopt) {
    Mesh m;
    const int segments = fn.value_or(static_cast<int>(prim.number("fn", kDefaultFn)));
    switch (prim.kind) {
        case CsgKind::PrimCube: m = detail::tessellate_cube(prim.vec("size"), prim.flag("center")); break;
        case CsgKind::PrimSphere: m = detail::tessellate_sphere(prim.number("r"), segments); break;
        case CsgKind::PrimCylinder:
            m = detail::tessellate_cylinder(prim.number("h"), prim.number("r1"), prim.number("r2"), prim.flag("center"),
                                            segments);
            break;
        default: throw GeometryError(std::string("not a primitive: ") + to_string(prim.kind));
    }
    m.face_source.assign(m.triangles.size(), prim.id);
    return m;
}

}  // namespace bcs
