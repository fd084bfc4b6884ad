#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "bcs/linalg.hpp"
#include "bcs/mesh.hpp"

namespace bcs {

enum class BooleanOp { Union, Difference, Intersection };

inline const char* to_string(BooleanOp op) {
    switch (op) {
        case BooleanOp::Union: return "union";
        case BooleanOp::Difference: return "difference";
        case BooleanOp::Intersection: return "intersection";
    }
    return "?";
}

/// Distance under which a point counts as lying on a splitting plane, in millimetres.
inline constexpr double kPlaneEpsilon = 1e-5;

namespace detail {

struct Plane {
    Vec3 normal;
    double w = 0;

    Plane flipped() const { return {-normal, -w}; }
    double distance(Vec3 p) const { return dot(normal, p) - w; }
};

struct Polygon {
    std::vector<Vec3> vertices;
    Plane plane;
    std::uint32_t tag = 0;

    void flip() {
        std::reverse(vertices.begin(), vertices.end());
        plane = plane.flipped();
    }
};

using PolygonList = std::vector<Polygon>;

enum : int { kCoplanar = 0, kFront = 1, kBack = 2, kSpanning = 3 };

/// Splits `poly` by `plane`. Coplanar polygons go to the front or back list by facing.
inline void split_polygon(const Plane& plane, Polygon&& poly, PolygonList& coplanar_front,
                          PolygonList& coplanar_back, PolygonList& front, PolygonList& back) {
    int polygon_type = 0;
    thread_local std::vector<int> types;
    types.clear();
    for (const Vec3& v : poly.vertices) {
        const double t = plane.distance(v);
        const int type = t < -kPlaneEpsilon ? kBack : (t > kPlaneEpsilon ? kFront : kCoplanar);
        polygon_type |= type;
        types.push_back(type);
    }
    switch (polygon_type) {
        case kCoplanar:
            (dot(plane.normal, poly.plane.normal) > 0 ? coplanar_front : coplanar_back).push_back(std::move(poly));
            return;
        case kFront: front.push_back(std::move(poly)); return;
        case kBack: back.push_back(std::move(poly)); return;
        default: break;
    }
    Polygon f{{}, poly.plane, poly.tag};
    Polygon b{{}, poly.plane, poly.tag};
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = (i + 1) % n;
        const int ti = types[i], tj = types[j];
        const Vec3 vi = poly.vertices[i], vj = poly.vertices[j];
        if (ti != kBack) f.vertices.push_back(vi);
        if (ti != kFront) b.vertices.push_back(vi);
        if ((ti | tj) == kSpanning) {
            const double t = (plane.w - dot(plane.normal, vi)) / dot(plane.normal, vj - vi);
            const Vec3 v = lerp(vi, vj, t);
            f.vertices.push_back(v);
            b.vertices.push_back(v);
        }
    }
    if (f.vertices.size() >= 3) front.push_back(std::move(f));
    if (b.vertices.size() >= 3) back.push_back(std::move(b));
}

/// BSP tree stored in an arena; built and traversed without recursion.
class BspTree {
public:
    explicit BspTree(const PolygonList& polygons) {
        if (polygons.empty()) return;
        nodes_.push_back({});
        std::vector<std::pair<int, PolygonList>> work;
        work.emplace_back(0, polygons);
        while (!work.empty()) {
            auto [index, polys] = std::move(work.back());
            work.pop_back();
            if (!nodes_[static_cast<std::size_t>(index)].has_plane) {
                nodes_[static_cast<std::size_t>(index)].plane = polys.front().plane;
                nodes_[static_cast<std::size_t>(index)].has_plane = true;
            }
            const Plane plane = nodes_[static_cast<std::size_t>(index)].plane;
            PolygonList coplanar, front, back;
            for (Polygon& p : polys) split_polygon(plane, std::move(p), coplanar, coplanar, front, back);
            if (!front.empty()) {
                if (nodes_[static_cast<std::size_t>(index)].front < 0) {
                    nodes_[static_cast<std::size_t>(index)].front = static_cast<int>(nodes_.size());
                    nodes_.push_back({});
                }
                work.emplace_back(nodes_[static_cast<std::size_t>(index)].front, std::move(front));
            }
            if (!back.empty()) {
                if (nodes_[static_cast<std::size_t>(index)].back < 0) {
                    nodes_[static_cast<std::size_t>(index)].back = static_cast<int>(nodes_.size());
                    nodes_.push_back({});
                }
                work.emplace_back(nodes_[static_cast<std::size_t>(index)].back, std::move(back));
            }
        }
    }

    bool empty() const { return nodes_.empty(); }

    /// Removes the parts of `polygons` inside the solid. With `inverted`, the tree is read as its
    /// complement, so the parts outside the solid are removed instead.
    PolygonList clip(PolygonList polygons, bool inverted) const {
        if (nodes_.empty()) return polygons;
        PolygonList out;
        std::vector<std::pair<int, PolygonList>> work;
        work.emplace_back(0, std::move(polygons));
        while (!work.empty()) {
            auto [index, polys] = std::move(work.back());
            work.pop_back();
            const Node& node = nodes_[static_cast<std::size_t>(index)];
            const Plane plane = inverted ? node.plane.flipped() : node.plane;
            const int front_child = inverted ? node.back : node.front;
            const int back_child = inverted ? node.front : node.back;
            PolygonList front, back;
            for (Polygon& p : polys) split_polygon(plane, std::move(p), front, back, front, back);
            if (front_child >= 0) {
                if (!front.empty()) work.emplace_back(front_child, std::move(front));
            } else {
                for (Polygon& p : front) out.push_back(std::move(p));
            }
            if (back_child >= 0 && !back.empty()) work.emplace_back(back_child, std::move(back));
        }
        return out;
    }

private:
    struct Node {
        Plane plane;
        bool has_plane = false;
        int front = -1;
        int back = -1;
    };
    std::vector<Node> nodes_;
};

struct Solid {
    PolygonList polygons;
    BoundingBox box;
};

inline BoundingBox polygon_bounds(const Polygon& p) {
    BoundingBox b;
    for (const Vec3& v : p.vertices) b.add(v);
    return b;
}

inline Solid flipped(Solid s) {
    for (Polygon& p : s.polygons) p.flip();
    return s;
}

/// Clips against another solid's tree. Polygons clear of that solid's box skip the tree: they are
/// outside it, so they are kept by a normal tree and dropped by an inverted one.
inline PolygonList clip_against(const PolygonList& polys, const BspTree& tree, const BoundingBox& other_box,
                                bool inverted) {
    PolygonList near, out;
    for (const Polygon& p : polys) {
        if (polygon_bounds(p).overlaps(other_box, 10 * kPlaneEpsilon)) near.push_back(p);
        else if (!inverted) out.push_back(p);
    }
    PolygonList clipped = tree.clip(std::move(near), inverted);
    for (Polygon& p : clipped) out.push_back(std::move(p));
    return out;
}

inline void flip_all(PolygonList& polys) {
    for (Polygon& p : polys) p.flip();
}

inline PolygonList concat(PolygonList a, PolygonList b) {
    for (Polygon& p : b) a.push_back(std::move(p));
    return a;
}

inline Solid make_solid(PolygonList polys) {
    Solid s;
    s.polygons = std::move(polys);
    for (const Polygon& p : s.polygons)
        for (const Vec3& v : p.vertices) s.box.add(v);
    return s;
}

inline Solid boolean_pair(BooleanOp op, const Solid& a, const Solid& b) {
    const bool overlap = a.box.overlaps(b.box, 10 * kPlaneEpsilon);
    switch (op) {
        case BooleanOp::Union: {
            if (!overlap || a.polygons.empty() || b.polygons.empty())
                return make_solid(concat(a.polygons, b.polygons));
            const BspTree ta(a.polygons), tb(b.polygons);
            PolygonList a1 = clip_against(a.polygons, tb, b.box, false);
            PolygonList b1 = clip_against(b.polygons, ta, a.box, false);
            flip_all(b1);
            PolygonList b2 = clip_against(b1, ta, a.box, false);
            flip_all(b2);
            return make_solid(concat(std::move(a1), std::move(b2)));
        }
        case BooleanOp::Difference: {
            if (!overlap || a.polygons.empty() || b.polygons.empty()) return a;
            const BspTree ta(a.polygons), tb(b.polygons);
            PolygonList abar = a.polygons;
            flip_all(abar);
            // Tree of the flipped A is the inverted tree of A.
            PolygonList a1 = clip_against(abar, tb, b.box, false);
            PolygonList b1 = clip_against(b.polygons, ta, a.box, true);
            flip_all(b1);
            PolygonList b2 = clip_against(b1, ta, a.box, true);
            flip_all(b2);
            PolygonList result = concat(std::move(a1), std::move(b2));
            flip_all(result);
            return make_solid(std::move(result));
        }
        case BooleanOp::Intersection: {
            if (!overlap || a.polygons.empty() || b.polygons.empty()) return {};
            const BspTree ta(a.polygons), tb(b.polygons);
            PolygonList abar = a.polygons;
            flip_all(abar);
            PolygonList b1 = clip_against(b.polygons, ta, a.box, true);
            flip_all(b1);
            PolygonList a1 = clip_against(abar, tb, b.box, true);
            PolygonList b2 = clip_against(b1, ta, a.box, true);
            PolygonList result = concat(std::move(a1), std::move(b2));
            flip_all(result);
            return make_solid(std::move(result));
        }
    }
    return {};
}

inline Solid to_solid(const Mesh& m, std::unordered_map<std::string, std::uint32_t>& interned,
                      std::vector<std::string>& table) {
    PolygonList polys;
    polys.reserve(m.triangles.size());
    for (std::size_t i = 0; i < m.triangles.size(); ++i) {
        const auto c = m.corners(i);
        const Vec3 n = cross(c[1] - c[0], c[2] - c[0]);
        const double len = length(n);
        if (!(len > 1e-12)) continue;
        Polygon p;
        p.vertices = {c[0], c[1], c[2]};
        p.plane.normal = n / len;
        p.plane.w = dot(p.plane.normal, c[0]);
        const std::string& src = i < m.face_source.size() ? m.face_source[i] : std::string();
        auto [it, fresh] = interned.try_emplace(src, static_cast<std::uint32_t>(table.size()));
        if (fresh) table.push_back(src);
        p.tag = it->second;
        polys.push_back(std::move(p));
    }
    return make_solid(std::move(polys));
}

struct Vec3Hash {
    std::size_t operator()(const Vec3& v) const {
        std::size_t h = 0;
        for (double d : {v.x, v.y, v.z}) {
            std::uint64_t bits;
            std::memcpy(&bits, &d, sizeof bits);
            h ^= std::hash<std::uint64_t>{}(bits) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};
struct Vec3Eq {
    bool operator()(const Vec3& a, const Vec3& b) const { return a.x == b.x && a.y == b.y && a.z == b.z; }
};

/// Fan-triangulates convex polygons, welding vertices with identical coordinates.
inline Mesh to_mesh(const PolygonList& polys, const std::vector<std::string>& table) {
    Mesh m;
    std::unordered_map<Vec3, std::uint32_t, Vec3Hash, Vec3Eq> index;
    auto vertex = [&](Vec3 v) {
        if (v.x == 0) v.x = 0;
        if (v.y == 0) v.y = 0;
        if (v.z == 0) v.z = 0;
        auto [it, fresh] = index.try_emplace(v, static_cast<std::uint32_t>(m.vertices.size()));
        if (fresh) m.vertices.push_back(v);
        return it->second;
    };
    for (const Polygon& p : polys) {
        std::vector<std::uint32_t> idx;
        for (const Vec3& v : p.vertices) {
            const auto i = vertex(v);
            if (idx.empty() || idx.back() != i) idx.push_back(i);
        }
        while (idx.size() > 1 && idx.back() == idx.front()) idx.pop_back();
        for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
            m.triangles.push_back({idx[0], idx[k], idx[k + 1]});
            m.face_source.push_back(table[p.tag]);
        }
    }
    return m;
}

}  // namespace detail

/// Boolean combination of closed meshes. Difference subtracts every later input from the first.
/// Face tags follow the input face each output face was cut from.
inline Mesh csg_combine(BooleanOp op, const std::vector<Mesh>& inputs) {
    if (inputs.empty()) return {};
    if (inputs.size() == 1) return inputs.front();

    // Disjoint unions keep the input triangles untouched.
    if (op == BooleanOp::Union) {
        std::vector<BoundingBox> boxes;
        for (const Mesh& m : inputs) boxes.push_back(bounds(m));
        bool disjoint = true;
        for (std::size_t i = 0; i < boxes.size() && disjoint; ++i)
            for (std::size_t j = i + 1; j < boxes.size() && disjoint; ++j)
                if (boxes[i].overlaps(boxes[j], 10 * kPlaneEpsilon)) disjoint = false;
        if (disjoint) {
            Mesh out;
            for (const Mesh& m : inputs) out.append(m);
            return out;
        }
    }

    std::unordered_map<std::string, std::uint32_t> interned;
    std::vector<std::string> table;
    detail::Solid acc = detail::to_solid(inputs.front(), interned, table);
    for (std::size_t i = 1; i < inputs.size(); ++i) {
        if (acc.polygons.empty() && op != BooleanOp::Union) break;
        acc = detail::boolean_pair(op, acc, detail::to_solid(inputs[i], interned, table));
    }
    return detail::to_mesh(acc.polygons, table);
}

}  // namespace bcs
