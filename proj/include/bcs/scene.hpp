#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "bcs/boolean.hpp"
#include "bcs/csg.hpp"
#include "bcs/mesh.hpp"

namespace bcs {

enum class Highlight { target, impacted };

inline const char* to_string(Highlight h) { return h == Highlight::target ? "target" : "impacted"; }

/// World-space mesh of one top-level statement result.
struct Part {
    NodeId node_id;
    Mesh mesh;
};

/// Semi-transparent copy of an operand that a difference or intersection hid.
struct GhostPart {
    NodeId source_subtree;
    NodeId operation;
    Highlight classification = Highlight::target;
    Mat4 world_matrix;
    Mesh mesh;
};

struct Scene {
    std::vector<Part> parts;
    std::vector<GhostPart> ghosts;

    std::size_t triangle_count() const {
        std::size_t n = 0;
        for (const Part& p : parts) n += p.mesh.triangle_count();
        return n;
    }
};

/// Memoized meshes of CSG subtrees, each expressed in its parent's frame.
class MeshBuilder {
public:
    explicit MeshBuilder(const CsgTree& tree, std::optional<int> fn = std::nullopt) : tree_(tree), fn_(fn) {}

    const Mesh& mesh_of(std::size_t index) {
        if (const auto it = cache_.find(index); it != cache_.end()) return it->second;
        // Explicit post-order so deep trees do not exhaust the stack.
        std::vector<std::pair<std::size_t, bool>> stack{{index, false}};
        while (!stack.empty()) {
            auto [cur, expanded] = stack.back();
            stack.pop_back();
            if (cache_.count(cur)) continue;
            const CsgNode& node = tree_.at(cur);
            if (!expanded) {
                stack.push_back({cur, true});
                for (auto it = node.children.rbegin(); it != node.children.rend(); ++it)
                    if (!cache_.count(*it)) stack.push_back({*it, false});
                continue;
            }
            cache_.emplace(cur, build(cur));
        }
        return cache_.at(index);
    }

    /// Subtree mesh placed in world coordinates by the accumulated matrix at `frame_index`.
    Mesh world_mesh(std::size_t index, std::size_t frame_index) {
        return transformed(mesh_of(index), tree_.world_matrix(frame_index));
    }

private:
    Mesh build(std::size_t index) {
        const CsgNode& node = tree_.at(index);
        Mesh local;
        if (is_primitive(node.kind)) {
            try {
                local = tessellate(node, fn_);
            } catch (const GeometryError& e) {
                throw GeometryError(e.what(), tree_.ast().node(node.ast_id).span);
            }
        } else if (node.kind == CsgKind::Difference || node.kind == CsgKind::Intersection) {
            std::vector<Mesh> operands;
            for (const auto& group : boolean_operands(tree_, index)) {
                std::vector<Mesh> parts;
                for (std::size_t c : group) parts.push_back(cache_.at(c));
                operands.push_back(csg_combine(BooleanOp::Union, parts));
            }
            local = csg_combine(node.kind == CsgKind::Difference ? BooleanOp::Difference : BooleanOp::Intersection,
                                operands);
        } else {
            std::vector<Mesh> parts;
            for (std::size_t c : node.children) parts.push_back(cache_.at(c));
            local = csg_combine(BooleanOp::Union, parts);
        }
        return transformed(std::move(local), node.matrix);
    }

    const CsgTree& tree_;
    std::optional<int> fn_;
    std::unordered_map<std::size_t, Mesh> cache_;
};

/// One part per child of the root, in world coordinates.
inline Scene compute_scene(MeshBuilder& builder, const CsgTree& tree) {
    Scene scene;
    for (std::size_t c : tree.root().children) scene.parts.push_back({tree.at(c).id, builder.mesh_of(c)});
    return scene;
}

inline Scene compute_scene(const CsgTree& tree, std::optional<int> fn = std::nullopt) {
    MeshBuilder builder(tree, fn);
    return compute_scene(builder, tree);
}

inline GhostPart make_ghost(MeshBuilder& builder, const CsgTree& tree, std::size_t operand, Highlight cls) {
    const std::size_t op = *tree.at(operand).parent;
    GhostPart g;
    g.source_subtree = tree.at(operand).id;
    g.operation = tree.at(op).id;
    g.classification = cls;
    g.world_matrix = tree.world_matrix(op);
    g.mesh = transformed(builder.mesh_of(operand), g.world_matrix);
    return g;
}

struct Hit {
    NodeId leaf_id;
    double t = 0;
    Vec3 point;
    bool is_ghost = false;
    NodeId part_id;
};

namespace detail {

/// Möller–Trumbore, two-sided. Returns the ray parameter of the hit.
inline std::optional<double> ray_triangle(Vec3 o, Vec3 d, Vec3 a, Vec3 b, Vec3 c) {
    constexpr double eps = 1e-12;
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 p = cross(d, e2);
    const double det = dot(e1, p);
    if (std::abs(det) < eps) return std::nullopt;
    const double inv = 1.0 / det;
    const Vec3 s = o - a;
    const double u = dot(s, p) * inv;
    if (u < -1e-12 || u > 1 + 1e-12) return std::nullopt;
    const Vec3 q = cross(s, e1);
    const double v = dot(d, q) * inv;
    if (v < -1e-12 || u + v > 1 + 1e-12) return std::nullopt;
    const double t = dot(e2, q) * inv;
    if (t < 0) return std::nullopt;
    return t;
}

}  // namespace detail

/// Nearest triangle along the ray over parts and ghosts. At equal distance a solid part wins.
inline std::optional<Hit> pick(const Scene& scene, Vec3 origin, Vec3 direction) {
    if (!(length(direction) > 0)) throw Error("bad_request", "ray direction must be nonzero");
    const Vec3 d = normalized(direction);
    std::optional<Hit> best;
    auto visit = [&](const Mesh& m, const NodeId& part, bool ghost) {
        for (std::size_t i = 0; i < m.triangles.size(); ++i) {
            const auto c = m.corners(i);
            const auto t = detail::ray_triangle(origin, d, c[0], c[1], c[2]);
            if (!t) continue;
            const bool closer = !best || *t < best->t - 1e-9 || (std::abs(*t - best->t) <= 1e-9 && best->is_ghost && !ghost);
            if (closer) best = Hit{m.face_source[i], *t, origin + d * *t, ghost, part};
        }
    };
    for (const Part& p : scene.parts) visit(p.mesh, p.node_id, false);
    for (const GhostPart& g : scene.ghosts) visit(g.mesh, g.source_subtree, true);
    return best;
}

enum class StlFormat { ascii, binary };

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_f32(std::string& out, double d) {
    const auto f = static_cast<float>(d);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    put_u32(out, bits);
}

}  // namespace detail

/// STL of every non-ghost part. Binary output is little-endian regardless of host.
inline std::string export_stl(const Scene& scene, StlFormat format) {
    std::vector<std::array<Vec3, 4>> facets;
    for (const Part& p : scene.parts)
        for (std::size_t i = 0; i < p.mesh.triangles.size(); ++i) {
            const auto c = p.mesh.corners(i);
            facets.push_back({p.mesh.normal(i), c[0], c[1], c[2]});
        }
    std::string out;
    if (format == StlFormat::binary) {
        std::string header = "bcs binary stl";
        header.resize(80, '\0');
        out = header;
        detail::put_u32(out, static_cast<std::uint32_t>(facets.size()));
        for (const auto& f : facets) {
            for (const Vec3& v : f) {
                detail::put_f32(out, std::isfinite(v.x) ? v.x : 0);
                detail::put_f32(out, std::isfinite(v.y) ? v.y : 0);
                detail::put_f32(out, std::isfinite(v.z) ? v.z : 0);
            }
            out.push_back('\0');
            out.push_back('\0');
        }
        return out;
    }
    std::ostringstream os;
    os.precision(9);
    os << "solid bcs\n";
    for (const auto& f : facets) {
        const Vec3 n = std::isfinite(f[0].x) ? f[0] : Vec3{};
        os << "  facet normal " << n.x << ' ' << n.y << ' ' << n.z << "\n    outer loop\n";
        for (int k = 1; k < 4; ++k) os << "      vertex " << f[k].x << ' ' << f[k].y << ' ' << f[k].z << '\n';
        os << "    endloop\n  endfacet\n";
    }
    os << "endsolid bcs\n";
    return os.str();
}

}  // namespace bcs
