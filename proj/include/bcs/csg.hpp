#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "bcs/ast.hpp"
#include "bcs/linalg.hpp"
#include "bcs/source.hpp"
#include "bcs/value.hpp"

namespace bcs {

enum class CsgKind {
    PrimCube,
    PrimSphere,
    PrimCylinder,
    Translate,
    Rotate,
    Scale,
    Union,
    Difference,
    Intersection,
    Group,
};

inline const char* to_string(CsgKind k) {
    switch (k) {
        case CsgKind::PrimCube: return "PrimCube";
        case CsgKind::PrimSphere: return "PrimSphere";
        case CsgKind::PrimCylinder: return "PrimCylinder";
        case CsgKind::Translate: return "Translate";
        case CsgKind::Rotate: return "Rotate";
        case CsgKind::Scale: return "Scale";
        case CsgKind::Union: return "Union";
        case CsgKind::Difference: return "Difference";
        case CsgKind::Intersection: return "Intersection";
        case CsgKind::Group: return "Group";
    }
    return "?";
}

inline bool is_primitive(CsgKind k) {
    return k == CsgKind::PrimCube || k == CsgKind::PrimSphere || k == CsgKind::PrimCylinder;
}
inline bool is_transform(CsgKind k) { return k == CsgKind::Translate || k == CsgKind::Rotate || k == CsgKind::Scale; }
inline bool is_ghosting(CsgKind k) { return k == CsgKind::Difference || k == CsgKind::Intersection; }

using ParamValue = std::variant<double, bool, Vec3>;

/// Segment count for spheres and cylinders when $fn is not given.
inline constexpr int kDefaultFn = 32;

/// Path id of a node: dot-joined child indices from the root; the root itself is "".
using NodeId = std::string;

/// Evaluated scene-tree node. Children and parent are indices into the owning tree.
struct CsgNode {
    NodeId id;
    CsgKind kind = CsgKind::Group;
    std::vector<std::pair<std::string, ParamValue>> params;
    Mat4 matrix;
    AstId ast_id = 0;
    std::vector<AstId> call_stack;
    Taint taint;
    std::vector<std::size_t> children;
    std::optional<std::size_t> parent;
    std::string label;

    const ParamValue* param(std::string_view name) const {
        for (const auto& [k, v] : params)
            if (k == name) return &v;
        return nullptr;
    }
    double number(std::string_view name, double fallback = 0) const {
        const ParamValue* p = param(name);
        return p && std::holds_alternative<double>(*p) ? std::get<double>(*p) : fallback;
    }
    bool flag(std::string_view name) const {
        const ParamValue* p = param(name);
        return p && std::holds_alternative<bool>(*p) && std::get<bool>(*p);
    }
    Vec3 vec(std::string_view name) const {
        const ParamValue* p = param(name);
        return p && std::holds_alternative<Vec3>(*p) ? std::get<Vec3>(*p) : Vec3{};
    }
};

/// Immutable evaluated tree. Node 0 is the root Group.
class CsgTree {
public:
    CsgTree(Ast ast, std::vector<CsgNode> nodes, std::unordered_map<AstId, Taint> expression_taint,
            std::vector<Diagnostic> warnings)
        : ast_(std::move(ast)),
          nodes_(std::move(nodes)),
          expression_taint_(std::move(expression_taint)),
          warnings_(std::move(warnings)) {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            by_id_.emplace(nodes_[i].id, i);
            by_ast_[nodes_[i].ast_id].push_back(i);
        }
    }

    const Ast& ast() const { return ast_; }
    const std::vector<CsgNode>& nodes() const { return nodes_; }
    const CsgNode& root() const { return nodes_.front(); }
    const CsgNode& at(std::size_t index) const { return nodes_.at(index); }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<Diagnostic>& warnings() const { return warnings_; }

    std::optional<std::size_t> find(const NodeId& id) const {
        const auto it = by_id_.find(id);
        if (it == by_id_.end()) return std::nullopt;
        return it->second;
    }
    /// Throws `unknown_node` when the id does not exist in this revision.
    std::size_t index_of(const NodeId& id) const {
        const auto found = find(id);
        if (!found) throw Error("unknown_node", "stale node id; recompile required");
        return *found;
    }
    const CsgNode& get(const NodeId& id) const { return nodes_[index_of(id)]; }

    /// All nodes created by one statement.
    const std::vector<std::size_t>& instances_of(AstId ast_id) const {
        static const std::vector<std::size_t> none;
        const auto it = by_ast_.find(ast_id);
        return it == by_ast_.end() ? none : it->second;
    }

    /// Root-to-node index path, both ends included.
    std::vector<std::size_t> path_to(std::size_t index) const {
        std::vector<std::size_t> path;
        for (std::optional<std::size_t> cur = index; cur; cur = nodes_[*cur].parent) path.push_back(*cur);
        return {path.rbegin(), path.rend()};
    }

    /// Product of the matrices of strict ancestors (the frame in which the node's own matrix applies).
    Mat4 parent_matrix(std::size_t index) const {
        Mat4 m;
        const auto path = path_to(index);
        for (std::size_t i = 0; i + 1 < path.size(); ++i) m = m * nodes_[path[i]].matrix;
        return m;
    }
    /// Product of the matrices root→node, node included.
    Mat4 world_matrix(std::size_t index) const { return parent_matrix(index) * nodes_[index].matrix; }

    /// Indices of the primitive leaves under a node, in document order.
    std::vector<std::size_t> leaves(std::size_t index) const {
        std::vector<std::size_t> out;
        std::vector<std::size_t> stack{index};
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            if (is_primitive(nodes_[cur].kind)) out.push_back(cur);
            const auto& ch = nodes_[cur].children;
            for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
        }
        return out;
    }

    /// Union of taints of every evaluation of a statement-level expression.
    const std::unordered_map<AstId, Taint>& expression_taint() const { return expression_taint_; }

private:
    Ast ast_;
    std::vector<CsgNode> nodes_;
    std::unordered_map<AstId, Taint> expression_taint_;
    std::vector<Diagnostic> warnings_;
    std::unordered_map<NodeId, std::size_t> by_id_;
    std::unordered_map<AstId, std::vector<std::size_t>> by_ast_;
};

/// Operands of a boolean node. Consecutive iteration groups of one `for` statement form a
/// single operand, so `difference() { for (...) a(); b(); }` subtracts b from the whole loop.
inline std::vector<std::vector<std::size_t>> boolean_operands(const CsgTree& tree, std::size_t index) {
    std::vector<std::vector<std::size_t>> out;
    const auto& ast = tree.ast();
    std::optional<AstId> run_ast;
    for (std::size_t child : tree.at(index).children) {
        const CsgNode& c = tree.at(child);
        const bool loop_iteration = c.kind == CsgKind::Group && ast.node(c.ast_id).kind == AstKind::For;
        if (loop_iteration && run_ast == c.ast_id) {
            out.back().push_back(child);
            continue;
        }
        out.push_back({child});
        run_ast = loop_iteration ? std::optional<AstId>(c.ast_id) : std::nullopt;
    }
    return out;
}

}  // namespace bcs
