#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcs/ast.hpp"
#include "bcs/csg.hpp"
#include "bcs/linalg.hpp"
#include "bcs/source.hpp"

namespace bcs {

/// Gizmo placement: orientation from rotate ancestors only, origin at the node's world position.
struct Frame {
    Mat3 rotation;
    Vec3 origin;
};

struct TextEdit {
    SourceSpan span;
    std::string replacement;
};

enum class EditAction { modified_existing, inserted_new, updated_primitive };

inline const char* to_string(EditAction a) {
    switch (a) {
        case EditAction::modified_existing: return "modified_existing";
        case EditAction::inserted_new: return "inserted_new";
        case EditAction::updated_primitive: return "updated_primitive";
    }
    return "?";
}

struct EditResult {
    std::string new_source;
    TextEdit edit;
    EditAction action = EditAction::inserted_new;
};

enum class Axis { x, y, z };
enum class ScaleMode { scale_node, scale_primitive };

inline std::string apply_edit(const std::string& source, const TextEdit& edit) {
    std::string out = source.substr(0, edit.span.start);
    out += edit.replacement;
    out += source.substr(edit.span.end);
    return out;
}

/// Shortest of 4 decimals (trailing zeros trimmed) or, when that loses more than 1e-9, up to 12.
inline std::string format_number(double v) {
    auto render = [](double x, int decimals) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
        std::string s = buf;
        if (s.find('.') != std::string::npos) {
            while (s.back() == '0') s.pop_back();
            if (s.back() == '.') s.pop_back();
        }
        if (s == "-0") s = "0";
        return s;
    };
    std::string s = render(v, 4);
    if (std::abs(std::stod(s) - v) > 1e-9) s = render(v, 12);
    return s;
}

inline std::string format_vector(Vec3 v) {
    return "[" + format_number(v.x) + ", " + format_number(v.y) + ", " + format_number(v.z) + "]";
}

/// Frame of the transform gizmo for a node.
inline Frame gizmo_frame(const CsgTree& tree, const NodeId& node_id) {
    const std::size_t index = tree.index_of(node_id);
    Frame f;
    const auto path = tree.path_to(index);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const CsgNode& n = tree.at(path[i]);
        if (n.kind == CsgKind::Rotate) f.rotation = f.rotation * n.matrix.linear();
    }
    f.origin = tree.parent_matrix(index).apply({});
    return f;
}

namespace detail {

inline Error invalid_edit(const std::string& message) { return Error("invalid_edit", message); }

inline std::optional<double> literal_number(const Ast& ast, AstId id) {
    const AstNode& n = ast.node(id);
    if (n.kind == AstKind::NumberLit) return n.number;
    if (n.kind == AstKind::UnaryOp && ast.node(n.children[0]).kind == AstKind::NumberLit) {
        if (*n.name == "-") return -ast.node(n.children[0]).number;
        if (*n.name == "+") return ast.node(n.children[0]).number;
    }
    return std::nullopt;
}

/// A literal number or a literal vector of one to three numbers.
struct Literal {
    bool scalar = false;
    std::vector<double> values;
};

inline std::optional<Literal> literal_vector(const Ast& ast, AstId id) {
    if (const auto n = literal_number(ast, id)) return Literal{true, {*n}};
    const AstNode& v = ast.node(id);
    if (v.kind != AstKind::VectorLit || v.children.empty() || v.children.size() > 3) return std::nullopt;
    Literal out;
    for (AstId c : v.children) {
        const auto n = literal_number(ast, c);
        if (!n) return std::nullopt;
        out.values.push_back(*n);
    }
    return out;
}

/// Argument expression bound to a parameter, by name first and then by position.
inline std::optional<AstId> argument(const Ast& ast, const AstNode& call, const std::string& name,
                                     std::optional<std::size_t> position) {
    for (std::size_t i = 0; i < call.arg_count(); ++i)
        if (call.arg_names[i] == name) return call.children[i];
    if (!position) return std::nullopt;
    std::size_t seen = 0;
    for (std::size_t i = 0; i < call.arg_count(); ++i) {
        if (!call.arg_names[i].empty()) continue;
        if (seen++ == *position) return call.children[i];
    }
    (void)ast;
    return std::nullopt;
}

inline bool unique_instance(const CsgTree& tree, const CsgNode& n) { return tree.instances_of(n.ast_id).size() == 1; }

inline std::vector<std::size_t> sorted_leaves(const CsgTree& tree, std::size_t index) {
    auto l = tree.leaves(index);
    std::sort(l.begin(), l.end());
    return l;
}

/// Vector argument of a single-instance transform statement, when written as literals.
inline std::optional<AstId> literal_transform_arg(const CsgTree& tree, const CsgNode& n, const char* param) {
    if (!unique_instance(tree, n)) return std::nullopt;
    const AstNode& stmt = tree.ast().node(n.ast_id);
    if (stmt.kind != AstKind::Instantiation) return std::nullopt;
    const auto arg = argument(tree.ast(), stmt, param, 0);
    if (!arg || !literal_vector(tree.ast(), *arg)) return std::nullopt;
    return arg;
}

inline bool in_subtree(const CsgTree& tree, std::size_t root, std::size_t index) {
    for (std::optional<std::size_t> cur = index; cur; cur = tree.at(*cur).parent)
        if (*cur == root) return true;
    return false;
}

/// Nearest ancestor-or-self whose statement creates exactly one node, whose subtree holds no
/// other instance of the selected node's statement, and whose leaves are the selection's leaves.
/// Wrapping that statement moves the selection only.
inline std::size_t edit_site(const CsgTree& tree, std::size_t index) {
    if (index == 0) throw invalid_edit("the root cannot be transformed");
    const auto& siblings = tree.instances_of(tree.at(index).ast_id);
    const auto leaves = sorted_leaves(tree, index);
    for (std::optional<std::size_t> cur = index; cur && *cur != 0; cur = tree.at(*cur).parent) {
        if (sorted_leaves(tree, *cur) != leaves) break;
        if (!unique_instance(tree, tree.at(*cur))) continue;
        bool shared = false;
        for (std::size_t s : siblings)
            if (s != index && in_subtree(tree, *cur, s)) shared = true;
        if (!shared) return *cur;
    }
    throw invalid_edit("no statement creates only the selected instance");
}

inline EditResult replace_span(const Ast& ast, std::size_t start, std::size_t end, std::string text,
                               EditAction action) {
    EditResult r;
    r.edit = {ast.lines().span(start, end), std::move(text)};
    r.new_source = apply_edit(ast.source(), r.edit);
    r.action = action;
    return r;
}

/// Wraps the site's statement: the edit replaces the statement with the wrapper followed by it.
inline EditResult insert_wrapper(const CsgTree& tree, std::size_t site, const std::string& wrapper) {
    const SourceSpan& stmt = tree.ast().node(tree.at(site).ast_id).span;
    return replace_span(tree.ast(), stmt.start, stmt.end, wrapper + std::string(stmt.text(tree.ast().source())),
                        EditAction::inserted_new);
}

inline bool is_zero(Vec3 v) { return format_vector(v) == "[0, 0, 0]"; }

inline Mat4 diagonal(Vec3 s) { return Mat4::scaling(s); }

}  // namespace detail

/// Moves a node by `local_delta`, expressed in its gizmo frame. Reuses a translate that only
/// affects this node; otherwise wraps the node's statement in a new one.
inline EditResult apply_translation(const CsgTree& tree, const NodeId& node_id, Vec3 local_delta) {
    const std::size_t index = tree.index_of(node_id);
    if (index == 0) throw detail::invalid_edit("the root cannot be transformed");
    if (!std::isfinite(local_delta.x) || !std::isfinite(local_delta.y) || !std::isfinite(local_delta.z))
        throw detail::invalid_edit("translation must be finite");
    const Vec3 world = gizmo_frame(tree, node_id).rotation * local_delta;
    const auto leaves = detail::sorted_leaves(tree, index);

    for (std::optional<std::size_t> cur = index; cur && *cur != 0; cur = tree.at(*cur).parent) {
        if (detail::sorted_leaves(tree, *cur) != leaves) break;
        const CsgNode& t = tree.at(*cur);
        if (t.kind != CsgKind::Translate) continue;
        const auto arg = detail::literal_transform_arg(tree, t, "v");
        if (!arg) continue;
        const Vec3 v = t.vec("v") + tree.parent_matrix(*cur).linear().inverse() * world;
        const SourceSpan& span = tree.ast().node(*arg).span;
        return detail::replace_span(tree.ast(), span.start, span.end, format_vector(v), EditAction::modified_existing);
    }

    const std::size_t site = detail::edit_site(tree, index);
    const Vec3 d = tree.parent_matrix(site).linear().inverse() * world;
    return detail::insert_wrapper(tree, site, "translate(" + format_vector(d) + ") ");
}

/// Rotates a node by `angle_deg` about a gizmo axis through the gizmo origin.
inline EditResult apply_rotation(const CsgTree& tree, const NodeId& node_id, Axis axis, double angle_deg) {
    const std::size_t index = tree.index_of(node_id);
    if (index == 0) throw detail::invalid_edit("the root cannot be transformed");
    if (!std::isfinite(angle_deg)) throw detail::invalid_edit("angle must be finite");
    const Frame frame = gizmo_frame(tree, node_id);
    const Vec3 unit = axis == Axis::x ? Vec3{1, 0, 0} : (axis == Axis::y ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    const Mat4 world = Mat4::translation(frame.origin) *
                       Mat4::from_linear(rotation_axis(normalized(frame.rotation * unit), angle_deg)) *
                       Mat4::translation(-frame.origin);
    auto local_change = [&](std::size_t site) {
        const Mat4 p = tree.parent_matrix(site);
        return p.inverse() * world * p;
    };

    const CsgNode& n = tree.at(index);
    if (n.parent && *n.parent != 0) {
        const CsgNode& e = tree.at(*n.parent);
        const auto arg = e.kind == CsgKind::Rotate ? detail::literal_transform_arg(tree, e, "a") : std::nullopt;
        if (arg && detail::sorted_leaves(tree, *n.parent) == detail::sorted_leaves(tree, index)) {
            const Mat4 x = local_change(*n.parent);
            if (x.linear().orthonormality_error() < 1e-9 && detail::is_zero(x.translation_part())) {
                const Vec3 angles = euler_xyz(x.linear() * e.matrix.linear());
                const SourceSpan& span = tree.ast().node(*arg).span;
                return detail::replace_span(tree.ast(), span.start, span.end, format_vector(angles),
                                            EditAction::modified_existing);
            }
        }
    }

    const std::size_t site = detail::edit_site(tree, index);
    const Mat4 x = local_change(site);
    const Mat3 l = x.linear();
    if (l.orthonormality_error() > 1e-9 || l.determinant() < 0)
        throw detail::invalid_edit("rotation cannot be expressed under a non-uniform scale");
    std::string wrapper;
    if (!detail::is_zero(x.translation_part())) wrapper = "translate(" + format_vector(x.translation_part()) + ") ";
    wrapper += "rotate(" + format_vector(euler_xyz(l)) + ") ";
    return detail::insert_wrapper(tree, site, wrapper);
}

namespace detail {

struct Splice {
    std::size_t start;
    std::size_t end;
    std::string text;
};

/// Folds several splices into one edit covering all of them.
inline EditResult merge_splices(const Ast& ast, std::vector<Splice> parts, EditAction action) {
    std::sort(parts.begin(), parts.end(), [](const Splice& a, const Splice& b) { return a.start < b.start; });
    const std::string& src = ast.source();
    std::string text;
    std::size_t pos = parts.front().start;
    for (const Splice& s : parts) {
        text += src.substr(pos, s.start - pos);
        text += s.text;
        pos = s.end;
    }
    return replace_span(ast, parts.front().start, pos, std::move(text), action);
}

/// Offset just before the closing parenthesis of an instantiation's argument list.
inline std::size_t argument_list_end(const Ast& ast, const AstNode& call) {
    const std::string& src = ast.source();
    std::size_t pos = call.arg_count() ? ast.node(call.children[call.arg_count() - 1]).span.end
                                       : src.find('(', call.span.start) + 1;
    int depth = 0;
    for (; pos < call.span.end; ++pos) {
        if (src[pos] == '(') ++depth;
        if (src[pos] == ')') {
            if (depth == 0) return pos;
            --depth;
        }
    }
    return pos;
}

inline EditResult scale_primitive(const CsgTree& tree, std::size_t index, Vec3 s) {
    const CsgNode& n = tree.at(index);
    const Ast& ast = tree.ast();
    const AstNode& call = ast.node(n.ast_id);
    std::vector<Splice> parts;
    std::vector<std::string> appended;
    auto rewrite_number = [&](AstId arg, double factor) {
        const auto v = literal_number(ast, arg);
        if (!v) throw invalid_edit("parameter is an expression; use scale_node");
        parts.push_back({ast.node(arg).span.start, ast.node(arg).span.end, format_number(*v * factor)});
    };
    const bool uniform = s.x == s.y && s.y == s.z;

    switch (n.kind) {
        case CsgKind::PrimCube: {
            const Vec3 size = n.vec("size");
            const Vec3 scaled{size.x * s.x, size.y * s.y, size.z * s.z};
            const auto arg = argument(ast, call, "size", 0);
            if (arg && !literal_vector(ast, *arg)) throw invalid_edit("parameter is an expression; use scale_node");
            const bool scalar = arg ? literal_vector(ast, *arg)->scalar && uniform : uniform;
            const std::string text = scalar ? format_number(scaled.x) : format_vector(scaled);
            if (arg) parts.push_back({ast.node(*arg).span.start, ast.node(*arg).span.end, text});
            else appended.push_back("size=" + text);
            break;
        }
        case CsgKind::PrimSphere: {
            if (!uniform) throw invalid_edit("primitive cannot absorb anisotropic scale");
            if (const auto arg = argument(ast, call, "r", 0)) rewrite_number(*arg, s.x);
            else appended.push_back("r=" + format_number(n.number("r") * s.x));
            break;
        }
        case CsgKind::PrimCylinder: {
            if (s.x != s.y) throw invalid_edit("primitive cannot absorb anisotropic scale");
            if (const auto h = argument(ast, call, "h", 0)) rewrite_number(*h, s.z);
            else appended.push_back("h=" + format_number(n.number("h") * s.z));
            const auto r = argument(ast, call, "r", std::nullopt);
            const auto r1 = argument(ast, call, "r1", 1);
            const auto r2 = argument(ast, call, "r2", 2);
            if (r1) rewrite_number(*r1, s.x);
            if (r2) rewrite_number(*r2, s.x);
            if (r && (!r1 || !r2)) rewrite_number(*r, s.x);
            if (!r && !r1 && !r2) appended.push_back("r=" + format_number(n.number("r1") * s.x));
            else if (!r && !r1) appended.push_back("r1=" + format_number(n.number("r1") * s.x));
            else if (!r && !r2) appended.push_back("r2=" + format_number(n.number("r2") * s.x));
            break;
        }
        default: throw invalid_edit("scale_primitive requires a primitive");
    }
    if (!appended.empty()) {
        const std::size_t at = argument_list_end(ast, call);
        std::string text;
        for (const std::string& a : appended) text += (text.empty() && call.arg_count() == 0 ? "" : ", ") + a;
        parts.push_back({at, at, text});
    }
    return merge_splices(ast, std::move(parts), EditAction::updated_primitive);
}

}  // namespace detail

/// Scales a node about its local origin, either through a scale statement or by rewriting the
/// primitive's own size arguments.
inline EditResult apply_scale(const CsgTree& tree, const NodeId& node_id, Vec3 factors, ScaleMode mode) {
    const std::size_t index = tree.index_of(node_id);
    if (index == 0) throw detail::invalid_edit("the root cannot be transformed");
    for (double f : {factors.x, factors.y, factors.z})
        if (!(f > 0) || !std::isfinite(f)) throw detail::invalid_edit("scale factors must be positive");
    if (mode == ScaleMode::scale_primitive) {
        if (!is_primitive(tree.at(index).kind)) throw detail::invalid_edit("scale_primitive requires a primitive");
        return detail::scale_primitive(tree, index, factors);
    }

    const CsgNode& n = tree.at(index);
    if (n.parent && *n.parent != 0) {
        const CsgNode& s = tree.at(*n.parent);
        const auto arg = s.kind == CsgKind::Scale ? detail::literal_transform_arg(tree, s, "v") : std::nullopt;
        if (arg && s.children.size() == 1) {
            const Vec3 v = s.vec("v");
            const SourceSpan& span = tree.ast().node(*arg).span;
            return detail::replace_span(tree.ast(), span.start, span.end,
                                        format_vector({v.x * factors.x, v.y * factors.y, v.z * factors.z}),
                                        EditAction::modified_existing);
        }
    }

    const std::size_t site = detail::edit_site(tree, index);
    const Mat4 b = tree.parent_matrix(site).inverse() * tree.parent_matrix(index);
    const Mat3 l = b.linear() * detail::diagonal(factors).linear() * b.linear().inverse();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (r != c && std::abs(l(r, c)) > 1e-9)
                throw detail::invalid_edit("scale is not axis-aligned at the enclosing statement");
    const Vec3 d{l(0, 0), l(1, 1), l(2, 2)};
    const Vec3 c = b.translation_part();
    if (detail::is_zero(c)) return detail::insert_wrapper(tree, site, "scale(" + format_vector(d) + ") ");
    return detail::insert_wrapper(tree, site,
                                  "translate(" + format_vector(c) + ") scale(" + format_vector(d) + ") translate(" +
                                      format_vector(-c) + ") ");
}

}  // namespace bcs
