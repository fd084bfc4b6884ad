#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "bcs/session.hpp"

namespace bcs::testing {

inline std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<std::filesystem::path> fixture_paths() {
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(BCS_FIXTURE_DIR))
        if (e.path().extension() == ".bcs") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

inline std::string fixture(const std::string& name) {
    return read_text(std::filesystem::path(BCS_FIXTURE_DIR) / name);
}

/// Compiles or throws with the first diagnostic.
inline std::shared_ptr<Compiled> build(const std::string& source, int fn = 16) {
    CompileOptions options;
    options.default_fn = fn;
    auto out = compile(source, options);
    if (!out.compiled) {
        const std::string msg = out.diagnostics.empty() ? "compile failed" : format_diagnostic(out.diagnostics.front());
        throw std::runtime_error(msg + "\n" + source);
    }
    return out.compiled;
}

inline CsgTree tree_of(const std::string& source) { return build(source)->tree; }

inline Ast ast_of(const std::string& source) {
    auto r = parse(source);
    if (!r.ast) throw std::runtime_error("parse failed: " + source);
    return *r.ast;
}

/// Span of the n-th occurrence of `needle`.
inline SourceSpan find_span(const Ast& ast, const std::string& needle, int occurrence = 0) {
    std::size_t pos = ast.source().find(needle);
    for (int i = 0; i < occurrence && pos != std::string::npos; ++i) pos = ast.source().find(needle, pos + 1);
    if (pos == std::string::npos) throw std::runtime_error("no '" + needle + "' in source");
    return ast.lines().span(pos, pos + needle.size());
}

inline std::vector<std::size_t> all_leaves(const CsgTree& tree) { return tree.leaves(0); }

/// Leaf tessellation placed in world coordinates.
inline std::vector<Vec3> world_vertices(const CsgTree& tree, std::size_t leaf) {
    Mesh m = transformed(tessellate(tree.at(leaf)), tree.world_matrix(leaf));
    return m.vertices;
}

inline double max_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    if (a.size() != b.size()) return 1e300;
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, length(a[i] - b[i]));
    return d;
}

inline std::size_t count_substr(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
    return n;
}

/// Largest vertex error after an edit. Leaves under any of `moved` should move by `change(leaf)`,
/// all others should stay put. Leaves are matched in depth-first order.
inline double edit_error(const CsgTree& before, const std::string& new_source, const std::vector<std::size_t>& moved,
                         const std::function<Mat4(std::size_t)>& change) {
    const CsgTree after = tree_of(new_source);
    const auto old_leaves = before.leaves(0);
    const auto new_leaves = after.leaves(0);
    if (old_leaves.size() != new_leaves.size()) return 1e300;
    double worst = 0;
    for (std::size_t k = 0; k < old_leaves.size(); ++k) {
        std::vector<Vec3> expected = world_vertices(before, old_leaves[k]);
        const auto branch = before.path_to(old_leaves[k]);
        const bool inside = std::any_of(moved.begin(), moved.end(), [&](std::size_t m) {
            return std::find(branch.begin(), branch.end(), m) != branch.end();
        });
        if (inside) {
            const Mat4 m = change(old_leaves[k]);
            for (Vec3& v : expected) v = m.apply(v);
        }
        worst = std::max(worst, max_distance(expected, world_vertices(after, new_leaves[k])));
    }
    return worst;
}

inline double edit_error(const CsgTree& before, const std::string& new_source, const NodeId& node_id,
                         const std::function<Mat4(std::size_t)>& change) {
    return edit_error(before, new_source, std::vector<std::size_t>{before.index_of(node_id)}, change);
}

/// Id in `after` of the node `index` of `before`, located through its statement's shifted offset
/// and its ordinal among that statement's instances.
inline NodeId corresponding(const CsgTree& before, std::size_t index, const TextEdit& edit, const CsgTree& after) {
    const AstNode& stmt = before.ast().node(before.at(index).ast_id);
    const std::string_view replaced = edit.span.text(before.ast().source());
    const bool wraps = edit.replacement.size() >= replaced.size() &&
                       edit.replacement.compare(edit.replacement.size() - replaced.size(), replaced.size(), replaced) == 0;
    std::size_t start = stmt.span.start;
    if (start >= edit.span.end || (wraps && start >= edit.span.start))
        start = start + edit.replacement.size() - edit.span.size();
    const auto& peers = before.instances_of(stmt.id);
    const std::size_t ordinal = std::find(peers.begin(), peers.end(), index) - peers.begin();
    for (const AstNode& n : after.ast().nodes())
        if (n.span.start == start && n.kind == stmt.kind && after.instances_of(n.id).size() == peers.size())
            return after.at(after.instances_of(n.id)[ordinal]).id;
    throw std::runtime_error("no node corresponds to " + before.at(index).id);
}

/// World-space motion each edit kind is required to produce.
inline Mat4 translation_change(const CsgTree& t, const NodeId& id, Vec3 delta) {
    return Mat4::translation(gizmo_frame(t, id).rotation * delta);
}

inline Mat4 rotation_change(const CsgTree& t, const NodeId& id, Vec3 axis, double deg) {
    const Frame f = gizmo_frame(t, id);
    return Mat4::translation(f.origin) * Mat4::from_linear(rotation_axis(normalized(f.rotation * axis), deg)) *
           Mat4::translation(-f.origin);
}

inline Mat4 conjugated_scale(const Mat4& frame, Vec3 s) { return frame * Mat4::scaling(s) * frame.inverse(); }

/// Common prefix and suffix lengths of two strings.
inline std::pair<std::size_t, std::size_t> diff_window(const std::string& a, const std::string& b) {
    std::size_t prefix = 0;
    while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
    std::size_t suffix = 0;
    while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
           a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix])
        ++suffix;
    return {prefix, suffix};
}

}  // namespace bcs::testing
