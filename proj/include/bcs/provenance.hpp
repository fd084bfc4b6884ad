#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcs/ast.hpp"
#include "bcs/csg.hpp"
#include "bcs/scene.hpp"
#include "bcs/source.hpp"

namespace bcs {

struct MenuEntry {
    NodeId node_id;
    std::string label;
    int line = 0;
};

struct MenuModel {
    std::vector<MenuEntry> entries;
};

struct TargetSpan {
    SourceSpan span;
    int call_order = 0;
};

struct GhostSpec {
    NodeId source_subtree;
    Highlight classification = Highlight::target;
    Mat4 world_matrix;
};

struct HighlightState {
    std::vector<TargetSpan> target_spans;
    std::vector<SourceSpan> impacted_spans;
    std::vector<NodeId> target_node_ids;
    std::vector<NodeId> impacted_node_ids;
    std::vector<GhostSpec> ghosts;
    std::optional<std::string> notice;
};

/// Branch from a picked node up to the root, leaf first.
inline MenuModel menu_for(const CsgTree& tree, const NodeId& leaf_id) {
    MenuModel menu;
    const auto path = tree.path_to(tree.index_of(leaf_id));
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const CsgNode& n = tree.at(*it);
        menu.entries.push_back({n.id, n.label, tree.ast().node(n.ast_id).span.start_line});
    }
    return menu;
}

namespace detail {

inline void add_unique(std::vector<SourceSpan>& spans, const SourceSpan& s) {
    if (std::find(spans.begin(), spans.end(), s) == spans.end()) spans.push_back(s);
}

inline std::vector<SourceSpan> call_spans(const CsgTree& tree, const CsgNode& n) {
    std::vector<SourceSpan> out;
    for (AstId a : n.call_stack)
        if (a != tree.ast().root().id) out.push_back(tree.ast().node(a).span);
    return out;
}

/// Children of a boolean node that get ghosts: the subtracted operands of a difference, every
/// operand of an intersection.
inline std::vector<std::size_t> ghost_eligible(const CsgTree& tree, std::size_t op) {
    std::vector<std::size_t> out;
    const auto operands = boolean_operands(tree, op);
    const std::size_t first = tree.at(op).kind == CsgKind::Difference ? 1 : 0;
    for (std::size_t i = first; i < operands.size(); ++i)
        for (std::size_t c : operands[i]) out.push_back(c);
    return out;
}

inline void sort_spans(std::vector<SourceSpan>& spans) { std::sort(spans.begin(), spans.end()); }

}  // namespace detail

/// Target branch of `node_id`, the other instances of its statement, and ghosts for booleans.
inline HighlightState select_node(const CsgTree& tree, const NodeId& node_id) {
    HighlightState st;
    const std::size_t index = tree.index_of(node_id);
    const CsgNode& sel = tree.at(index);
    const auto path = tree.path_to(index);
    std::set<std::size_t> on_path(path.begin(), path.end());
    for (std::size_t p : path) st.target_node_ids.push_back(tree.at(p).id);

    const auto target = detail::call_spans(tree, sel);
    for (std::size_t i = 0; i < target.size(); ++i) st.target_spans.push_back({target[i], static_cast<int>(i + 1)});

    std::vector<std::size_t> impacted;
    for (std::size_t other : tree.instances_of(sel.ast_id))
        if (other != index && !on_path.count(other)) impacted.push_back(other);
    for (std::size_t other : impacted) {
        st.impacted_node_ids.push_back(tree.at(other).id);
        for (const SourceSpan& s : detail::call_spans(tree, tree.at(other)))
            if (std::find(target.begin(), target.end(), s) == target.end()) detail::add_unique(st.impacted_spans, s);
    }
    detail::sort_spans(st.impacted_spans);

    if (is_ghosting(sel.kind)) {
        auto add_ghosts = [&](std::size_t op, bool op_impacted) {
            const Mat4 world = tree.world_matrix(op);
            for (std::size_t c : detail::ghost_eligible(tree, op)) {
                const bool repeated = tree.instances_of(tree.at(c).ast_id).size() > 1;
                st.ghosts.push_back(
                    {tree.at(c).id, op_impacted || repeated ? Highlight::impacted : Highlight::target, world});
            }
        };
        add_ghosts(index, false);
        for (std::size_t other : impacted) add_ghosts(other, true);
    }
    return st;
}

/// Statement that a code selection designates for forward search.
inline AstId instantiating_statement(const Ast& ast, const SourceSpan& sel) {
    const AstNode& n = node_at(ast, sel);
    const AstId stmt = ast.enclosing_statement(n.id);
    const AstKind k = ast.node(stmt).kind;
    if (stmt == ast.root().id || (k != AstKind::Instantiation && k != AstKind::For && k != AstKind::If &&
                                  k != AstKind::Block))
        throw Error("bad_selection", "not an instantiating statement");
    return stmt;
}

inline HighlightState variable_search(const CsgTree& tree, const SourceSpan& sel);

/// Nodes created by the selected statement: one is the target, several are all impacted.
/// A selection that names a variable outside any instantiating statement becomes a variable search.
inline HighlightState forward_search(const CsgTree& tree, const SourceSpan& sel) {
    const Ast& ast = tree.ast();
    AstId stmt;
    try {
        stmt = instantiating_statement(ast, sel);
    } catch (const Error& e) {
        if (e.what() != std::string("not an instantiating statement")) throw;
        return variable_search(tree, sel);
    }
    const auto& instances = tree.instances_of(stmt);
    if (instances.empty()) {
        HighlightState st;
        st.notice = "no elements created";
        return st;
    }
    if (instances.size() == 1) return select_node(tree, tree.at(instances.front()).id);
    HighlightState st;
    for (std::size_t i : instances) {
        st.impacted_node_ids.push_back(tree.at(i).id);
        for (const SourceSpan& s : detail::call_spans(tree, tree.at(i))) detail::add_unique(st.impacted_spans, s);
    }
    detail::sort_spans(st.impacted_spans);
    return st;
}

namespace detail {

/// Span of the loop variable name in a `for` header.
inline std::optional<SourceSpan> loop_variable_span(const Ast& ast, const AstNode& loop) {
    const std::string& src = ast.source();
    std::size_t i = src.find('(', loop.span.start);
    if (i == std::string::npos || i >= loop.span.end) return std::nullopt;
    ++i;
    while (i < loop.span.end && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    if (src.compare(i, loop.name->size(), *loop.name) != 0) return std::nullopt;
    return ast.lines().span(i, i + loop.name->size());
}

inline bool names_module(const Ast& ast, const std::string& name) {
    for (const AstNode& n : ast.nodes())
        if (n.kind == AstKind::ModuleDef && *n.name == name) return true;
    static const std::set<std::string> builtins = {"cube",   "sphere", "cylinder", "translate",   "rotate",
                                                   "scale",  "union",  "difference", "intersection"};
    return builtins.count(name) > 0;
}

/// Binding site that a use of `name` at `from` refers to, following the evaluator's scoping.
inline std::optional<AstId> resolve_binding(const Ast& ast, AstId from, const std::string& name) {
    AstId prev = from;
    for (AstId cur = ast.node(from).parent; cur >= 0; prev = cur, cur = ast.node(cur).parent) {
        const AstNode& n = ast.node(cur);
        if (n.kind == AstKind::Block) {
            std::optional<AstId> last;
            for (AstId c : n.children) {
                const AstNode& s = ast.node(c);
                if (s.kind == AstKind::Assignment && *s.name == name) last = c;
            }
            if (last) return last;
        } else if (n.kind == AstKind::ModuleDef) {
            for (std::size_t i = 0; i + 1 < n.children.size(); ++i)
                if (*ast.node(n.children[i]).name == name) return n.children[i];
        } else if (n.kind == AstKind::For) {
            if (*n.name == name && prev != n.children[0]) return cur;
        }
    }
    return std::nullopt;
}

/// Binding site selected by `sel`, or an error explaining why there is none.
inline AstId selected_binding(const Ast& ast, const SourceSpan& sel) {
    const AstNode& n = node_at(ast, sel);
    if (n.kind == AstKind::Assignment) {
        const AstNode& scope = ast.node(n.parent);
        if (scope.kind == AstKind::ModuleDef) return n.id;
        return *resolve_binding(ast, n.id, *n.name);
    }
    if (n.kind == AstKind::For) {
        const auto var = loop_variable_span(ast, n);
        if (var && var->overlaps(sel) && !ast.node(n.children[0]).span.overlaps(sel)) return n.id;
    }
    std::vector<const AstNode*> idents;
    std::vector<AstId> stack{n.id};
    while (!stack.empty()) {
        const AstNode& cur = ast.node(stack.back());
        stack.pop_back();
        if (cur.kind == AstKind::Ident && cur.span.overlaps(sel)) idents.push_back(&cur);
        for (AstId c : cur.children) stack.push_back(c);
    }
    if (idents.size() == 1) {
        const AstNode& id = *idents.front();
        if (const auto b = resolve_binding(ast, id.id, *id.name)) return *b;
        throw Error("bad_selection", "undefined variable '" + *id.name + "'");
    }
    if (idents.size() > 1) throw Error("bad_selection", "selection covers several variables");
    if (n.kind == AstKind::Instantiation || n.kind == AstKind::ModuleDef) {
        const std::size_t start =
            n.kind == AstKind::ModuleDef ? ast.source().find(*n.name, n.span.start) : n.span.start;
        const SourceSpan name_span = ast.lines().span(start, start + n.name->size());
        if (name_span.overlaps(sel) && names_module(ast, *n.name))
            throw Error("bad_selection", "module, not variable");
    }
    throw Error("bad_selection", "not an instantiating statement");
}

}  // namespace detail

/// Nodes whose parameters depend on the selected variable, and the code its value flows into.
inline HighlightState variable_search(const CsgTree& tree, const SourceSpan& sel) {
    const Ast& ast = tree.ast();
    const AstId site = detail::selected_binding(ast, sel);
    HighlightState st;
    for (const auto& [expr, taint] : tree.expression_taint()) {
        if (!taint.contains(site)) continue;
        const AstNode& e = ast.node(expr);
        const AstNode& owner = ast.node(e.parent);
        detail::add_unique(st.impacted_spans, owner.kind == AstKind::Assignment ? owner.span : e.span);
    }
    for (const CsgNode& n : tree.nodes()) {
        if (!n.taint.contains(site)) continue;
        st.impacted_node_ids.push_back(n.id);
        detail::add_unique(st.impacted_spans, ast.node(n.ast_id).span);
    }
    detail::sort_spans(st.impacted_spans);
    return st;
}

}  // namespace bcs
