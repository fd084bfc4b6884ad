#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcs/source.hpp"

namespace bcs {

using AstId = int;

enum class AstKind {
    Assignment,
    ModuleDef,
    Instantiation,
    For,
    If,
    Block,
    NumberLit,
    BoolLit,
    VectorLit,
    RangeLit,
    Ident,
    BinaryOp,
    UnaryOp,
    Index,
    Call,
};

inline const char* to_string(AstKind k) {
    switch (k) {
        case AstKind::Assignment: return "Assignment";
        case AstKind::ModuleDef: return "ModuleDef";
        case AstKind::Instantiation: return "Instantiation";
        case AstKind::For: return "For";
        case AstKind::If: return "If";
        case AstKind::Block: return "Block";
        case AstKind::NumberLit: return "NumberLit";
        case AstKind::BoolLit: return "BoolLit";
        case AstKind::VectorLit: return "VectorLit";
        case AstKind::RangeLit: return "RangeLit";
        case AstKind::Ident: return "Ident";
        case AstKind::BinaryOp: return "BinaryOp";
        case AstKind::UnaryOp: return "UnaryOp";
        case AstKind::Index: return "Index";
        case AstKind::Call: return "Call";
    }
    return "?";
}

inline bool is_statement(AstKind k) {
    return k == AstKind::Assignment || k == AstKind::ModuleDef || k == AstKind::Instantiation ||
           k == AstKind::For || k == AstKind::If || k == AstKind::Block;
}

inline bool is_expression(AstKind k) { return !is_statement(k); }

/// Child layout per kind:
///   Assignment     [value]               (a module parameter without default has none)
///   ModuleDef      [param Assignment..., body]; arg_names = parameter names
///   Instantiation  [args..., child stmt?]; arg_names has one entry per arg ("" = positional)
///   For            [iterable, body]; name = loop variable
///   If             [condition, then, else?]
///   Block          [stmts...]
///   VectorLit      [elements...]
///   RangeLit       [start, end] or [start, step, end]
///   BinaryOp       [lhs, rhs]; name = operator
///   UnaryOp        [operand]; name = operator
///   Index          [base, index]
///   Call           [args...]; name = function, arg_names as for Instantiation
struct AstNode {
    AstId id = -1;
    AstKind kind = AstKind::Block;
    SourceSpan span;
    std::optional<std::string> name;
    std::vector<AstId> children;
    std::vector<std::string> arg_names;
    AstId parent = -1;
    double number = 0;  // NumberLit value; BoolLit 0/1

    std::size_t arg_count() const {
        return kind == AstKind::Instantiation || kind == AstKind::Call ? arg_names.size() : 0;
    }
    /// Child statement of an Instantiation, if any.
    std::optional<AstId> child_statement() const {
        if (kind == AstKind::Instantiation && children.size() > arg_names.size()) return children.back();
        return std::nullopt;
    }
};

/// A successfully parsed program. Node ids are assigned in document (pre-)order; the root is
/// a Block with id 0 spanning the whole source.
class Ast {
public:
    Ast(std::string source, std::vector<AstNode> nodes)
        : source_(std::make_shared<const std::string>(std::move(source))),
          lines_(std::make_shared<const LineIndex>(*source_)),
          nodes_(std::make_shared<const std::vector<AstNode>>(std::move(nodes))) {}

    const std::string& source() const { return *source_; }
    const LineIndex& lines() const { return *lines_; }
    const std::vector<AstNode>& nodes() const { return *nodes_; }
    const AstNode& root() const { return nodes_->front(); }
    const AstNode& node(AstId id) const { return nodes_->at(static_cast<std::size_t>(id)); }
    std::size_t size() const { return nodes_->size(); }
    std::string_view text(AstId id) const { return node(id).span.text(*source_); }

    bool is_ancestor_or_self(AstId ancestor, AstId id) const {
        for (AstId cur = id; cur >= 0; cur = node(cur).parent)
            if (cur == ancestor) return true;
        return false;
    }

    /// Nearest ancestor-or-self that is a statement.
    AstId enclosing_statement(AstId id) const {
        AstId cur = id;
        while (cur >= 0 && !is_statement(node(cur).kind)) cur = node(cur).parent;
        return cur;
    }

private:
    std::shared_ptr<const std::string> source_;
    std::shared_ptr<const LineIndex> lines_;
    std::shared_ptr<const std::vector<AstNode>> nodes_;
};

/// Smallest node whose span contains `sel`. Selections shorter than two bytes are rejected.
inline const AstNode& node_at(const Ast& ast, const SourceSpan& sel) {
    if (sel.start > sel.end || sel.end > ast.source().size())
        throw Error("bad_selection", "selection outside source");
    if (sel.size() < 2) throw Error("bad_selection", "selection must cover at least 2 characters");
    const AstNode* cur = &ast.root();
    for (;;) {
        const AstNode* next = nullptr;
        for (AstId c : cur->children) {
            const AstNode& child = ast.node(c);
            if (child.span.contains(sel)) {
                next = &child;
                break;
            }
        }
        if (!next) break;
        cur = next;
    }
    if (cur->kind == AstKind::Block) {
        int overlapping = 0;
        for (AstId c : cur->children)
            if (ast.node(c).span.overlaps(sel)) ++overlapping;
        if (overlapping >= 2) throw Error("bad_selection", "selection crosses statement boundary");
        const bool inside_braces = cur->id != 0 && sel.start > cur->span.start && sel.end < cur->span.end;
        if (overlapping == 0 && (cur->id == 0 || inside_braces)) throw Error("bad_selection", "no node at selection");
    }
    return *cur;
}

}  // namespace bcs
