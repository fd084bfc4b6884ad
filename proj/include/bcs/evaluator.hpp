#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bcs/ast.hpp"
#include "bcs/csg.hpp"
#include "bcs/linalg.hpp"
#include "bcs/source.hpp"
#include "bcs/value.hpp"

namespace bcs {

struct EvalLimits {
    std::size_t max_csg_nodes = 100000;
    std::size_t max_loop_iterations = 10000;
    int max_recursion_depth = 64;
};


using EvalDiagnostic = Diagnostic;

struct EvalResult {
    std::optional<CsgTree> tree;
    std::vector<EvalDiagnostic> diagnostics;

    bool ok() const { return tree.has_value(); }
};

class EvalError : public Error {
public:
    EvalError(SourceSpan span, const std::string& message) : Error("eval_error", message), span_(span) {}
    const SourceSpan& span() const { return span_; }

private:
    SourceSpan span_;
};

/// One lexical scope. Variables carry the AstId of their binding site; reading a variable adds
/// that id to the value's taint.
class Environment {
public:
    struct Binding {
        Value value;
        AstId site = -1;
    };

    Environment() = default;
    explicit Environment(const Environment* parent) : parent_(parent) {}

    void define(const std::string& name, Value value, AstId site) { vars_[name] = Binding{std::move(value), site}; }
    void define_module(const std::string& name, AstId def) { modules_[name] = def; }

    const Binding* lookup(std::string_view name) const {
        for (const Environment* e = this; e; e = e->parent_) {
            const auto it = e->vars_.find(std::string(name));
            if (it != e->vars_.end()) return &it->second;
        }
        return nullptr;
    }
    /// Module definition and the scope it was defined in.
    std::optional<std::pair<AstId, const Environment*>> lookup_module(std::string_view name) const {
        for (const Environment* e = this; e; e = e->parent_) {
            const auto it = e->modules_.find(std::string(name));
            if (it != e->modules_.end()) return std::make_pair(it->second, e);
        }
        return std::nullopt;
    }

private:
    const Environment* parent_ = nullptr;
    std::unordered_map<std::string, Binding> vars_;
    std::unordered_map<std::string, AstId> modules_;
};

namespace detail {

class Evaluator {
public:
    Evaluator(const Ast& ast, EvalLimits limits, int default_fn)
        : ast_(ast), limits_(limits), default_fn_(default_fn) {}

    CsgTree run() {
        CsgNode root;
        root.kind = CsgKind::Group;
        root.ast_id = ast_.root().id;
        root.call_stack = {ast_.root().id};
        root.label = "root";
        nodes_.push_back(std::move(root));
        Environment file;
        eval_scope(ast_.root().children, file, 0);
        return CsgTree(ast_, std::move(nodes_), std::move(expr_taint_), std::move(warnings_));
    }

    Value eval(AstId id, const Environment& env) {
        const AstNode& n = ast_.node(id);
        switch (n.kind) {
            case AstKind::NumberLit: return Value(n.number);
            case AstKind::BoolLit: return Value(n.number != 0);
            case AstKind::VectorLit: {
                ValueList items;
                Taint t;
                for (AstId c : n.children) {
                    items.push_back(eval(c, env));
                    t.merge(items.back().taint);
                }
                return Value(std::move(items), std::move(t));
            }
            case AstKind::RangeLit: {
                std::vector<Value> parts;
                Taint t;
                for (AstId c : n.children) {
                    parts.push_back(eval(c, env));
                    t.merge(parts.back().taint);
                    if (!parts.back().is_number())
                        throw EvalError(ast_.node(c).span, "range bound must be a number, got " + parts.back().type_name());
                }
                Range r;
                r.start = parts.front().number();
                r.end = parts.back().number();
                if (parts.size() == 3) {
                    r.step = parts[1].number();
                    if (r.step == 0) throw EvalError(n.span, "range step must be nonzero");
                } else if (r.end < r.start) {
                    std::swap(r.start, r.end);
                }
                return Value(r, std::move(t));
            }
            case AstKind::Ident: {
                const auto* b = env.lookup(*n.name);
                if (!b) {
                    if (!n.name->empty() && n.name->front() == '$') return Value();
                    throw EvalError(n.span, "undefined variable '" + *n.name + "'");
                }
                Value v = b->value;
                v.taint.insert(b->site);
                return v;
            }
            case AstKind::UnaryOp: return unary(n, eval(n.children[0], env));
            case AstKind::BinaryOp: return binary(n, env);
            case AstKind::Index: {
                Value base = eval(n.children[0], env);
                Value index = eval(n.children[1], env);
                Taint t = base.taint | index.taint;
                if (!base.is_vector() || !index.is_number()) {
                    warn(n.span, "cannot index " + base.type_name() + " with " + index.type_name());
                    return undef(std::move(t));
                }
                const double i = std::floor(index.number());
                if (i < 0 || i >= static_cast<double>(base.vector().size())) {
                    warn(n.span, "index out of bounds");
                    return undef(std::move(t));
                }
                Value out = base.vector()[static_cast<std::size_t>(i)];
                out.taint.merge(t);
                return out;
            }
            case AstKind::Call: return call(n, env);
            default: throw EvalError(n.span, std::string("expected expression, found ") + to_string(n.kind));
        }
    }

private:
    static Value undef(Taint t) {
        Value v;
        v.taint = std::move(t);
        return v;
    }

    void warn(const SourceSpan& span, std::string message) {
        warnings_.push_back({span, std::move(message), Severity::warning});
    }

    /// Evaluates an expression that sits directly under a statement and records its taint.
    Value eval_top(AstId id, const Environment& env) {
        Value v = eval(id, env);
        expr_taint_[id].merge(v.taint);
        return v;
    }

    Value unary(const AstNode& n, Value v) {
        const std::string& op = *n.name;
        if (op == "!") return Value(!v.truthy(), std::move(v.taint));
        if (v.is_number()) return Value(op == "-" ? -v.number() : v.number(), std::move(v.taint));
        if (v.is_numeric_vector()) {
            ValueList out;
            for (const Value& e : v.vector()) out.push_back(Value(op == "-" ? -e.number() : e.number(), e.taint));
            return Value(std::move(out), std::move(v.taint));
        }
        warn(n.span, "operator " + op + " not defined for " + v.type_name());
        return undef(std::move(v.taint));
    }

    Value binary(const AstNode& n, const Environment& env) {
        const std::string& op = *n.name;
        Value a = eval(n.children[0], env);
        if (op == "&&" || op == "||") {
            if ((op == "&&") != a.truthy()) return Value(a.truthy(), std::move(a.taint));
            Value b = eval(n.children[1], env);
            return Value(b.truthy(), a.taint | b.taint);
        }
        Value b = eval(n.children[1], env);
        Taint t = a.taint | b.taint;
        if (op == "==") return Value(a.same(b), std::move(t));
        if (op == "!=") return Value(!a.same(b), std::move(t));
        if (a.is_number() && b.is_number()) {
            const double x = a.number(), y = b.number();
            if (op == "+") return Value(x + y, std::move(t));
            if (op == "-") return Value(x - y, std::move(t));
            if (op == "*") return Value(x * y, std::move(t));
            if (op == "/" || op == "%") {
                if (y == 0) {
                    warn(n.span, "division by zero");
                    return undef(std::move(t));
                }
                return Value(op == "/" ? x / y : std::fmod(x, y), std::move(t));
            }
            if (op == "<") return Value(x < y, std::move(t));
            if (op == "<=") return Value(x <= y, std::move(t));
            if (op == ">") return Value(x > y, std::move(t));
            if (op == ">=") return Value(x >= y, std::move(t));
        }
        const bool va = a.is_numeric_vector(), vb = b.is_numeric_vector();
        if (va && vb && a.vector().size() == b.vector().size()) {
            const auto& x = a.vector();
            const auto& y = b.vector();
            if (op == "+" || op == "-") {
                ValueList out;
                for (std::size_t i = 0; i < x.size(); ++i)
                    out.push_back(Value(op == "+" ? x[i].number() + y[i].number() : x[i].number() - y[i].number(),
                                        x[i].taint | y[i].taint));
                return Value(std::move(out), std::move(t));
            }
            if (op == "*") {
                double s = 0;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    s += x[i].number() * y[i].number();
                    t.merge(x[i].taint);
                    t.merge(y[i].taint);
                }
                return Value(s, std::move(t));
            }
        }
        if ((va && b.is_number()) || (a.is_number() && vb)) {
            const Value& vec = va ? a : b;
            const double s = va ? b.number() : a.number();
            if (op == "*" || (op == "/" && va)) {
                if (op == "/" && s == 0) {
                    warn(n.span, "division by zero");
                    return undef(std::move(t));
                }
                ValueList out;
                for (const Value& e : vec.vector())
                    out.push_back(Value(op == "*" ? e.number() * s : e.number() / s, e.taint));
                return Value(std::move(out), std::move(t));
            }
        }
        warn(n.span, "operator " + op + " not defined for " + a.type_name() + " and " + b.type_name());
        return undef(std::move(t));
    }

    Value call(const AstNode& n, const Environment& env) {
        const std::string& fn = *n.name;
        std::vector<Value> args;
        Taint t;
        for (AstId c : n.children) {
            args.push_back(eval(c, env));
            t.merge(args.back().taint);
        }
        auto unary_fn = [&](auto f) -> Value {
            if (args.size() != 1 || !args[0].is_number()) {
                warn(n.span, fn + "() expects one number");
                return undef(t);
            }
            return Value(f(args[0].number()), t);
        };
        if (fn == "sin") return unary_fn([](double x) { return sin_deg(x); });
        if (fn == "cos") return unary_fn([](double x) { return cos_deg(x); });
        if (fn == "tan") return unary_fn([](double x) { return sin_deg(x) / cos_deg(x); });
        if (fn == "sqrt") return unary_fn([](double x) { return std::sqrt(x); });
        if (fn == "abs") return unary_fn([](double x) { return std::abs(x); });
        if (fn == "floor") return unary_fn([](double x) { return std::floor(x); });
        if (fn == "ceil") return unary_fn([](double x) { return std::ceil(x); });
        if (fn == "min" || fn == "max") {
            const std::vector<Value>& pool = args.size() == 1 && args[0].is_vector() ? args[0].vector() : args;
            std::optional<double> best;
            for (const Value& v : pool) {
                if (!v.is_number()) {
                    warn(n.span, fn + "() expects numbers");
                    return undef(t);
                }
                t.merge(v.taint);
                if (!best || (fn == "min" ? v.number() < *best : v.number() > *best)) best = v.number();
            }
            return best ? Value(*best, t) : undef(t);
        }
        throw EvalError(n.span, "undefined function '" + fn + "'");
    }

    // ---- statements -------------------------------------------------------------------

    std::size_t add_node(CsgKind kind, AstId ast_id, std::size_t parent, std::string label) {
        if (nodes_.size() >= limits_.max_csg_nodes)
            throw EvalError(ast_.node(ast_id).span,
                            "limit exceeded: max_csg_nodes (" + std::to_string(limits_.max_csg_nodes) + ")");
        CsgNode n;
        n.kind = kind;
        n.ast_id = ast_id;
        n.parent = parent;
        n.label = std::move(label);
        const CsgNode& p = nodes_[parent];
        const std::size_t position = p.children.size();
        n.id = p.id.empty() ? std::to_string(position) : p.id + "." + std::to_string(position);
        if (parent != 0) n.call_stack = p.call_stack;
        n.call_stack.push_back(ast_id);
        nodes_.push_back(std::move(n));
        const std::size_t index = nodes_.size() - 1;
        nodes_[parent].children.push_back(index);
        return index;
    }

    /// Evaluates a statement list as one scope: modules and assignments first (the last
    /// assignment to a name wins for the whole scope), then instantiations in order.
    void eval_scope(const std::vector<AstId>& stmts, Environment& env, std::size_t parent) {
        std::vector<std::string> order;
        std::map<std::string, AstId> last;
        for (AstId s : stmts) {
            const AstNode& n = ast_.node(s);
            if (n.kind == AstKind::ModuleDef) env.define_module(*n.name, s);
            if (n.kind == AstKind::Assignment) {
                if (!last.contains(*n.name)) order.push_back(*n.name);
                last[*n.name] = s;
            }
        }
        for (const std::string& name : order) {
            const AstId site = last[name];
            env.define(name, eval_top(ast_.node(site).children.front(), env), site);
        }
        for (AstId s : stmts) {
            const AstKind k = ast_.node(s).kind;
            if (k != AstKind::Assignment && k != AstKind::ModuleDef) eval_statement(s, env, parent);
        }
    }

    /// Child statement of an instantiation, loop, or branch: a Block contributes its
    /// statements directly, in a fresh scope.
    void eval_body(AstId stmt, const Environment& env, std::size_t parent) {
        Environment scope(&env);
        const AstNode& n = ast_.node(stmt);
        if (n.kind == AstKind::Block) eval_scope(n.children, scope, parent);
        else eval_scope({stmt}, scope, parent);
    }

    void eval_statement(AstId id, Environment& env, std::size_t parent) {
        const AstNode& n = ast_.node(id);
        switch (n.kind) {
            case AstKind::Block: {
                if (n.children.empty()) return;
                const std::size_t g = add_node(CsgKind::Group, id, parent, "group");
                Environment scope(&env);
                eval_scope(n.children, scope, g);
                return;
            }
            case AstKind::If: {
                const Value cond = eval_top(n.children[0], env);
                if (cond.truthy()) {
                    const std::size_t g = add_node(CsgKind::Group, id, parent, "if");
                    eval_body(n.children[1], env, g);
                } else if (n.children.size() > 2) {
                    const std::size_t g = add_node(CsgKind::Group, id, parent, "else");
                    eval_body(n.children[2], env, g);
                }
                return;
            }
            case AstKind::For: return eval_for(n, env, parent);
            case AstKind::Instantiation: return eval_instantiation(n, env, parent);
            default: return;
        }
    }

    void eval_for(const AstNode& n, const Environment& env, std::size_t parent) {
        const AstId iterable_id = n.children[0];
        const Value iterable = eval_top(iterable_id, env);
        std::vector<Value> items;
        auto check_count = [&](std::size_t count) {
            if (count > limits_.max_loop_iterations)
                throw EvalError(n.span, "limit exceeded: max_loop_iterations (" +
                                            std::to_string(limits_.max_loop_iterations) + ")");
        };
        if (iterable.is_range()) {
            const Range& r = iterable.range();
            check_count(r.count());
            for (std::size_t i = 0; i < r.count(); ++i) items.push_back(Value(r.at(i), iterable.taint));
        } else if (iterable.is_vector()) {
            check_count(iterable.vector().size());
            for (Value v : iterable.vector()) {
                v.taint.merge(iterable.taint);
                items.push_back(std::move(v));
            }
        } else if (iterable.is_number() || iterable.is_bool()) {
            items.push_back(iterable);
        } else {
            throw EvalError(ast_.node(iterable_id).span, "cannot iterate over " + iterable.type_name());
        }
        for (const Value& item : items) {
            const std::size_t g = add_node(CsgKind::Group, n.id, parent, "for " + *n.name + " = " + item.to_string());
            nodes_[g].taint = item.taint;
            nodes_[g].taint.insert(n.id);
            Environment scope(&env);
            scope.define(*n.name, item, n.id);
            eval_body(n.children[1], scope, g);
        }
    }

    /// Positional/named argument matcher for built-in modules.
    struct Args {
        const AstNode* call = nullptr;
        std::vector<Value> values;
        std::vector<bool> used;
        Taint taint;

        std::optional<std::size_t> slot(std::string_view name, std::optional<std::size_t> position) const {
            for (std::size_t i = 0; i < values.size(); ++i)
                if (call->arg_names[i] == name) return i;
            if (!position) return std::nullopt;
            std::size_t seen = 0;
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (!call->arg_names[i].empty()) continue;
                if (seen++ == *position) return i;
            }
            return std::nullopt;
        }
        const Value* get(std::string_view name, std::optional<std::size_t> position) {
            const auto i = slot(name, position);
            if (!i) return nullptr;
            used[*i] = true;
            taint.merge(values[*i].taint);
            return &values[*i];
        }
    };

    Args eval_args(const AstNode& n, const Environment& env) {
        Args a;
        a.call = &n;
        for (std::size_t i = 0; i < n.arg_count(); ++i) a.values.push_back(eval_top(n.children[i], env));
        a.used.assign(a.values.size(), false);
        return a;
    }

    void warn_unused(const Args& a) {
        for (std::size_t i = 0; i < a.values.size(); ++i)
            if (!a.used[i]) warn(ast_.node(a.call->children[i]).span, "unused argument to " + *a.call->name + "()");
    }

    SourceSpan arg_span(const Args& a, std::string_view name, std::optional<std::size_t> position) const {
        const auto i = a.slot(name, position);
        return i ? ast_.node(a.call->children[*i]).span : a.call->span;
    }

    double number_arg(Args& a, std::string_view name, std::optional<std::size_t> pos, double fallback) {
        const Value* v = a.get(name, pos);
        if (!v || v->is_undef()) return fallback;
        if (!v->is_number())
            throw EvalError(arg_span(a, name, pos), std::string(name) + " must be a number, got " + v->type_name());
        return v->number();
    }

    bool bool_arg(Args& a, std::string_view name, std::optional<std::size_t> pos) {
        const Value* v = a.get(name, pos);
        if (!v || v->is_undef()) return false;
        if (!v->is_bool() && !v->is_number())
            throw EvalError(arg_span(a, name, pos), std::string(name) + " must be a boolean, got " + v->type_name());
        return v->truthy();
    }

    /// Number (broadcast when `scalar_fill`) or vector of up to three numbers padded with `pad`.
    std::optional<Vec3> vec_arg(Args& a, std::string_view name, std::optional<std::size_t> pos,
                                std::optional<double> scalar_fill, double pad, bool exactly3) {
        const Value* v = a.get(name, pos);
        if (!v || v->is_undef()) return std::nullopt;
        const SourceSpan span = arg_span(a, name, pos);
        if (v->is_number()) {
            if (!scalar_fill) throw EvalError(span, std::string(name) + " must be a vector");
            const double s = v->number();
            return Vec3{s, s, s};
        }
        if (!v->is_numeric_vector() || v->vector().empty() || v->vector().size() > 3 ||
            (exactly3 && v->vector().size() != 3))
            throw EvalError(span, std::string(name) + " must be " + (exactly3 ? "a 3-vector" : "a vector of 1 to 3") +
                                      " numbers, got " + v->to_string());
        Vec3 out{pad, pad, pad};
        for (std::size_t i = 0; i < v->vector().size(); ++i) out[static_cast<int>(i)] = v->vector()[i].number();
        return out;
    }

    double resolve_fn(Args& a, const Environment& env, Taint& taint) {
        double fn = 0;
        if (const Value* v = a.get("$fn", std::nullopt); v && !v->is_undef()) {
            if (!v->is_number()) throw EvalError(arg_span(a, "$fn", std::nullopt), "$fn must be a number");
            fn = v->number();
        } else if (const auto* b = env.lookup("$fn"); b && b->value.is_number()) {
            fn = b->value.number();
            taint.merge(b->value.taint);
            taint.insert(b->site);
        }
        if (!(fn > 0) || !std::isfinite(fn)) return default_fn_;
        return std::max(3.0, std::floor(fn));
    }

    void require_finite(const Args& a, const Vec3& v, std::string_view name) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
            throw EvalError(a.call->span, std::string(name) + " must be finite");
    }

    void eval_instantiation(const AstNode& n, Environment& env, std::size_t parent) {
        const std::string& name = *n.name;
        static const std::map<std::string, CsgKind, std::less<>> builtins = {
            {"cube", CsgKind::PrimCube},       {"sphere", CsgKind::PrimSphere},
            {"cylinder", CsgKind::PrimCylinder}, {"translate", CsgKind::Translate},
            {"rotate", CsgKind::Rotate},       {"scale", CsgKind::Scale},
            {"union", CsgKind::Union},         {"difference", CsgKind::Difference},
            {"intersection", CsgKind::Intersection},
        };
        if (const auto module = env.lookup_module(name)) return eval_module_call(n, env, parent, *module);
        const auto it = builtins.find(name);
        if (it == builtins.end()) throw EvalError(n.span, "undefined module '" + name + "'");
        const CsgKind kind = it->second;

        Args args = eval_args(n, env);
        Taint extra;
        std::vector<std::pair<std::string, ParamValue>> params;
        Mat4 matrix;
        switch (kind) {
            case CsgKind::PrimCube: {
                const Vec3 size = vec_arg(args, "size", 0, 1.0, 0, true).value_or(Vec3{1, 1, 1});
                require_finite(args, size, "size");
                params = {{"size", size}, {"center", bool_arg(args, "center", 1)}};
                break;
            }
            case CsgKind::PrimSphere: {
                const double r = number_arg(args, "r", 0, 1);
                params = {{"r", r}, {"fn", resolve_fn(args, env, extra)}};
                break;
            }
            case CsgKind::PrimCylinder: {
                const double h = number_arg(args, "h", 0, 1);
                const double r = number_arg(args, "r", std::nullopt, 1);
                const double r1 = number_arg(args, "r1", 1, r);
                const double r2 = number_arg(args, "r2", 2, r);
                const bool center = bool_arg(args, "center", 3);
                params = {{"h", h}, {"r1", r1}, {"r2", r2}, {"center", center}, {"fn", resolve_fn(args, env, extra)}};
                break;
            }
            case CsgKind::Translate: {
                const Vec3 v = vec_arg(args, "v", 0, std::nullopt, 0, false).value_or(Vec3{});
                require_finite(args, v, "v");
                params = {{"v", v}};
                matrix = Mat4::translation(v);
                break;
            }
            case CsgKind::Rotate: {
                std::optional<Vec3> a;
                const Value* raw = args.get("a", 0);
                if (raw && raw->is_number()) a = Vec3{0, 0, raw->number()};
                else if (raw && !raw->is_undef()) {
                    args.used.assign(args.used.size(), false);
                    a = vec_arg(args, "a", 0, std::nullopt, 0, false);
                }
                const Vec3 angles = a.value_or(Vec3{});
                require_finite(args, angles, "a");
                params = {{"a", angles}};
                matrix = Mat4::from_linear(rotation_xyz(angles));
                break;
            }
            case CsgKind::Scale: {
                const Vec3 v = vec_arg(args, "v", 0, 1.0, 1, false).value_or(Vec3{1, 1, 1});
                require_finite(args, v, "v");
                if (v.x == 0 || v.y == 0 || v.z == 0) throw EvalError(arg_span(args, "v", 0), "scale factor must be nonzero");
                params = {{"v", v}};
                matrix = Mat4::scaling(v);
                break;
            }
            default: break;
        }
        warn_unused(args);

        static const std::map<CsgKind, const char*> labels = {
            {CsgKind::PrimCube, "cube"},         {CsgKind::PrimSphere, "sphere"}, {CsgKind::PrimCylinder, "cylinder"},
            {CsgKind::Translate, "translate"},   {CsgKind::Rotate, "rotate"},     {CsgKind::Scale, "scale"},
            {CsgKind::Union, "union"},           {CsgKind::Difference, "difference"},
            {CsgKind::Intersection, "intersection"},
        };
        const std::size_t idx = add_node(kind, n.id, parent, labels.at(kind));
        nodes_[idx].params = std::move(params);
        nodes_[idx].matrix = matrix;
        nodes_[idx].taint = args.taint | extra;

        if (const auto child = n.child_statement()) {
            if (is_primitive(kind)) warn(ast_.node(*child).span, name + "() takes no children; ignored");
            else eval_body(*child, env, idx);
        }
        if (kind == CsgKind::Difference && nodes_[idx].children.empty()) {
            warn(n.span, "difference() without children");
            nodes_[idx].kind = CsgKind::Group;
        }
    }

    void eval_module_call(const AstNode& n, const Environment& env, std::size_t parent,
                          std::pair<AstId, const Environment*> module) {
        if (depth_ >= limits_.max_recursion_depth)
            throw EvalError(n.span, "limit exceeded: max_recursion_depth (" +
                                        std::to_string(limits_.max_recursion_depth) + ")");
        const AstNode& def = ast_.node(module.first);
        Args args = eval_args(n, env);
        const std::size_t g = add_node(CsgKind::Group, n.id, parent, "module " + *n.name);

        Environment params(module.second);
        for (std::size_t i = 0; i + 1 < def.children.size(); ++i) {
            const AstNode& p = ast_.node(def.children[i]);
            if (const Value* v = args.get(*p.name, i)) {
                params.define(*p.name, *v, p.id);
            } else if (!p.children.empty()) {
                params.define(*p.name, eval_top(p.children.front(), params), p.id);
            } else {
                params.define(*p.name, Value(), p.id);
            }
        }
        warn_unused(args);
        nodes_[g].taint = args.taint;
        if (const auto child = n.child_statement())
            warn(ast_.node(*child).span, "module " + *n.name + " does not accept children; ignored");

        ++depth_;
        eval_body(def.children.back(), params, g);
        --depth_;
    }

    const Ast& ast_;
    EvalLimits limits_;
    int default_fn_;
    int depth_ = 0;
    std::vector<CsgNode> nodes_;
    std::unordered_map<AstId, Taint> expr_taint_;
    std::vector<Diagnostic> warnings_;
};

}  // namespace detail

inline EvalResult evaluate_program(const Ast& ast, const EvalLimits& limits = {}, int default_fn = kDefaultFn) {
    EvalResult result;
    try {
        detail::Evaluator ev(ast, limits, default_fn);
        result.tree.emplace(ev.run());
        result.diagnostics = result.tree->warnings();
    } catch (const EvalError& e) {
        result.diagnostics.push_back({e.span(), e.what(), Severity::error});
    }
    return result;
}

/// Evaluates a single expression node in `env`. Throws EvalError on undefined names.
inline Value eval_expr(const Ast& ast, AstId expr, const Environment& env) {
    detail::Evaluator ev(ast, {}, kDefaultFn);
    return ev.eval(expr, env);
}

}  // namespace bcs
