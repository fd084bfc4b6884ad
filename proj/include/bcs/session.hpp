#pragma once

#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bcs/evaluator.hpp"
#include "bcs/json_io.hpp"
#include "bcs/parser.hpp"
#include "bcs/provenance.hpp"
#include "bcs/rewriter.hpp"
#include "bcs/scene.hpp"

namespace bcs {

/// Parse, evaluate, and mesh results for one source text.
struct Compiled {
    std::string source;
    Ast ast;
    CsgTree tree;
    std::unique_ptr<MeshBuilder> meshes;
    Scene scene;

    Compiled(std::string src, Ast a, CsgTree t) : source(std::move(src)), ast(std::move(a)), tree(std::move(t)) {}
};

struct CompileOutcome {
    std::shared_ptr<Compiled> compiled;
    std::vector<Diagnostic> diagnostics;
};

struct CompileOptions {
    EvalLimits limits;
    int default_fn = kDefaultFn;
    std::optional<int> fn_override;
};

/// Default `$fn`, overridable through the BCS_DEFAULT_FN environment variable.
inline int default_fn_from_env() {
    if (const char* v = std::getenv("BCS_DEFAULT_FN")) {
        char* end = nullptr;
        const long n = std::strtol(v, &end, 10);
        if (end != v && *end == '\0' && n >= 3 && n <= 4096) return static_cast<int>(n);
    }
    return kDefaultFn;
}

/// Full pipeline. Errors of every stage come back as diagnostics.
inline CompileOutcome compile(const std::string& source, const CompileOptions& options = {}) {
    CompileOutcome out;
    ParseResult parsed = parse(source);
    out.diagnostics = parsed.diagnostics;
    if (!parsed.ast || has_errors(parsed.diagnostics)) return out;
    EvalResult evaluated = evaluate_program(*parsed.ast, options.limits, options.default_fn);
    out.diagnostics.insert(out.diagnostics.end(), evaluated.diagnostics.begin(), evaluated.diagnostics.end());
    if (!evaluated.tree) return out;
    auto c = std::make_shared<Compiled>(source, *parsed.ast, std::move(*evaluated.tree));
    c->meshes = std::make_unique<MeshBuilder>(c->tree, options.fn_override);
    try {
        c->scene = compute_scene(*c->meshes, c->tree);
    } catch (const GeometryError& e) {
        out.diagnostics.push_back({e.span().value_or(SourceSpan{}), e.what(), Severity::error});
        return out;
    }
    out.compiled = std::move(c);
    return out;
}

/// Editing session: current source, its compiled artifacts, selection, and drag state.
class Session {
public:
    explicit Session(CompileOptions options = {}) : options_(options) {}

    bool is_open() const { return current_ != nullptr; }
    long revision() const { return revision_; }
    const Compiled& current() const {
        if (!current_) throw Error("no_session", "no source opened");
        return *current_;
    }
    const std::string& source() const { return current().source; }
    const CsgTree& tree() const { return current().tree; }
    const std::optional<NodeId>& selection() const { return selection_; }

    /// Replaces the source. On failure the previous artifacts and revision stay in place.
    std::vector<Diagnostic> set_source(const std::string& text) {
        CompileOutcome out = compile(text, options_);
        if (out.compiled) {
            current_ = std::move(out.compiled);
            ++revision_;
            selection_.reset();
        }
        return out.diagnostics;
    }

    HighlightState select(const NodeId& id) {
        HighlightState st = select_node(tree(), id);
        selection_ = id;
        return st;
    }
    void clear_selection() { selection_.reset(); }

    /// Scene with ghosts for the active selection.
    Scene scene() {
        Compiled& c = mutable_current();
        Scene s = c.scene;
        if (selection_) {
            for (const GhostSpec& g : select_node(c.tree, *selection_).ghosts)
                s.ghosts.push_back(make_ghost(*c.meshes, c.tree, c.tree.index_of(g.source_subtree), g.classification));
        }
        return s;
    }

    struct Drag {
        std::shared_ptr<Compiled> snapshot;
        long revision = 0;
        NodeId node_id;
        std::string kind;
    };

    void begin_drag(const NodeId& id, const std::string& kind) {
        current().tree.index_of(id);
        drag_ = Drag{current_, revision_, id, kind};
    }
    const std::optional<Drag>& drag() const { return drag_; }
    void end_drag() { drag_.reset(); }

    struct Mutation {
        TextEdit edit;
        EditAction action = EditAction::inserted_new;
        std::vector<Diagnostic> diagnostics;
        bool applied = false;
    };

    /// Applies an edit computed against the current source.
    Mutation commit(const EditResult& r) {
        Mutation m{r.edit, r.action, set_source(r.new_source), false};
        m.applied = !has_errors(m.diagnostics) && current_->source == r.new_source;
        return m;
    }

    /// Applies an edit computed against the drag snapshot, reported as the minimal change
    /// relative to the current source.
    Mutation commit_from_snapshot(const EditResult& r) {
        const std::string& old = source();
        const std::string& now = r.new_source;
        std::size_t prefix = 0;
        while (prefix < old.size() && prefix < now.size() && old[prefix] == now[prefix]) ++prefix;
        std::size_t suffix = 0;
        while (suffix < old.size() - prefix && suffix < now.size() - prefix &&
               old[old.size() - 1 - suffix] == now[now.size() - 1 - suffix])
            ++suffix;
        TextEdit edit{current().ast.lines().span(prefix, old.size() - suffix),
                      now.substr(prefix, now.size() - suffix - prefix)};
        Mutation m{edit, r.action, {}, false};
        if (old == now) {
            m.applied = true;
            return m;
        }
        m.diagnostics = set_source(now);
        m.applied = current_->source == now;
        return m;
    }

    const CompileOptions& options() const { return options_; }

private:
    Compiled& mutable_current() {
        if (!current_) throw Error("no_session", "no source opened");
        return *current_;
    }

    CompileOptions options_;
    std::shared_ptr<Compiled> current_;
    long revision_ = 0;
    std::optional<NodeId> selection_;
    std::optional<Drag> drag_;
};

namespace detail {

inline Error bad_request(const std::string& message) { return Error("bad_request", message); }

inline const json& field(const json& params, const char* name) {
    if (!params.is_object() || !params.contains(name)) throw bad_request(std::string("missing field '") + name + "'");
    return params.at(name);
}

inline std::string string_field(const json& params, const char* name) {
    const json& v = field(params, name);
    if (!v.is_string()) throw bad_request(std::string("field '") + name + "' must be a string");
    return v.get<std::string>();
}

inline double number_field(const json& params, const char* name) {
    const json& v = field(params, name);
    if (!v.is_number()) throw bad_request(std::string("field '") + name + "' must be a number");
    return v.get<double>();
}

inline Vec3 vec3_field(const json& params, const char* name) {
    const json& v = field(params, name);
    if (!v.is_array() || v.size() != 3) throw bad_request(std::string("field '") + name + "' must be [x, y, z]");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        if (!v[static_cast<std::size_t>(i)].is_number())
            throw bad_request(std::string("field '") + name + "' must hold numbers");
        out[i] = v[static_cast<std::size_t>(i)].get<double>();
    }
    return out;
}

inline Axis axis_field(const json& params) {
    const std::string a = string_field(params, "axis");
    if (a == "x") return Axis::x;
    if (a == "y") return Axis::y;
    if (a == "z") return Axis::z;
    throw bad_request("axis must be x, y, or z");
}

/// Byte range as {start, end} or [start, end], resolved against the current source.
inline SourceSpan span_field(const json& params, const Ast& ast) {
    const json& v = field(params, "span");
    auto offset = [](const json& x) -> std::size_t {
        if (!x.is_number_integer() && !x.is_number_unsigned()) throw bad_request("span offsets must be integers");
        const auto n = x.get<long long>();
        if (n < 0) throw bad_request("span offsets must be non-negative");
        return static_cast<std::size_t>(n);
    };
    std::size_t start = 0, end = 0;
    if (v.is_array() && v.size() == 2) {
        start = offset(v[0]);
        end = offset(v[1]);
    } else if (v.is_object() && v.contains("start") && v.contains("end")) {
        start = offset(v["start"]);
        end = offset(v["end"]);
    } else {
        throw bad_request("span must be {start, end} or [start, end]");
    }
    if (start > end || end > ast.source().size()) throw Error("bad_selection", "selection outside source");
    return ast.lines().span(start, end);
}

/// Computes the edit for a transform request against a given compiled snapshot.
inline EditResult transform_edit(const CsgTree& tree, const NodeId& node, const std::string& kind,
                                 const json& params) {
    if (kind == "translate") return apply_translation(tree, node, vec3_field(params, "delta"));
    if (kind == "rotate") return apply_rotation(tree, node, axis_field(params), number_field(params, "angle"));
    if (kind == "scale" || kind == "scale_primitive") {
        ScaleMode mode = kind == "scale" ? ScaleMode::scale_node : ScaleMode::scale_primitive;
        if (params.is_object() && params.contains("mode")) {
            const std::string m = string_field(params, "mode");
            if (m == "scale_node") mode = ScaleMode::scale_node;
            else if (m == "scale_primitive") mode = ScaleMode::scale_primitive;
            else throw bad_request("mode must be scale_node or scale_primitive");
        }
        return apply_scale(tree, node, vec3_field(params, "factors"), mode);
    }
    throw bad_request("kind must be translate, rotate, scale, or scale_primitive");
}

inline std::string base64(std::string_view bytes) {
    static constexpr char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                           static_cast<unsigned char>(bytes[i + 2]);
        out += {table[(v >> 18) & 63], table[(v >> 12) & 63], table[(v >> 6) & 63], table[v & 63]};
    }
    if (i + 1 == bytes.size()) {
        const unsigned v = static_cast<unsigned char>(bytes[i]) << 16;
        out += {table[(v >> 18) & 63], table[(v >> 12) & 63], '=', '='};
    } else if (i + 2 == bytes.size()) {
        const unsigned v = (static_cast<unsigned char>(bytes[i]) << 16) | (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out += {table[(v >> 18) & 63], table[(v >> 12) & 63], table[(v >> 6) & 63], '='};
    }
    return out;
}

}  // namespace detail

/// Dispatches one protocol request. Never throws: failures become `{ok: false, error}`.
inline json handle_request(Session& session, const json& request) {
    json response = {{"id", nullptr}};
    auto fail = [&](const std::string& code, const std::string& message) {
        response["ok"] = false;
        response["error"] = {{"code", code}, {"message", message}};
        return response;
    };
    if (!request.is_object()) return fail("bad_request", "request must be a JSON object");
    if (request.contains("id")) response["id"] = request["id"];
    try {
        const std::string method = detail::string_field(request, "method");
        const json params = request.contains("params") ? request["params"] : json::object();
        if (!params.is_object()) return fail("bad_request", "params must be an object");

        std::optional<long> revision;
        if (request.contains("revision") && !request["revision"].is_null()) {
            if (!request["revision"].is_number_integer()) return fail("bad_request", "revision must be an integer");
            revision = request["revision"].get<long>();
        }
        if (method != "open" && method != "setSource" && revision && session.is_open() &&
            *revision != session.revision())
            return fail("stale_revision", "stale node id; recompile required");

        json result;
        auto mutation = [&](const Session::Mutation& m) {
            result["revision"] = session.revision();
            result["edit"] = to_json(m.edit);
            result["action"] = to_string(m.action);
            result["applied"] = m.applied;
            result["diagnostics"] = to_json(m.diagnostics);
            result["scene"] = to_json(session.scene());
        };
        auto compiled_state = [&](const std::vector<Diagnostic>& diags) {
            result["revision"] = session.revision();
            result["diagnostics"] = to_json(diags);
            result["scene"] = session.is_open() ? to_json(session.scene()) : json(nullptr);
        };

        if (method == "open") {
            compiled_state(session.set_source(detail::string_field(params, "source")));
        } else if (method == "setSource") {
            compiled_state(session.set_source(detail::string_field(params, "text")));
        } else if (method == "getSource") {
            result = {{"revision", session.revision()}, {"source", session.source()}};
        } else if (method == "getScene") {
            result = {{"revision", session.revision()}, {"scene", to_json(session.scene())}};
        } else if (method == "getTree") {
            result = to_json(session.tree());
            result["revision"] = session.revision();
        } else if (method == "pick") {
            const auto hit = pick(session.scene(), detail::vec3_field(params, "origin"), detail::vec3_field(params, "dir"));
            result = hit ? to_json(*hit) : json{{"leaf_id", nullptr}};
            result["hit"] = hit.has_value();
            result["revision"] = session.revision();
        } else if (method == "menu") {
            result = to_json(menu_for(session.tree(), detail::string_field(params, "leaf_id")));
            result["revision"] = session.revision();
        } else if (method == "select") {
            if (params.contains("node_id") && params["node_id"].is_null()) {
                session.clear_selection();
                result = to_json(HighlightState{});
            } else {
                result = to_json(session.select(detail::string_field(params, "node_id")));
            }
            json ghosts = json::array();
            for (const GhostPart& g : session.scene().ghosts) ghosts.push_back(to_json(g));
            result["ghost_parts"] = std::move(ghosts);
            result["revision"] = session.revision();
        } else if (method == "forwardSearch" || method == "variableSearch") {
            const SourceSpan span = detail::span_field(params, session.current().ast);
            result = to_json(method == "forwardSearch" ? forward_search(session.tree(), span)
                                                       : variable_search(session.tree(), span));
            result["revision"] = session.revision();
        } else if (method == "frame") {
            result = to_json(gizmo_frame(session.tree(), detail::string_field(params, "node_id")));
            result["revision"] = session.revision();
        } else if (method == "beginDrag") {
            const NodeId node = detail::string_field(params, "node_id");
            const std::string kind = detail::string_field(params, "kind");
            if (kind != "translate" && kind != "rotate" && kind != "scale" && kind != "scale_primitive")
                return fail("bad_request", "kind must be translate, rotate, scale, or scale_primitive");
            session.begin_drag(node, kind);
            result = {{"revision", session.revision()}, {"frame", to_json(gizmo_frame(session.tree(), node))}};
        } else if (method == "updateDrag") {
            const auto& drag = session.drag();
            if (!drag) return fail("bad_request", "no drag in progress");
            const EditResult r = detail::transform_edit(drag->snapshot->tree, drag->node_id, drag->kind, params);
            mutation(session.commit_from_snapshot(r));
        } else if (method == "endDrag") {
            session.end_drag();
            result = {{"revision", session.revision()}};
        } else if (method == "applyTransform") {
            const EditResult r = detail::transform_edit(session.tree(), detail::string_field(params, "node_id"),
                                                        detail::string_field(params, "kind"),
                                                        params.contains("params") ? params["params"] : params);
            mutation(session.commit(r));
        } else if (method == "export") {
            std::string format = "binary";
            if (params.contains("format")) format = detail::string_field(params, "format");
            if (format != "binary" && format != "ascii") return fail("bad_request", "format must be binary or ascii");
            const Scene scene = session.current().scene;
            const std::string stl = export_stl(scene, format == "binary" ? StlFormat::binary : StlFormat::ascii);
            result = {{"revision", session.revision()},
                      {"format", format},
                      {"triangle_count", scene.triangle_count()},
                      {"data", format == "binary" ? detail::base64(stl) : stl}};
        } else {
            return fail("bad_request", "unknown method '" + method + "'");
        }
        response["ok"] = true;
        response["result"] = std::move(result);
        return response;
    } catch (const Error& e) {
        return fail(e.code(), e.what());
    } catch (const json::exception& e) {
        return fail("bad_request", e.what());
    } catch (const std::exception& e) {
        return fail("internal", e.what());
    }
}

/// Maximum accepted request size in bytes.
inline constexpr std::size_t kMaxRequestBytes = 64u << 20;

/// One newline-delimited request in, one serialized response out.
inline std::string handle_line(Session& session, std::string_view line) {
    json response;
    if (line.size() > kMaxRequestBytes) {
        response = {{"id", nullptr}, {"ok", false}, {"error", {{"code", "bad_request"}, {"message", "request too large"}}}};
    } else {
        const json request = json::parse(line, nullptr, false);
        if (request.is_discarded())
            response = {{"id", nullptr}, {"ok", false}, {"error", {{"code", "bad_request"}, {"message", "malformed JSON"}}}};
        else
            response = handle_request(session, request);
    }
    return dump(response);
}

}  // namespace bcs
