#pragma once

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "bcs/csg.hpp"
#include "bcs/provenance.hpp"
#include "bcs/rewriter.hpp"
#include "bcs/scene.hpp"
#include "bcs/source.hpp"

namespace bcs {

using json = nlohmann::json;

inline json to_json(const SourceSpan& s) {
    return {{"start", s.start},         {"end", s.end},         {"start_line", s.start_line},
            {"start_col", s.start_col}, {"end_line", s.end_line}, {"end_col", s.end_col}};
}

inline json to_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

inline json to_json(const Mat4& m) {
    json rows = json::array();
    for (int r = 0; r < 4; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2), m(r, 3)}));
    return rows;
}

inline json to_json(const Mat3& m) {
    json rows = json::array();
    for (int r = 0; r < 3; ++r) rows.push_back(json::array({m(r, 0), m(r, 1), m(r, 2)}));
    return rows;
}

inline json to_json(const Diagnostic& d) {
    return {{"span", to_json(d.span)}, {"message", d.message}, {"severity", to_string(d.severity)}};
}

inline json to_json(const std::vector<Diagnostic>& ds) {
    json out = json::array();
    for (const Diagnostic& d : ds) out.push_back(to_json(d));
    return out;
}

inline json mesh_fields(const Mesh& m) {
    json vertices = json::array();
    for (const Vec3& v : m.vertices) vertices.push_back(to_json(v));
    json triangles = json::array();
    for (const auto& t : m.triangles) triangles.push_back(json::array({t[0], t[1], t[2]}));
    return {{"vertices", std::move(vertices)}, {"triangles", std::move(triangles)}, {"face_source", m.face_source}};
}

inline json to_json(const GhostPart& g) {
    json j = mesh_fields(g.mesh);
    j["source_subtree"] = g.source_subtree;
    j["operation"] = g.operation;
    j["classification"] = to_string(g.classification);
    j["world_matrix"] = to_json(g.world_matrix);
    return j;
}

inline json to_json(const Scene& scene) {
    json parts = json::array();
    for (const Part& p : scene.parts) {
        json j = mesh_fields(p.mesh);
        j["node_id"] = p.node_id;
        parts.push_back(std::move(j));
    }
    json ghosts = json::array();
    for (const GhostPart& g : scene.ghosts) ghosts.push_back(to_json(g));
    return {{"parts", std::move(parts)}, {"ghosts", std::move(ghosts)}};
}

inline json to_json(const Hit& h) {
    return {{"leaf_id", h.leaf_id}, {"t", h.t}, {"point", to_json(h.point)}, {"is_ghost", h.is_ghost},
            {"part_id", h.part_id}};
}

inline json to_json(const MenuModel& m) {
    json entries = json::array();
    for (const MenuEntry& e : m.entries) entries.push_back({{"node_id", e.node_id}, {"label", e.label}, {"line", e.line}});
    return {{"entries", std::move(entries)}};
}

inline json to_json(const HighlightState& st) {
    json target = json::array();
    for (const TargetSpan& t : st.target_spans) target.push_back({{"span", to_json(t.span)}, {"call_order", t.call_order}});
    json impacted = json::array();
    for (const SourceSpan& s : st.impacted_spans) impacted.push_back(to_json(s));
    json ghosts = json::array();
    for (const GhostSpec& g : st.ghosts)
        ghosts.push_back({{"source_subtree", g.source_subtree},
                          {"classification", to_string(g.classification)},
                          {"world_matrix", to_json(g.world_matrix)}});
    json j = {{"target_spans", std::move(target)},
              {"impacted_spans", std::move(impacted)},
              {"target_node_ids", st.target_node_ids},
              {"impacted_node_ids", st.impacted_node_ids},
              {"ghosts", std::move(ghosts)}};
    j["notice"] = st.notice ? json(*st.notice) : json(nullptr);
    return j;
}

inline json to_json(const Frame& f) { return {{"rotation", to_json(f.rotation)}, {"origin", to_json(f.origin)}}; }

inline json to_json(const TextEdit& e) { return {{"span", to_json(e.span)}, {"replacement", e.replacement}}; }

inline json to_json(const EditResult& r) {
    return {{"new_source", r.new_source}, {"edit", to_json(r.edit)}, {"action", to_string(r.action)}};
}

inline json to_json(const ParamValue& p) {
    if (const auto* d = std::get_if<double>(&p)) return *d;
    if (const auto* b = std::get_if<bool>(&p)) return *b;
    return to_json(std::get<Vec3>(p));
}

inline json to_json(const CsgTree& tree) {
    json nodes = json::array();
    for (const CsgNode& n : tree.nodes()) {
        json params = json::object();
        for (const auto& [k, v] : n.params) params[k] = to_json(v);
        json children = json::array();
        for (std::size_t c : n.children) children.push_back(tree.at(c).id);
        nodes.push_back({{"id", n.id},
                         {"kind", to_string(n.kind)},
                         {"label", n.label},
                         {"params", std::move(params)},
                         {"matrix", to_json(n.matrix)},
                         {"ast_id", n.ast_id},
                         {"call_stack", n.call_stack},
                         {"taint", n.taint.ids()},
                         {"children", std::move(children)}});
    }
    return {{"nodes", std::move(nodes)}};
}

/// Serializes without throwing on invalid UTF-8 in source text.
inline std::string dump(const json& j, int indent = -1) { return j.dump(indent, ' ', false, json::error_handler_t::replace); }

}  // namespace bcs
