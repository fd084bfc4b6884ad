// Acceptance gate: one PASS/FAIL line per primary criterion. Exit status is nonzero on any FAIL.
#include <chrono>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace bcs;
namespace bt = bcs::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<std::string> failures;

    void check(bool ok, const std::string& what) {
        if (ok) return;
        pass = false;
        if (failures.size() < 8) failures.push_back(what);
    }
};

int failed = 0;

void report(const std::string& name, const Outcome& o) {
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << "\n";
    for (const auto& f : o.failures) std::cout << "      " << f << "\n";
    std::cout.flush();
    if (!o.pass) ++failed;
}

template <typename F>
void criterion(const std::string& name, F&& body) {
    Outcome o;
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail += " (aborted: " + std::string(e.what()) + ")";
    }
    report(name, o);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, int precision = 3) {
    std::ostringstream ss;
    ss.precision(precision);
    ss << v;
    return ss.str();
}

double scene_volume(const std::string& source) {
    const auto c = bt::build(source, 64);
    double v = 0;
    for (const auto& p : c->scene.parts) v += mesh_volume(p.mesh);
    return v;
}

bool is_boolean(CsgKind k) { return k == CsgKind::Difference || k == CsgKind::Intersection; }

/// Operands of a boolean that get ghosts; consecutive iterations of one loop form a single operand.
std::size_t ghost_operands(const CsgTree& t, std::size_t op) {
    const CsgNode& n = t.at(op);
    if (n.kind == CsgKind::Intersection) return n.children.size();
    if (n.children.empty()) return 0;
    auto iteration = [&](std::size_t c) {
        return t.at(c).kind == CsgKind::Group && t.ast().node(t.at(c).ast_id).kind == AstKind::For;
    };
    std::size_t first = 1;
    if (iteration(n.children[0]))
        while (first < n.children.size() && iteration(n.children[first]) &&
               t.at(n.children[first]).ast_id == t.at(n.children[0]).ast_id)
            ++first;
    return n.children.size() - first;
}

json request(Session& s, const json& r) { return json::parse(handle_line(s, r.dump())); }

std::string splice(const std::string& s, const json& edit) {
    const std::size_t start = edit["span"]["start"], end = edit["span"]["end"];
    return s.substr(0, start) + edit["replacement"].get<std::string>() + s.substr(end);
}

// ---------------------------------------------------------------------------------------------

void pipeline(Outcome& o) {
    const auto paths = bt::fixture_paths();
    o.check(paths.size() >= 20, "corpus has fewer than 20 fixtures");
    bool loops = false, modules = false, difference = false, intersection = false;
    double worst = 0;
    std::string worst_name;
    std::size_t largest = 0;
    for (const auto& p : paths) {
        const std::string src = bt::read_text(p);
        const auto start = std::chrono::steady_clock::now();
        CompileOptions options;
        const CompileOutcome out = compile(src, options);
        const double took = seconds_since(start);
        if (took > worst) worst = took, worst_name = p.filename().string();
        if (!out.compiled) {
            o.check(false, p.filename().string() + " failed to compile");
            continue;
        }
        const CsgTree& t = out.compiled->tree;
        largest = std::max(largest, t.size());
        o.check(took < 5.0, p.filename().string() + " took " + fmt(took) + " s");
        o.check(t.size() <= 1000, p.filename().string() + " exceeds 1000 nodes");
        for (const CsgNode& n : t.nodes()) {
            if (is_primitive(n.kind)) o.check(n.children.empty(), p.filename().string() + ": primitive " + n.id + " has children");
            loops |= n.kind == CsgKind::Group && t.ast().node(n.ast_id).kind == AstKind::For;
            difference |= n.kind == CsgKind::Difference;
            intersection |= n.kind == CsgKind::Intersection;
            modules |= n.label.rfind("module ", 0) == 0;
        }
        for (const auto& part : out.compiled->scene.parts)
            for (const NodeId& id : part.mesh.face_source)
                o.check(is_primitive(t.get(id).kind), p.filename().string() + ": face from non-primitive " + id);
    }
    o.check(loops && modules && difference && intersection, "corpus lacks loops, modules, or booleans");
    o.detail = std::to_string(paths.size()) + " fixtures compiled; slowest " + worst_name + " " + fmt(worst) +
               " s (limit 5 s); largest tree " + std::to_string(largest) + " nodes";
}

void boolean_volumes(Outcome& o) {
    const double expected = 1000 - 4.0 / 3.0 * std::numbers::pi * 64;
    const double got = scene_volume("difference(){cube(10, center = true); sphere(4, $fn = 64);}");
    const double rel = std::abs(got - expected) / expected;
    o.check(rel < 0.02, "cube minus sphere volume " + fmt(got, 8) + " vs " + fmt(expected, 8));

    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> size(1, 6), offset(-3, 3), radius(0.5, 3.5);
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        const std::string a = "cube(" + format_number(size(rng)) + ", center = true);";
        const std::string b = "translate(" + format_vector({offset(rng), offset(rng), offset(rng)}) + ") sphere(" +
                              format_number(radius(rng)) + ", $fn = " + std::to_string(6 + rng() % 20) + ");";
        const std::string far = "translate([40, 0, 0]) " + b;
        const double va = scene_volume(a), vb = scene_volume(b);
        const double vu = scene_volume("union(){" + a + far + "}");
        const double vi = scene_volume("intersection(){" + a + b + "}");
        const double vd = scene_volume("difference(){" + a + b + "}");
        const double e1 = std::abs(vu - (va + vb)) / (va + vb);
        const double e2 = std::abs(va - (vi + vd)) / va;
        worst = std::max({worst, e1, e2});
        o.check(e1 < 1e-6, "pair " + std::to_string(i) + " union additivity error " + fmt(e1));
        o.check(e2 < 1e-6, "pair " + std::to_string(i) + " A = (A&B) + (A-B) error " + fmt(e2) + " for " + a + " " + b);
    }
    o.detail = "difference volume " + fmt(got, 6) + " vs analytic " + fmt(expected, 6) + " (rel " + fmt(rel) +
               ", limit 0.02); 50 random pairs, worst identity error " + fmt(worst) + " (limit 1e-6)";
}

void duality(Outcome& o) {
    std::size_t leaves = 0, nodes = 0;
    for (const auto& p : bt::fixture_paths()) {
        const CsgTree t = bt::tree_of(bt::read_text(p));
        for (std::size_t leaf : t.leaves(0)) {
            ++leaves;
            const CsgNode& n = t.at(leaf);
            const HighlightState fwd = forward_search(t, t.ast().node(n.ast_id).span);
            const bool found = std::count(fwd.target_node_ids.begin(), fwd.target_node_ids.end(), n.id) ||
                               std::count(fwd.impacted_node_ids.begin(), fwd.impacted_node_ids.end(), n.id);
            o.check(found, p.filename().string() + ": forward search misses " + n.id);
        }
        for (std::size_t i = 0; i < t.size(); ++i) {
            ++nodes;
            const MenuModel menu = menu_for(t, t.at(i).id);
            std::vector<NodeId> branch;
            for (auto it = menu.entries.rbegin(); it != menu.entries.rend(); ++it) branch.push_back(it->node_id);
            o.check(branch == select_node(t, t.at(i).id).target_node_ids,
                    p.filename().string() + ": menu differs from target path at " + t.at(i).id);
        }
    }
    o.detail = std::to_string(leaves) + " leaves forward-searched, " + std::to_string(nodes) +
               " menus compared with target paths";
}

void impacted(Outcome& o) {
    const CsgTree t = bt::tree_of("module m(){ sphere(1); }\nm();\nm();\nm();");
    const HighlightState st = select_node(t, "1.0");
    const auto& spheres = t.instances_of(t.get("1.0").ast_id);
    std::size_t targets = 0;
    for (std::size_t s : spheres)
        targets += std::count(st.target_node_ids.begin(), st.target_node_ids.end(), t.at(s).id);
    o.check(spheres.size() == 3, "expected three sphere instances");
    o.check(targets == 1, "target instances: " + std::to_string(targets));
    o.check(st.impacted_node_ids == std::vector<NodeId>({"0.0", "2.0"}), "impacted instances differ");
    o.check(st.target_spans.size() == 2 && st.target_spans[0].span.start_line == 3 && st.target_spans[0].call_order == 1,
            "call-order margin differs");

    std::size_t selections = 0, ghosted = 0, without_operands = 0;
    for (const auto& p : bt::fixture_paths()) {
        const CsgTree tree = bt::tree_of(bt::read_text(p));
        for (std::size_t i = 1; i < tree.size(); ++i) {
            ++selections;
            const CsgNode& n = tree.at(i);
            const HighlightState h = select_node(tree, n.id);
            if (!h.ghosts.empty()) ++ghosted;
            const bool has_operands = is_boolean(n.kind) && ghost_operands(tree, i) > 0;
            if (is_boolean(n.kind) && !has_operands) ++without_operands;
            o.check(h.ghosts.empty() != has_operands, p.filename().string() + ": ghost presence wrong at " + n.id);
        }
    }
    o.detail = "1 target + 2 impacted module instances; " + std::to_string(selections) + " selections, " +
               std::to_string(ghosted) + " with ghosts, all on difference/intersection nodes" +
               (without_operands ? " (" + std::to_string(without_operands) + " booleans without subtracted operands)"
                                 : std::string());
}

void edit_synthesis(Outcome& o) {
    std::vector<std::pair<std::string, std::string>> corpus;
    for (const auto& p : bt::fixture_paths()) corpus.emplace_back(p.filename().string(), bt::read_text(p));
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> delta(-5, 5), angle(-180, 180), factor(0.5, 2);
    int successes = 0, attempts = 0, forced_with_impacted = 0;
    double worst = 0;
    std::map<std::string, int> rejections;
    std::map<std::string, int> kinds;
    while (successes < 100 && attempts < 5000) {
        ++attempts;
        const auto& [name, src] = corpus[rng() % corpus.size()];
        const auto compiled = bt::build(src);
        const CsgTree& t = compiled->tree;
        if (t.size() < 2) continue;
        const std::size_t index = 1 + rng() % (t.size() - 1);
        const NodeId id = t.at(index).id;
        const int op = rng() % 4;
        EditResult r;
        std::function<Mat4(std::size_t)> change;
        std::string kind;
        try {
            if (op == 0) {
                const Vec3 d{delta(rng), delta(rng), delta(rng)};
                kind = "translate";
                r = apply_translation(t, id, d);
                change = [&, d](std::size_t) { return bt::translation_change(t, id, d); };
            } else if (op == 1) {
                const Axis axis = static_cast<Axis>(rng() % 3);
                const Vec3 unit = axis == Axis::x ? Vec3{1, 0, 0} : axis == Axis::y ? Vec3{0, 1, 0} : Vec3{0, 0, 1};
                const double a = angle(rng);
                kind = "rotate";
                r = apply_rotation(t, id, axis, a);
                change = [&, unit, a](std::size_t) { return bt::rotation_change(t, id, unit, a); };
            } else if (op == 2 || !is_primitive(t.at(index).kind)) {
                const Vec3 f{factor(rng), factor(rng), factor(rng)};
                kind = "scale";
                r = apply_scale(t, id, f, ScaleMode::scale_node);
                change = [&, f](std::size_t) { return bt::conjugated_scale(t.parent_matrix(index), f); };
            } else {
                const double u = factor(rng);
                const Vec3 f = t.at(index).kind == CsgKind::PrimCube ? Vec3{factor(rng), factor(rng), factor(rng)}
                                                                      : Vec3{u, u, t.at(index).kind == CsgKind::PrimSphere ? u : factor(rng)};
                kind = "scale_primitive";
                r = apply_scale(t, id, f, ScaleMode::scale_primitive);
                change = [&, f](std::size_t leaf) { return bt::conjugated_scale(t.world_matrix(leaf), f); };
            }
        } catch (const Error& e) {
            o.check(e.code() == "invalid_edit", name + " " + id + ": unexpected error " + e.code());
            ++rejections[e.what()];
            continue;
        }
        ++successes;
        ++kinds[kind];
        if (r.action == EditAction::inserted_new && t.instances_of(t.at(index).ast_id).size() > 1) ++forced_with_impacted;
        // rewriting a primitive's own arguments rescales every instance of its statement
        const std::vector<std::size_t> moved =
            kind == "scale_primitive" ? t.instances_of(t.at(index).ast_id) : std::vector<std::size_t>{index};
        const double err = bt::edit_error(t, r.new_source, moved, change);
        worst = std::max(worst, err);
        o.check(err < 1e-6, name + " " + kind + " " + id + ": vertex error " + fmt(err));
        const std::size_t tail = src.size() - r.edit.span.end;
        const bool minimal = r.new_source.compare(0, r.edit.span.start, src, 0, r.edit.span.start) == 0 &&
                             r.new_source.size() >= tail &&
                             r.new_source.compare(r.new_source.size() - tail, tail, src, r.edit.span.end, tail) == 0 &&
                             r.new_source == apply_edit(src, r.edit);
        o.check(minimal, name + " " + kind + " " + id + ": bytes changed outside the reported span");
    }
    o.check(successes >= 100, "only " + std::to_string(successes) + " edits succeeded");
    std::string rejected;
    int total_rejected = 0;
    for (const auto& [msg, n] : rejections) {
        rejected += (rejected.empty() ? "" : "; ") + msg + " x" + std::to_string(n);
        total_rejected += n;
    }
    std::string by_kind;
    for (const auto& [k, n] : kinds) by_kind += (by_kind.empty() ? "" : ", ") + k + " " + std::to_string(n);
    o.detail = std::to_string(successes) + " edits verified (" + by_kind + "), worst vertex error " + fmt(worst) +
               " (limit 1e-6), " + std::to_string(forced_with_impacted) +
               " forced insertions left impacted instances in place; " + std::to_string(total_rejected) +
               " requests rejected as invalid_edit [" + rejected + "]";
}

void scenario(Outcome& o) {
    const std::string src = bt::fixture("23_buckle_box.bcs");
    Session s;
    auto ok = [&](const json& req) {
        const json r = request(s, req);
        if (!r["ok"].get<bool>()) throw std::runtime_error(req["method"].get<std::string>() + ": " + r.dump());
        return r["result"];
    };
    ok({{"method", "open"}, {"params", {{"source", src}}}});

    // pick the latch, open its menu, hover each entry
    const json hit = ok({{"method", "pick"}, {"params", {{"origin", {15, -20, 19.5}}, {"dir", {0, 1, 0}}}}});
    o.check(hit["hit"] == true, "latch ray missed");
    const json menu = ok({{"method", "menu"}, {"params", {{"leaf_id", hit["leaf_id"]}}}});
    std::vector<std::string> labels;
    for (const auto& e : menu["entries"]) labels.push_back(e["label"]);
    o.check(labels == std::vector<std::string>({"cube", "translate", "translate", "root"}), "latch menu labels differ");
    o.check(menu["entries"][0]["line"] == 37, "latch menu line differs");
    for (std::size_t k = 0; k < menu["entries"].size(); ++k) {
        const json h = ok({{"method", "select"}, {"params", {{"node_id", menu["entries"][k]["node_id"]}}}});
        o.check(h["target_node_ids"].size() == menu["entries"].size() - k, "hover path length differs at entry " + std::to_string(k));
    }

    // ghosts of the knuckle cutters
    const CsgTree& t = s.tree();
    std::optional<NodeId> hinge_diff;
    for (const CsgNode& n : t.nodes())
        if (n.kind == CsgKind::Difference && n.call_stack.size() > 1 &&
            t.ast().node(n.call_stack[n.call_stack.size() - 2]).span.text(src) == "hinge();")
            hinge_diff = n.id;
    o.check(hinge_diff.has_value(), "hinge difference not found");
    if (hinge_diff) {
        const json sel = ok({{"method", "select"}, {"params", {{"node_id", *hinge_diff}}}});
        o.check(sel["ghosts"].size() == 3, "expected 3 cutter ghosts, got " + std::to_string(sel["ghosts"].size()));
        for (const auto& g : sel["ghosts"]) o.check(g["classification"] == "impacted", "loop ghost not classified impacted");
        o.check(sel["ghost_parts"].size() == 3, "ghost meshes missing");
        const json through = ok({{"method", "pick"}, {"params", {{"origin", {5, 22, 30}}, {"dir", {0, 0, -1}}}}});
        o.check(through["hit"] == true && through["is_ghost"] == true, "ghost of the first cutter is not pickable");
    }

    // forward search on the statement under the latch comment
    const std::size_t latch = src.find("translate([w / 2 - 3");
    const std::size_t latch_end = src.find(';', latch) + 1;
    const json fwd = ok({{"method", "forwardSearch"}, {"params", {{"span", {latch, latch_end}}}}});
    o.check(src.rfind("// latch", latch) != std::string::npos, "fixture lacks the latch comment");
    o.check(fwd["impacted_node_ids"].empty() && fwd["target_node_ids"].size() == 3, "latch forward search not isolated");

    // translate then rotate the lid
    const CsgTree before = s.tree();
    const json moved = ok({{"method", "applyTransform"},
                           {"params", {{"node_id", "1"}, {"kind", "translate"}, {"params", {{"delta", {0, 0, 5}}}}}}});
    const std::string after_move = s.source();
    o.check(after_move.find("translate([0, 0, 5]) translate([0, 0, h + 6]) {") != std::string::npos,
            "lid translate not emitted as a same-line wrapper");
    o.check(bt::edit_error(before, after_move, "1", [&](std::size_t) { return Mat4::translation({0, 0, 5}); }) < 1e-6,
            "lid translation geometry wrong");
    const CsgTree mid = s.tree();
    ok({{"method", "applyTransform"},
        {"params", {{"node_id", "1.0"}, {"kind", "rotate"}, {"params", {{"axis", "z"}, {"angle", 15}}}}}});
    const std::string after_rotate = s.source();
    o.check(after_rotate.find("translate([0, 0, 5]) rotate([0, 0, 15]) translate([0, 0, h + 6]) {") != std::string::npos,
            "lid rotate not emitted in place");
    o.check(bt::edit_error(mid, after_rotate, "1.0",
                           [&](std::size_t) { return bt::rotation_change(mid, "1.0", {0, 0, 1}, 15); }) < 1e-6,
            "lid rotation geometry wrong");
    o.check(s.revision() == 3, "expected revision 3 after two edits");
    o.detail = "pick/menu/hover on the latch, 3 impacted cutter ghosts, isolated latch search, lid moved and "
               "rotated with same-line wrappers";
}

void robustness(Outcome& o) {
    std::mt19937 rng(31337);
    Session s;
    const std::vector<std::string> seeds = {
        R"({"id":1,"method":"open","params":{"source":"difference(){cube(4);sphere(2);}"}})",
        R"({"id":2,"method":"pick","params":{"origin":[1,1,10],"dir":[0,0,-1]}})",
        R"({"id":3,"method":"applyTransform","params":{"node_id":"0","kind":"translate","params":{"delta":[0,0,1]}}})",
        R"({"id":4,"method":"forwardSearch","params":{"span":{"start":0,"end":10}}})",
        R"({"id":5,"method":"variableSearch","params":{"span":[0,3]}})",
        R"({"id":6,"method":"select","params":{"node_id":"0.1"}})",
        R"({"id":7,"method":"setSource","params":{"text":"a=2; for(i=[0:3]) translate([i*a,0,0]) cube(i+1);"}})",
        R"({"id":8,"method":"beginDrag","params":{"node_id":"0","kind":"rotate"}})",
        R"({"id":9,"method":"updateDrag","params":{"axis":"y","angle":12.5}})",
        R"({"id":10,"method":"export","params":{"format":"binary"}})",
        R"({"id":11,"method":"menu","params":{"leaf_id":"0.0"}})",
        R"({"id":12,"method":"getTree","revision":3})"};
    const std::string alphabet = "{}[]\":,0123456789.-eE truefalsnul\\/\x01\x7f\xc3\xff";
    const std::set<std::string> codes = {"bad_request", "stale_revision", "no_session", "unknown_node",
                                         "bad_selection", "invalid_edit"};
    const int iterations = 1000000;
    int malformed = 0, structured = 0, accepted = 0;
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < iterations; ++i) {
        std::string line;
        if (i % 10 == 0) {
            const std::size_t n = rng() % 64;
            for (std::size_t k = 0; k < n; ++k) line += static_cast<char>(rng() % 256);
        } else {
            line = seeds[rng() % seeds.size()];
            const int mutations = 1 + rng() % 4;
            for (int m = 0; m < mutations && !line.empty(); ++m) {
                const std::size_t at = rng() % line.size();
                switch (rng() % 3) {
                    case 0: line[at] = alphabet[rng() % alphabet.size()]; break;
                    case 1: line.erase(at, 1 + rng() % 3); break;
                    default: line.insert(at, 1, alphabet[rng() % alphabet.size()]); break;
                }
            }
        }
        const json r = json::parse(handle_line(s, line), nullptr, false);
        if (r.is_discarded() || !r.is_object() || !r.contains("ok") || !r["ok"].is_boolean()) {
            o.check(false, "unstructured response to " + json(line).dump(-1, ' ', false, json::error_handler_t::replace));
            continue;
        }
        if (r["ok"].get<bool>()) {
            ++accepted;
            continue;
        }
        ++structured;
        const std::string code = r["error"]["code"];
        if (code == "bad_request") ++malformed;
        o.check(codes.count(code) > 0, "unexpected error code " + code + " for " +
                                           json(line).dump(-1, ' ', false, json::error_handler_t::replace));
    }
    const double fuzz_seconds = seconds_since(start);

    std::vector<std::string> corpus;
    for (const auto& p : bt::fixture_paths())
        if (p.filename().string().rfind("24_", 0) != 0) corpus.push_back(bt::read_text(p));
    corpus.push_back(bt::fixture("24_storage_rack.bcs"));
    int exact = 0, edits = 0, rejected = 0;
    for (int seq = 0; seq < 1000; ++seq) {
        const std::string& original = corpus[seq % 50 == 49 ? corpus.size() - 1 : rng() % (corpus.size() - 1)];
        Session session;
        request(session, {{"method", "open"}, {"params", {{"source", original}}}});
        std::string mirror = original;
        const int steps = 2 + rng() % 5;
        for (int k = 0; k < steps; ++k) {
            const CsgTree& t = session.tree();
            if (t.size() < 2) break;
            const NodeId id = t.at(1 + rng() % (t.size() - 1)).id;
            json params;
            std::string kind;
            switch (rng() % 3) {
                case 0: kind = "translate", params = {{"delta", {int(rng() % 9) - 4, 0.25 * int(rng() % 9), 1.5}}}; break;
                case 1: kind = "rotate", params = {{"axis", std::string(1, "xyz"[rng() % 3])}, {"angle", int(rng() % 360) - 180}}; break;
                default: kind = "scale", params = {{"factors", {1 + 0.1 * int(rng() % 10), 1, 0.5}}}; break;
            }
            const json r = request(session, {{"method", "applyTransform"},
                                             {"revision", session.revision()},
                                             {"params", {{"node_id", id}, {"kind", kind}, {"params", params}}}});
            if (!r["ok"].get<bool>()) {
                ++rejected;
                o.check(r["error"]["code"] == "invalid_edit", "edit failed with " + r.dump());
                continue;
            }
            ++edits;
            mirror = splice(mirror, r["result"]["edit"]);
        }
        const json got = request(session, {{"method", "getSource"}});
        if (got["result"]["source"] == mirror) ++exact;
        else o.check(false, "sequence " + std::to_string(seq) + " diverged");
    }
    o.check(exact == 1000, std::to_string(1000 - exact) + " sequences diverged");
    o.detail = std::to_string(iterations) + " fuzzed requests in " + fmt(fuzz_seconds) + " s, 0 crashes, " +
               std::to_string(structured) + " structured errors (" + std::to_string(malformed) + " bad_request), " +
               std::to_string(accepted) + " accepted; " + std::to_string(exact) + "/1000 edit sequences byte-exact (" +
               std::to_string(edits) + " edits, " + std::to_string(rejected) + " rejected as invalid_edit)";
}

}  // namespace

int main() {
    criterion("pipeline correctness", pipeline);
    criterion("boolean volume oracle", boolean_volumes);
    criterion("reverse/forward duality", duality);
    criterion("impacted classification", impacted);
    criterion("edit-synthesis geometry", edit_synthesis);
    criterion("buckle box scenario replay", scenario);
    criterion("protocol robustness", robustness);
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << "\n";
    return failed ? 1 : 0;
}
