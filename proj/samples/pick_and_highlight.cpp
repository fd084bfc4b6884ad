// Reverse search: pick a surface, list its branch, highlight the target and impacted code.
#include <iostream>

#include "bcs/session.hpp"

int main() {
    const std::string source =
        "module m() { sphere(1); }\n"
        "m();\n"
        "translate([4, 0, 0]) m();\n"
        "translate([8, 0, 0]) m();\n";

    bcs::CompileOptions options;
    options.default_fn = 16;
    const auto out = bcs::compile(source, options);
    if (!out.compiled) {
        for (const auto& d : out.diagnostics) std::cerr << bcs::format_diagnostic(d) << "\n";
        return 1;
    }
    const bcs::CsgTree& tree = out.compiled->tree;

    const auto hit = bcs::pick(out.compiled->scene, {4, 0, 10}, {0, 0, -1});
    if (!hit) return 1;
    std::cout << "hit " << hit->leaf_id << " at t = " << hit->t << "\n";

    for (const auto& e : bcs::menu_for(tree, hit->leaf_id).entries)
        std::cout << "  " << e.label << "  (line " << e.line << ")\n";

    const bcs::HighlightState st = bcs::select_node(tree, hit->leaf_id);
    for (const auto& t : st.target_spans) std::cout << "target [" << t.call_order << "] " << t.span.text(source) << "\n";
    for (const auto& s : st.impacted_spans) std::cout << "impacted " << s.text(source) << "\n";
    std::cout << st.impacted_node_ids.size() << " impacted instances\n";
}
