// Direct manipulation through the session protocol: drag a part, then rotate it.
#include <iostream>

#include "bcs/session.hpp"

int main() {
    bcs::Session session;
    auto call = [&](const bcs::json& request) {
        const bcs::json response = bcs::handle_request(session, request);
        if (!response["ok"].get<bool>()) std::cerr << response["error"].dump() << "\n";
        return response;
    };

    call({{"method", "open"}, {"params", {{"source", "// lid\ncube([10, 10, 2]);\n"}}}});

    // Each update is cumulative from the drag start, so the source gets a single translate.
    call({{"method", "beginDrag"}, {"params", {{"node_id", "0"}, {"kind", "translate"}}}});
    for (double z : {0.5, 1.0, 1.5, 2.0})
        call({{"method", "updateDrag"}, {"params", {{"delta", {0, 0, z}}}}});
    call({{"method", "endDrag"}});
    std::cout << call({{"method", "getSource"}})["result"]["source"].get<std::string>() << "\n";

    const auto r = call({{"method", "applyTransform"},
                         {"params", {{"node_id", "0.0"}, {"kind", "rotate"}, {"params", {{"axis", "x"}, {"angle", 90}}}}}});
    std::cout << "edit: " << r["result"]["edit"]["replacement"] << "\n";
    std::cout << call({{"method", "getSource"}})["result"]["source"].get<std::string>();
}
