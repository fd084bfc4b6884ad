#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "CLI11.hpp"
#include "bcs/session.hpp"

namespace fs = std::filesystem;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = boost::asio::ip::tcp;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw bcs::Error("bad_request", "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_numbers(const std::string& text, std::size_t count, const std::string& flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw bcs::Error("bad_request", flag + ": '" + item + "' is not a number");
        }
    }
    if (out.size() != count) throw bcs::Error("bad_request", flag + " expects " + std::to_string(count) + " numbers");
    return out;
}

bcs::Vec3 parse_vec3(const std::string& text, const std::string& flag) {
    const auto v = parse_numbers(text, 3, flag);
    return {v[0], v[1], v[2]};
}

/// Compiles a file, printing diagnostics to stderr. Exits on errors.
std::shared_ptr<bcs::Compiled> load(const std::string& path) {
    bcs::CompileOptions options;
    options.default_fn = bcs::default_fn_from_env();
    const auto out = bcs::compile(read_file(path), options);
    for (const auto& d : out.diagnostics) std::cerr << path << ":" << bcs::format_diagnostic(d) << "\n";
    if (!out.compiled) std::exit(1);
    return out.compiled;
}

bcs::SourceSpan parse_span(const bcs::Ast& ast, const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw bcs::Error("bad_request", "--span expects A..B");
    try {
        const std::size_t a = std::stoul(text.substr(0, dots));
        const std::size_t b = std::stoul(text.substr(dots + 2));
        if (a > b || b > ast.source().size()) throw bcs::Error("bad_selection", "selection outside source");
        return ast.lines().span(a, b);
    } catch (const std::logic_error&) {
        throw bcs::Error("bad_request", "--span expects A..B");
    }
}

void serve_stdio(bcs::Session& session) {
    std::string line;
    while (std::getline(std::cin, line)) {
        if (line.empty()) continue;
        std::cout << bcs::handle_line(session, line) << "\n" << std::flush;
    }
}

std::string mime_type(const fs::path& p) {
    const std::string ext = p.extension().string();
    if (ext == ".html") return "text/html";
    if (ext == ".js" || ext == ".mjs") return "text/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    return "application/octet-stream";
}

http::response<http::string_body> static_response(const http::request<http::string_body>& req,
                                                  const std::optional<fs::path>& web_root) {
    auto reply = [&](http::status status, std::string body, const std::string& type) {
        http::response<http::string_body> res{status, req.version()};
        res.set(http::field::content_type, type);
        res.keep_alive(false);
        res.body() = std::move(body);
        res.prepare_payload();
        return res;
    };
    if (!web_root) return reply(http::status::not_found, "websocket endpoint only\n", "text/plain");
    std::string target(req.target());
    if (const auto q = target.find('?'); q != std::string::npos) target.resize(q);
    if (target.empty() || target.back() == '/') target += "index.html";
    const fs::path root = fs::weakly_canonical(*web_root);
    const fs::path file = fs::weakly_canonical(root / fs::path(target).relative_path());
    const auto rel = file.lexically_relative(root);
    if (rel.empty() || *rel.begin() == ".." || !fs::is_regular_file(file))
        return reply(http::status::not_found, "not found\n", "text/plain");
    return reply(http::status::ok, read_file(file.string()), mime_type(file));
}

void serve_connection(tcp::socket socket, std::optional<fs::path> web_root) {
    try {
        beast::flat_buffer buffer;
        http::request<http::string_body> req;
        http::read(socket, buffer, req);
        if (!websocket::is_upgrade(req)) {
            http::write(socket, static_response(req, web_root));
            socket.shutdown(tcp::socket::shutdown_send);
            return;
        }
        websocket::stream<tcp::socket> ws(std::move(socket));
        ws.read_message_max(bcs::kMaxRequestBytes);
        ws.accept(req);
        bcs::CompileOptions options;
        options.default_fn = bcs::default_fn_from_env();
        bcs::Session session(options);
        for (;;) {
            beast::flat_buffer message;
            ws.read(message);
            const std::string reply = bcs::handle_line(session, beast::buffers_to_string(message.data()));
            ws.text(true);
            ws.write(boost::asio::buffer(reply));
        }
    } catch (const beast::system_error& e) {
        if (e.code() != websocket::error::closed && e.code() != http::error::end_of_stream)
            std::cerr << "connection: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "connection: " << e.what() << "\n";
    }
}

int serve_websocket(unsigned short port, const std::optional<fs::path>& web_root) {
    boost::asio::io_context io;
    tcp::acceptor acceptor(io, {boost::asio::ip::make_address("127.0.0.1"), port});
    std::cerr << "listening on ws://127.0.0.1:" << acceptor.local_endpoint().port() << "\n";
    for (;;) {
        tcp::socket socket(io);
        acceptor.accept(socket);
        std::thread(serve_connection, std::move(socket), web_root).detach();
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bcs: bidirectional CSG editing kernel"};
    app.require_subcommand(1);

    std::string file, out_path, format = "binary", ray, node, span, translate, rotate, scale, web_root;
    bool variable = false, primitive = false, stdio = false;
    unsigned short port = 8765;

    auto* compile_cmd = app.add_subcommand("compile", "Compile a file and print diagnostics");
    compile_cmd->add_option("file", file)->required();

    auto* export_cmd = app.add_subcommand("export", "Write the model as STL");
    export_cmd->add_option("file", file)->required();
    export_cmd->add_option("-o,--output", out_path)->required();
    export_cmd->add_option("--format", format)->check(CLI::IsMember({"binary", "ascii"}));

    auto* pick_cmd = app.add_subcommand("pick", "Cast a ray and print the menu of the hit leaf");
    pick_cmd->add_option("file", file)->required();
    pick_cmd->add_option("--ray", ray, "ox,oy,oz,dx,dy,dz")->required();

    auto* select_cmd = app.add_subcommand("select", "Print the highlight state of a node");
    select_cmd->add_option("file", file)->required();
    select_cmd->add_option("--node", node)->required();

    auto* search_cmd = app.add_subcommand("search", "Forward or variable search from a code selection");
    search_cmd->add_option("file", file)->required();
    search_cmd->add_option("--span", span, "A..B byte offsets")->required();
    search_cmd->add_flag("--variable", variable);

    auto* transform_cmd = app.add_subcommand("transform", "Rewrite the source for a direct manipulation");
    transform_cmd->add_option("file", file)->required();
    transform_cmd->add_option("--node", node)->required();
    auto* t_opt = transform_cmd->add_option("--translate", translate, "x,y,z");
    auto* r_opt = transform_cmd->add_option("--rotate", rotate, "axis,deg");
    auto* s_opt = transform_cmd->add_option("--scale", scale, "sx,sy,sz");
    transform_cmd->add_flag("--primitive", primitive)->needs(s_opt);
    t_opt->excludes(r_opt, s_opt);
    r_opt->excludes(s_opt);

    auto* serve_cmd = app.add_subcommand("serve", "Run the session protocol");
    serve_cmd->add_option("--port", port);
    serve_cmd->add_flag("--stdio", stdio, "newline-delimited JSON on stdin/stdout");
    serve_cmd->add_option("--web-root", web_root, "static files served over HTTP")->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*compile_cmd) {
            const auto c = load(file);
            std::cout << "ok: " << c->tree.size() << " nodes, " << c->scene.triangle_count() << " triangles\n";
        } else if (*export_cmd) {
            const auto c = load(file);
            const std::string stl =
                bcs::export_stl(c->scene, format == "binary" ? bcs::StlFormat::binary : bcs::StlFormat::ascii);
            std::ofstream out(out_path, std::ios::binary);
            if (!out.write(stl.data(), static_cast<std::streamsize>(stl.size())))
                throw bcs::Error("bad_request", "cannot write " + out_path);
        } else if (*pick_cmd) {
            const auto c = load(file);
            const auto v = parse_numbers(ray, 6, "--ray");
            const auto hit = bcs::pick(c->scene, {v[0], v[1], v[2]}, {v[3], v[4], v[5]});
            bcs::json j = hit ? bcs::to_json(bcs::menu_for(c->tree, hit->leaf_id)) : bcs::json{{"entries", bcs::json::array()}};
            j["hit"] = hit ? bcs::to_json(*hit) : bcs::json(nullptr);
            std::cout << bcs::dump(j, 2) << "\n";
        } else if (*select_cmd) {
            const auto c = load(file);
            std::cout << bcs::dump(bcs::to_json(bcs::select_node(c->tree, node)), 2) << "\n";
        } else if (*search_cmd) {
            const auto c = load(file);
            const auto sel = parse_span(c->ast, span);
            const auto st = variable ? bcs::variable_search(c->tree, sel) : bcs::forward_search(c->tree, sel);
            std::cout << bcs::dump(bcs::to_json(st), 2) << "\n";
        } else if (*transform_cmd) {
            const auto c = load(file);
            bcs::EditResult r;
            if (!translate.empty()) {
                r = bcs::apply_translation(c->tree, node, parse_vec3(translate, "--translate"));
            } else if (!rotate.empty()) {
                const auto comma = rotate.find(',');
                const std::string a = rotate.substr(0, comma);
                if (comma == std::string::npos || (a != "x" && a != "y" && a != "z"))
                    throw bcs::Error("bad_request", "--rotate expects axis,deg with axis x, y, or z");
                const double deg = parse_numbers(rotate.substr(comma + 1), 1, "--rotate").front();
                r = bcs::apply_rotation(c->tree, node, a == "x" ? bcs::Axis::x : a == "y" ? bcs::Axis::y : bcs::Axis::z, deg);
            } else if (!scale.empty()) {
                r = bcs::apply_scale(c->tree, node, parse_vec3(scale, "--scale"),
                                     primitive ? bcs::ScaleMode::scale_primitive : bcs::ScaleMode::scale_node);
            } else {
                throw bcs::Error("bad_request", "one of --translate, --rotate, --scale is required");
            }
            std::cout << r.new_source;
        } else if (*serve_cmd) {
            if (stdio) {
                bcs::CompileOptions options;
                options.default_fn = bcs::default_fn_from_env();
                bcs::Session session(options);
                serve_stdio(session);
                return 0;
            }
            return serve_websocket(port, web_root.empty() ? std::nullopt : std::optional<fs::path>(web_root));
        }
    } catch (const bcs::Error& e) {
        std::cerr << "error[" << e.code() << "]: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
