#include <gtest/gtest.h>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "nlohmann/json.hpp"

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = boost::asio::ip::tcp;
using nlohmann::json;

namespace {

/// `bcs serve` child process; its stderr is captured until the listening line appears.
class Server {
public:
    explicit Server(const std::vector<std::string>& extra = {}) {
        int err[2];
        if (pipe(err) != 0) throw std::runtime_error("pipe");
        pid_ = fork();
        if (pid_ == 0) {
            dup2(err[1], STDERR_FILENO);
            close(err[0]);
            std::vector<std::string> args = {BCS_CLI, "serve", "--port", "0"};
            args.insert(args.end(), extra.begin(), extra.end());
            std::vector<char*> argv;
            for (auto& a : args) argv.push_back(a.data());
            argv.push_back(nullptr);
            execv(BCS_CLI, argv.data());
            _exit(127);
        }
        close(err[1]);
        std::string line;
        char c;
        while (read(err[0], &c, 1) == 1 && c != '\n') line += c;
        close(err[0]);
        const auto colon = line.rfind(':');
        if (line.rfind("listening on ws://127.0.0.1:", 0) != 0 || colon == std::string::npos)
            throw std::runtime_error("unexpected server banner: " + line);
        port_ = static_cast<unsigned short>(std::stoi(line.substr(colon + 1)));
    }
    ~Server() {
        kill(pid_, SIGTERM);
        waitpid(pid_, nullptr, 0);
    }
    unsigned short port() const { return port_; }

private:
    pid_t pid_ = -1;
    unsigned short port_ = 0;
};

class WsClient {
public:
    explicit WsClient(unsigned short port) : ws_(io_) {
        tcp::resolver resolver(io_);
        boost::asio::connect(ws_.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
        ws_.handshake("127.0.0.1", "/");
    }
    json call(const json& request) {
        ws_.write(boost::asio::buffer(request.dump()));
        beast::flat_buffer buffer;
        ws_.read(buffer);
        return json::parse(beast::buffers_to_string(buffer.data()));
    }
    void close() { ws_.close(websocket::close_code::normal); }

private:
    boost::asio::io_context io_;
    websocket::stream<tcp::socket> ws_;
};

std::string run(const std::string& command) {
    std::string out;
    FILE* p = popen(command.c_str(), "r");
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    pclose(p);
    return out;
}

}  // namespace

TEST(WebSocket, OpenEditAndReadBack) {
    Server server;
    WsClient client(server.port());
    json r = client.call({{"id", 1}, {"method", "open"}, {"params", {{"source", "cube(2);"}}}});
    ASSERT_TRUE(r["ok"].get<bool>()) << r.dump();
    EXPECT_EQ(r["result"]["revision"], 1);
    r = client.call({{"id", 2},
                     {"method", "applyTransform"},
                     {"revision", 1},
                     {"params", {{"node_id", "0"}, {"kind", "translate"}, {"params", {{"delta", {0, 0, 5}}}}}}});
    EXPECT_EQ(r["result"]["edit"]["replacement"], "translate([0, 0, 5]) cube(2);");
    r = client.call({{"id", 3}, {"method", "getSource"}});
    EXPECT_EQ(r["id"], 3);
    EXPECT_EQ(r["result"]["source"], "translate([0, 0, 5]) cube(2);");
    client.close();
}

TEST(WebSocket, MalformedFrameGetsStructuredError) {
    Server server;
    boost::asio::io_context io;
    websocket::stream<tcp::socket> ws(io);
    tcp::resolver resolver(io);
    boost::asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(server.port())));
    ws.handshake("127.0.0.1", "/");
    ws.write(boost::asio::buffer(std::string("{not json")));
    beast::flat_buffer buffer;
    ws.read(buffer);
    const json r = json::parse(beast::buffers_to_string(buffer.data()));
    EXPECT_EQ(r["error"]["code"], "bad_request");
}

TEST(WebSocket, SessionsAreIndependent) {
    Server server;
    WsClient a(server.port());
    WsClient b(server.port());
    a.call({{"method", "open"}, {"params", {{"source", "cube(1);"}}}});
    EXPECT_EQ(b.call({{"method", "getSource"}})["error"]["code"], "no_session");
    b.call({{"method", "open"}, {"params", {{"source", "sphere(1);"}}}});
    EXPECT_EQ(a.call({{"method", "getSource"}})["result"]["source"], "cube(1);");
}

TEST(WebSocket, PlainHttpWithoutWebRootIs404) {
    Server server;
    boost::asio::io_context io;
    tcp::socket socket(io);
    tcp::resolver resolver(io);
    boost::asio::connect(socket, resolver.resolve("127.0.0.1", std::to_string(server.port())));
    http::request<http::empty_body> req{http::verb::get, "/", 11};
    req.set(http::field::host, "127.0.0.1");
    http::write(socket, req);
    beast::flat_buffer buffer;
    http::response<http::string_body> res;
    http::read(socket, buffer, res);
    EXPECT_EQ(res.result(), http::status::not_found);
}

TEST(WebSocket, ServesStaticFilesFromWebRoot) {
    const auto root = std::filesystem::temp_directory_path() / ("bcs_web_" + std::to_string(getpid()));
    std::filesystem::create_directories(root);
    std::ofstream(root / "index.html") << "<html>bcs</html>";
    {
        Server server({"--web-root", root.string()});
        auto get = [&](const std::string& target) {
            boost::asio::io_context io;
            tcp::socket socket(io);
            tcp::resolver resolver(io);
            boost::asio::connect(socket, resolver.resolve("127.0.0.1", std::to_string(server.port())));
            http::request<http::empty_body> req{http::verb::get, target, 11};
            req.set(http::field::host, "127.0.0.1");
            http::write(socket, req);
            beast::flat_buffer buffer;
            http::response<http::string_body> res;
            http::read(socket, buffer, res);
            return res;
        };
        const auto index = get("/");
        EXPECT_EQ(index.result(), http::status::ok);
        EXPECT_EQ(index.body(), "<html>bcs</html>");
        EXPECT_EQ(index[http::field::content_type], "text/html");
        EXPECT_EQ(get("/../../etc/passwd").result(), http::status::not_found);
        EXPECT_EQ(get("/missing.js").result(), http::status::not_found);
    }
    std::filesystem::remove_all(root);
}

TEST(Stdio, NewlineDelimitedRequests) {
    const auto input = std::filesystem::temp_directory_path() / ("bcs_stdio_" + std::to_string(getpid()));
    std::ofstream(input) << R"({"id":1,"method":"open","params":{"source":"sphere(2);"}})" << "\n"
                         << "\n"
                         << "garbage\n"
                         << R"({"id":3,"method":"applyTransform","params":{"node_id":"0","kind":"scale_primitive","params":{"factors":[1.5,1.5,1.5]}}})"
                         << "\n"
                         << R"({"id":4,"method":"getSource"})" << "\n";
    const std::string out = run(std::string(BCS_CLI) + " serve --stdio < " + input.string());
    std::filesystem::remove(input);
    std::istringstream lines(out);
    std::vector<json> responses;
    for (std::string line; std::getline(lines, line);) responses.push_back(json::parse(line));
    ASSERT_EQ(responses.size(), 4u);
    EXPECT_EQ(responses[0]["result"]["revision"], 1);
    EXPECT_EQ(responses[1]["error"]["code"], "bad_request");
    EXPECT_EQ(responses[2]["result"]["action"], "updated_primitive");
    EXPECT_EQ(responses[3]["result"]["source"], "sphere(3);");
}

TEST(Cli, ExportWritesStl) {
    const auto dir = std::filesystem::temp_directory_path() / ("bcs_cli_" + std::to_string(getpid()));
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "empty.bcs") << "intersection(){cube(1);translate([5,0,0]) cube(1);}";
    std::ofstream(dir / "box.bcs") << "cube(2);";
    run(std::string(BCS_CLI) + " export " + (dir / "empty.bcs").string() + " -o " + (dir / "empty.stl").string());
    EXPECT_EQ(std::filesystem::file_size(dir / "empty.stl"), 84u);
    run(std::string(BCS_CLI) + " export " + (dir / "box.bcs").string() + " -o " + (dir / "box.stl").string() +
        " --format ascii");
    std::ifstream in(dir / "box.stl");
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str().rfind("solid", 0), 0u);
    run(std::string(BCS_CLI) + " export " + (dir / "box.bcs").string() + " -o " + (dir / "box.bin").string());
    EXPECT_EQ(std::filesystem::file_size(dir / "box.bin"), 84u + 12u * 50u);
    std::filesystem::remove_all(dir);
}

TEST(Cli, CompileErrorHasLineAndColumn) {
    const auto file = std::filesystem::temp_directory_path() / ("bcs_broken_" + std::to_string(getpid()) + ".bcs");
    std::ofstream(file) << "cube(1);\nsphere(2)\n";
    const int status = std::system((std::string(BCS_CLI) + " compile " + file.string() + " 2>/dev/null").c_str());
    const std::string err = run(std::string(BCS_CLI) + " compile " + file.string() + " 2>&1");
    std::filesystem::remove(file);
    EXPECT_EQ(WEXITSTATUS(status), 1);
    EXPECT_NE(err.find(":2:"), std::string::npos) << err;
}
