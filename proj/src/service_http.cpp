#include "rearrange/service_http.hpp"

#include <httplib.h>

#include <thread>

#include "rearrange/error.hpp"

namespace rearrange {

struct HttpServer::Impl {
    Service& service;
    httplib::Server server;
    std::thread thread;
    bool bound = false;

    explicit Impl(Service& s) : service(s) {}
};

namespace {

void add_cors(httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PATCH, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
}

}  // namespace

HttpServer::HttpServer(Service& service, std::optional<std::filesystem::path> console_dir)
    : impl_(std::make_unique<Impl>(service)) {
    auto& srv = impl_->server;
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        const auto out = impl_->service.handle(req.method, req.path, req.body);
        res.status = out.status;
        res.set_content(out.body.dump(), "application/json");
        add_cors(res);
    };
    for (const char* path : {"/scene", "/experiences", "/config"}) srv.Get(path, forward);
    for (const char* path : {"/instruction", "/apply", "/reject", "/experience/accept", "/reset"}) {
        srv.Post(path, forward);
    }
    srv.Patch("/config", forward);
    srv.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
        res.status = 204;
        add_cors(res);
    });
    if (console_dir) {
        if (!srv.set_mount_point("/", console_dir->string())) {
            throw StorageError("console directory '" + console_dir->string() + "' does not exist");
        }
    }
    srv.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        nlohmann::json body{{"error", "no such endpoint '" + req.path + "'"}};
        res.set_content(body.dump(), "application/json");
        add_cors(res);
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (!impl_->server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound <= 0) throw Error("cannot listen on " + host + ":" + std::to_string(port));
    impl_->bound = true;
    return bound;
}

void HttpServer::listen() {
    if (!impl_->bound) throw Error("server is not bound");
    impl_->server.listen_after_bind();
}

void HttpServer::start() {
    if (!impl_->bound) throw Error("server is not bound");
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void HttpServer::stop() {
    if (!impl_) return;
    impl_->server.stop();
    if (impl_->thread.joinable()) impl_->thread.join();
}

std::pair<std::string, int> parse_listen_address(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
        throw std::invalid_argument("listen address must be host:port, got '" + address + "'");
    }
    int port = 0;
    try {
        std::size_t used = 0;
        port = std::stoi(address.substr(colon + 1), &used);
        if (used != address.size() - colon - 1) throw std::invalid_argument("port");
    } catch (const std::exception&) {
        throw std::invalid_argument("bad port in listen address '" + address + "'");
    }
    if (port < 0 || port > 65535) throw std::invalid_argument("port out of range in '" + address + "'");
    return {address.substr(0, colon), port};
}

HttpResponse http_request(const std::string& host, int port, const std::string& method,
                          const std::string& path, const std::string& body) {
    httplib::Client client(host, port);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    httplib::Result res;
    if (method == "GET") {
        res = client.Get(path);
    } else if (method == "POST") {
        res = client.Post(path, body, "application/json");
    } else if (method == "PATCH") {
        res = client.Patch(path, body, "application/json");
    } else if (method == "OPTIONS") {
        res = client.Options(path);
    } else {
        throw std::invalid_argument("unsupported method '" + method + "'");
    }
    if (!res) {
        throw BackendError("no response from " + host + ":" + std::to_string(port) + ": " +
                           httplib::to_string(res.error()));
    }
    return {res->status, res->body};
}

}  // namespace rearrange
