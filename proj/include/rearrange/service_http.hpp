#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "rearrange/remote.hpp"
#include "rearrange/service.hpp"

namespace rearrange {

// HTTP/1.1 front end for Service with CORS headers. Static console assets
// are served from `console_dir` when given.
class HttpServer {
public:
    HttpServer(Service& service, std::optional<std::filesystem::path> console_dir = std::nullopt);
    ~HttpServer();

    // Binds host:port (port 0 picks a free one) and returns the bound port.
    // Throws Error when the address is unavailable.
    int bind(const std::string& host, int port);
    // Blocks until stop().
    void listen();
    // listen() on a background thread; returns once the server accepts.
    void start();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// "host:port" -> pair. Throws std::invalid_argument.
std::pair<std::string, int> parse_listen_address(const std::string& address);

// Plain HTTP request for tests and tooling. Throws BackendError (status 0)
// when the server does not answer.
HttpResponse http_request(const std::string& host, int port, const std::string& method,
                          const std::string& path, const std::string& body = "");

}  // namespace rearrange
