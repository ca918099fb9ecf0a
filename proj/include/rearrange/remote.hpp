#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rearrange/llm.hpp"

namespace rearrange {

struct HttpResponse {
    int status = 0;
    std::string body;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

// Minimal POST transport. Throws BackendError (status 0) when no response
// was received (connection refused, timeout, DNS failure).
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const std::string& url, const HttpHeaders& headers,
                              const std::string& body, std::chrono::milliseconds timeout) = 0;
};

// cpp-httplib backed transport; https needs OpenSSL support at build time.
std::shared_ptr<HttpTransport> make_http_transport();

struct RemoteConfig {
    std::string base_url = "http://127.0.0.1:8000";
    std::string model = "gpt-4";
    std::string api_key;
    int retries = 2;
    std::chrono::milliseconds backoff_base{500};
    std::chrono::milliseconds timeout{60000};

    // REARRANGE_BASE_URL, REARRANGE_MODEL, REARRANGE_API_KEY over the defaults.
    static RemoteConfig from_env();
};

// "<base>/v1/chat/completions", without doubling a trailing "/v1".
std::string chat_completions_url(const std::string& base_url);

// Chat-completions client. Transport failures, 429 and 5xx are retried up to
// `retries` times with exponential backoff (base, 2*base, ...).
class RemoteBackend : public ChatBackend {
public:
    using Sleeper = std::function<void(std::chrono::milliseconds)>;

    explicit RemoteBackend(RemoteConfig config,
                           std::shared_ptr<HttpTransport> transport = make_http_transport(),
                           Sleeper sleeper = {});

    std::string complete(const ChatRequest& request) override;

    const RemoteConfig& config() const noexcept { return config_; }

private:
    RemoteConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    Sleeper sleeper_;
};

// Request body in the chat-completions shape.
std::string chat_request_body(const ChatRequest& request, const std::string& model);

}  // namespace rearrange
