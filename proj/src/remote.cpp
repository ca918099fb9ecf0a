#include "rearrange/remote.hpp"

#include <cstdlib>
#include <thread>

#include <nlohmann/json.hpp>

#include "rearrange/error.hpp"

namespace rearrange {

using nlohmann::json;

namespace {

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? std::string(v) : std::move(fallback);
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

RemoteConfig RemoteConfig::from_env() {
    RemoteConfig c;
    c.base_url = env_or("REARRANGE_BASE_URL", c.base_url);
    c.model = env_or("REARRANGE_MODEL", c.model);
    c.api_key = env_or("REARRANGE_API_KEY", c.api_key);
    return c;
}

std::string chat_completions_url(const std::string& base_url) {
    std::string base = base_url;
    while (!base.empty() && base.back() == '/') base.pop_back();
    if (base.size() >= 3 && base.compare(base.size() - 3, 3, "/v1") == 0) {
        return base + "/chat/completions";
    }
    return base + "/v1/chat/completions";
}

std::string chat_request_body(const ChatRequest& request, const std::string& model) {
    json messages = json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
    }
    return json{{"model", model},
                {"messages", messages},
                {"temperature", request.temperature},
                {"max_tokens", request.max_tokens}}
        .dump();
}

RemoteBackend::RemoteBackend(RemoteConfig config, std::shared_ptr<HttpTransport> transport,
                             Sleeper sleeper)
    : config_(std::move(config)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {
    if (!transport_) throw std::invalid_argument("remote backend needs a transport");
    if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string RemoteBackend::complete(const ChatRequest& request) {
    request.validate();
    const std::string url = chat_completions_url(config_.base_url);
    const std::string body = chat_request_body(request, config_.model);
    HttpHeaders headers{{"Content-Type", "application/json"}};
    if (!config_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + config_.api_key);

    std::string last_error;
    int last_status = 0;
    int attempts = 0;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        ++attempts;
        if (attempt > 0) sleeper_(config_.backoff_base * (1LL << (attempt - 1)));
        HttpResponse resp;
        try {
            resp = transport_->post(url, headers, body, config_.timeout);
        } catch (const BackendError& e) {
            last_error = e.what();
            last_status = 0;
            continue;
        }
        if (resp.status >= 200 && resp.status < 300) {
            try {
                const auto j = json::parse(resp.body);
                return j.at("choices").at(0).at("message").at("content").get<std::string>();
            } catch (const json::exception& e) {
                throw BackendError(std::string("malformed chat-completions response: ") + e.what(),
                                   resp.status);
            }
        }
        last_status = resp.status;
        last_error = "HTTP " + std::to_string(resp.status) + ": " + resp.body.substr(0, 512);
        if (!retryable_status(resp.status)) break;
    }
    throw BackendError("chat backend failed after " + std::to_string(attempts) +
                           " attempt(s): " + last_error,
                       last_status);
}

}  // namespace rearrange
