#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

#include "httplib.h"

#include "tabaudit/error.hpp"
#include "tabaudit/http_adapter.hpp"

namespace tabaudit::llm {

namespace {

struct ParsedUrl {
    std::string scheme_host_port;
    std::string path;  // without trailing slash
};

ParsedUrl parse_base_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + url);
    const std::string scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + scheme);
    const auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    out.scheme_host_port = url.substr(0, path_start);
    if (path_start != std::string::npos) out.path = url.substr(path_start);
    while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
    return out;
}

double jitter_unit() {
    thread_local std::mt19937_64 rng(std::random_device{}());
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

void default_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }

std::string truncated(const std::string& s, std::size_t n = 200) {
    return s.size() <= n ? s : s.substr(0, n) + "...";
}

}  // namespace

HttpEndpoint endpoint_from_environment(std::string base_url, std::string model) {
    HttpEndpoint e;
    e.base_url = std::move(base_url);
    e.model = std::move(model);
    if (const char* key = std::getenv("TABAUDIT_API_KEY")) e.api_key = key;
    return e;
}

std::string chat_completion_body(const std::string& model, const ChatRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
    }
    const nlohmann::json body = {
        {"model", model},
        {"messages", std::move(messages)},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
        {"stop", request.stop_sequences},
    };
    return body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string parse_chat_completion(const std::string& body) {
    try {
        const auto j = nlohmann::json::parse(body);
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (content.is_null()) return {};
        return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponse("unexpected chat-completion response: " + std::string(e.what()) + " in " +
                                truncated(body));
    }
}

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry_index, double unit_jitter) {
    const double base = static_cast<double>(policy.base_delay.count()) * std::pow(policy.factor, retry_index);
    return std::chrono::milliseconds(static_cast<long long>(std::llround(base * (1.0 + policy.jitter * unit_jitter))));
}

HttpCompletion http_complete(const HttpEndpoint& endpoint, const ChatRequest& request, const Sleeper& sleeper) {
    if (endpoint.base_url.empty()) throw ConfigError("no endpoint URL configured");
    if (endpoint.api_key.empty()) throw ConfigError("no API key configured (set TABAUDIT_API_KEY)");
    const ParsedUrl url = parse_base_url(endpoint.base_url);
    const std::string path = url.path + "/chat/completions";
    const std::string body = chat_completion_body(endpoint.model, request);

    httplib::Client client(url.scheme_host_port);
    client.set_bearer_token_auth(endpoint.api_key);
    client.set_connection_timeout(endpoint.timeout);
    client.set_read_timeout(endpoint.timeout);
    client.set_write_timeout(endpoint.timeout);

    const Sleeper& sleep = sleeper ? sleeper : Sleeper(default_sleep);
    const int max_attempts = std::max(1, endpoint.retry.max_attempts);
    std::string last_problem;
    bool rate_limited = false;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        if (attempt > 1) sleep(backoff_delay(endpoint.retry, attempt - 2, jitter_unit()));
        auto res = client.Post(path, body, "application/json");
        if (!res) {
            rate_limited = false;
            last_problem = "request failed: " + httplib::to_string(res.error());
            continue;
        }
        const int status = res->status;
        if (status == 401 || status == 403) {
            throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(status) + ")");
        }
        if (status == 429) {
            rate_limited = true;
            last_problem = "HTTP 429";
            continue;
        }
        if (status >= 500) {
            rate_limited = false;
            last_problem = "HTTP " + std::to_string(status) + ": " + truncated(res->body);
            continue;
        }
        if (status < 200 || status >= 300) {
            throw TransportError("HTTP " + std::to_string(status) + ": " + truncated(res->body));
        }
        return {parse_chat_completion(res->body), attempt};
    }
    const std::string msg = "giving up after " + std::to_string(max_attempts) + " attempts: " + last_problem;
    if (rate_limited) throw RateLimitExhausted(msg);
    throw TransportError(msg);
}

std::string HttpAdapter::complete(const ChatRequest& request) {
    int attempts = 0;
    try {
        auto result = http_complete(endpoint_, request, sleeper_);
        attempts = result.attempts;
        attempts_ += static_cast<std::size_t>(attempts);
        return std::move(result.content);
    } catch (...) {
        attempts_ += static_cast<std::size_t>(std::max(attempts, 1));
        throw;
    }
}

}  // namespace tabaudit::llm
