#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <string>

#include "tabaudit/chat.hpp"

namespace tabaudit::llm {

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;
    double jitter = 0.25;  // each delay is stretched by up to this fraction
};

struct HttpEndpoint {
    std::string base_url;  // e.g. https://api.openai.com/v1
    std::string model;
    std::string api_key;
    std::chrono::seconds timeout{120};
    RetryPolicy retry;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct HttpCompletion {
    std::string content;
    int attempts = 0;
};

/// Fills api_key from TABAUDIT_API_KEY.
HttpEndpoint endpoint_from_environment(std::string base_url, std::string model);

/// JSON request body in the OpenAI-compatible chat-completion format.
std::string chat_completion_body(const std::string& model, const ChatRequest& request);

/// Extracts choices[0].message.content; throws MalformedResponse.
std::string parse_chat_completion(const std::string& body);

std::chrono::milliseconds backoff_delay(const RetryPolicy& policy, int retry_index, double unit_jitter);

HttpCompletion http_complete(const HttpEndpoint& endpoint, const ChatRequest& request, const Sleeper& sleeper = {});

class HttpAdapter : public ModelAdapter {
public:
    explicit HttpAdapter(HttpEndpoint endpoint, Sleeper sleeper = {})
        : endpoint_(std::move(endpoint)), sleeper_(std::move(sleeper)) {}

    [[nodiscard]] std::string identity() const override { return endpoint_.model; }
    std::string complete(const ChatRequest& request) override;

    [[nodiscard]] std::size_t attempts() const noexcept { return attempts_.load(); }

private:
    HttpEndpoint endpoint_;
    Sleeper sleeper_;
    std::atomic<std::size_t> attempts_{0};
};

}  // namespace tabaudit::llm
