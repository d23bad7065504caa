#include <algorithm>
#include <exception>
#include <thread>

#include "tabaudit/chat.hpp"
#include "tabaudit/error.hpp"

namespace tabaudit::llm {

std::string_view to_string(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Assistant: return "assistant";
    }
    return "user";
}

Role role_from_string(std::string_view text) {
    if (text == "system") return Role::System;
    if (text == "user") return Role::User;
    if (text == "assistant") return Role::Assistant;
    throw Error("unknown chat role '" + std::string(text) + "'");
}

void validate(const ChatRequest& request) {
    if (request.messages.empty()) throw Error("chat request has no messages");
    if (!(request.temperature >= 0.0)) throw Error("temperature must be non-negative");
    if (request.max_tokens <= 0) throw Error("max_tokens must be positive");
    for (std::size_t i = 0; i < request.messages.size(); ++i) {
        const auto& m = request.messages[i];
        if (m.role == Role::System && i != 0) throw Error("system message must come first");
        if (m.role != Role::Assistant && m.content.empty()) {
            throw Error("empty " + std::string(to_string(m.role)) + " message at position " + std::to_string(i));
        }
        if (i > 0 && request.messages[i - 1].role == m.role) {
            throw Error("consecutive " + std::string(to_string(m.role)) + " messages at position " + std::to_string(i));
        }
    }
}

std::string_view last_user_content(const ChatRequest& request) {
    for (auto it = request.messages.rbegin(); it != request.messages.rend(); ++it) {
        if (it->role == Role::User) return it->content;
    }
    return {};
}

nlohmann::json to_json(const ChatRequest& request) {
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        messages.push_back({{"role", std::string(to_string(m.role))}, {"content", m.content}});
    }
    nlohmann::json j = {
        {"messages", std::move(messages)},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
        {"stop", request.stop_sequences},
    };
    if (request.seed) j["seed"] = *request.seed;
    return j;
}

ChatRequest request_from_json(const nlohmann::json& j) {
    ChatRequest r;
    for (const auto& m : j.at("messages")) {
        r.messages.push_back({role_from_string(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
    }
    r.temperature = j.at("temperature").get<double>();
    r.max_tokens = j.at("max_tokens").get<int>();
    if (j.contains("stop")) r.stop_sequences = j.at("stop").get<std::vector<std::string>>();
    if (j.contains("seed")) r.seed = j.at("seed").get<std::uint64_t>();
    return r;
}

std::string canonical_serialization(const ChatRequest& request) {
    // nlohmann::json objects keep keys sorted, and dump() without indentation
    // is whitespace-free, which makes this stable across runs and platforms.
    return to_json(request).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string request_digest(std::string_view identity, const ChatRequest& request) {
    std::string data(identity);
    data.push_back('\n');
    data += canonical_serialization(request);
    return sha256_hex(data);
}

std::string InstrumentedAdapter::complete(const ChatRequest& request) {
    const std::string digest = request_digest(inner_.identity(), request);
    {
        std::lock_guard lock(mutex_);
        if (!run_digests_.contains(digest)) {
            if (budget_ && run_digests_.size() >= *budget_) {
                throw BudgetExceeded("query budget of " + std::to_string(*budget_) + " distinct requests exhausted");
            }
            run_digests_.insert(digest);
        }
        digests_.insert(digest);
    }
    ++calls_;
    return inner_.complete(request);
}

std::size_t InstrumentedAdapter::distinct_requests() const {
    std::lock_guard lock(mutex_);
    return digests_.size();
}

void InstrumentedAdapter::reset_counters() {
    std::lock_guard lock(mutex_);
    digests_.clear();
    calls_ = 0;
}

std::vector<std::string> complete_all(ModelAdapter& adapter, std::span<const ChatRequest> requests,
                                      std::size_t parallelism) {
    std::vector<std::string> out(requests.size());
    if (requests.empty()) return out;
    const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, requests.size());
    if (workers == 1) {
        for (std::size_t i = 0; i < requests.size(); ++i) out[i] = adapter.complete(requests[i]);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            if (failed.load()) return;
            const std::size_t i = next.fetch_add(1);
            if (i >= requests.size()) return;
            try {
                out[i] = adapter.complete(requests[i]);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed = true;
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (first_error) std::rethrow_exception(first_error);
    return out;
}

}  // namespace tabaudit::llm
