#pragma once

#include <atomic>
#include <functional>
#include <string>

#include "tabaudit/chat.hpp"
#include "tabaudit/error.hpp"

namespace fixture {

// Answers with a function of the request and counts calls.
class ScriptedAdapter : public tabaudit::llm::ModelAdapter {
public:
    using Script = std::function<std::string(const tabaudit::llm::ChatRequest&)>;

    explicit ScriptedAdapter(Script script, std::string identity = "scripted")
        : script_(std::move(script)), identity_(std::move(identity)) {}

    [[nodiscard]] std::string identity() const override { return identity_; }
    std::string complete(const tabaudit::llm::ChatRequest& request) override {
        ++calls_;
        return script_(request);
    }
    [[nodiscard]] std::size_t calls() const { return calls_.load(); }

private:
    Script script_;
    std::string identity_;
    std::atomic<std::size_t> calls_{0};
};

inline ScriptedAdapter echo_adapter(std::string identity = "echo") {
    return ScriptedAdapter(
        [](const tabaudit::llm::ChatRequest& r) { return std::string(tabaudit::llm::last_user_content(r)); },
        std::move(identity));
}

inline tabaudit::llm::ChatRequest simple_request(const std::string& user, double temperature = 0.0) {
    tabaudit::llm::ChatRequest r;
    r.messages = {{tabaudit::llm::Role::System, "sys"}, {tabaudit::llm::Role::User, user}};
    r.temperature = temperature;
    return r;
}

}  // namespace fixture
