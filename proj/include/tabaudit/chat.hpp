#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tabaudit::llm {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 256;
    std::vector<std::string> stop_sequences;
    // Trial nonce. Part of the cache digest so repeated identical prompts
    // (e.g. many samples at the same temperature) stay distinct; never sent
    // over the wire.
    std::optional<std::uint64_t> seed;

    friend bool operator==(const ChatRequest&, const ChatRequest&) = default;
};

/// Throws tabaudit::Error when the message sequence is malformed: a system
/// message anywhere but first, empty user content, consecutive turns by the
/// same role, negative temperature or non-positive max_tokens.
void validate(const ChatRequest& request);

/// Content of the last user message, or empty.
std::string_view last_user_content(const ChatRequest& request);

nlohmann::json to_json(const ChatRequest& request);
ChatRequest request_from_json(const nlohmann::json& j);

/// Stable serialization the digest is computed over.
std::string canonical_serialization(const ChatRequest& request);

/// SHA-256 hex of the model identity followed by the canonical serialization.
std::string request_digest(std::string_view identity, const ChatRequest& request);

std::string sha256_hex(std::string_view data);

/// A black-box chat model. Implementations must be callable from several
/// threads at once.
class ModelAdapter {
public:
    virtual ~ModelAdapter() = default;
    [[nodiscard]] virtual std::string identity() const = 0;
    virtual std::string complete(const ChatRequest& request) = 0;
};

/// Pass-through adapter that counts traffic and enforces an optional cap on
/// distinct requests.
class InstrumentedAdapter : public ModelAdapter {
public:
    explicit InstrumentedAdapter(ModelAdapter& inner, std::optional<std::size_t> budget = std::nullopt)
        : inner_(inner), budget_(budget) {}

    [[nodiscard]] std::string identity() const override { return inner_.identity(); }
    std::string complete(const ChatRequest& request) override;

    [[nodiscard]] std::size_t calls() const noexcept { return calls_.load(); }
    [[nodiscard]] std::size_t distinct_requests() const;
    void reset_counters();

private:
    ModelAdapter& inner_;
    std::optional<std::size_t> budget_;
    std::atomic<std::size_t> calls_{0};
    mutable std::mutex mutex_;
    std::set<std::string> digests_;
    std::set<std::string> run_digests_;
};

/// Complete every request with at most `parallelism` in flight. Results keep
/// request order; the first adapter error is rethrown after all workers stop.
std::vector<std::string> complete_all(ModelAdapter& adapter, std::span<const ChatRequest> requests,
                                      std::size_t parallelism);

}  // namespace tabaudit::llm
