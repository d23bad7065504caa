#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <future>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "tabaudit/chat.hpp"

namespace tabaudit::llm {

enum class CacheMode { Off, Record, Replay };

std::string_view to_string(CacheMode mode);
CacheMode cache_mode_from_string(std::string_view text);

struct Transcript {
    std::string request_digest;
    ChatRequest request;
    std::string response;
    std::string timestamp;  // ISO-8601 UTC
    std::string model;
    std::string checksum;   // sha256 over the other fields
};

nlohmann::json to_json(const Transcript& t);
Transcript transcript_from_json(const nlohmann::json& j);
std::string transcript_checksum(const Transcript& t);
/// Describes why a transcript is not self-consistent, or nullopt when it is.
std::optional<std::string> transcript_problem(const Transcript& t);
std::string utc_timestamp();

/// Parse a JSON-Lines cache file. Throws CorruptCache on the first line that
/// is not a valid, self-consistent transcript.
std::vector<Transcript> read_transcripts(const std::filesystem::path& path);
std::string transcript_line(const Transcript& t);

/// Append-only transcript store. Lookups take a shared lock; appends are
/// serialized in-process and, for file-backed stores, with an advisory file
/// lock so concurrent processes do not interleave lines.
class TranscriptStore {
public:
    explicit TranscriptStore(CacheMode mode);
    TranscriptStore(std::filesystem::path path, CacheMode mode);
    ~TranscriptStore();
    TranscriptStore(const TranscriptStore&) = delete;
    TranscriptStore& operator=(const TranscriptStore&) = delete;

    [[nodiscard]] CacheMode mode() const noexcept { return mode_; }
    [[nodiscard]] const std::optional<std::filesystem::path>& path() const noexcept { return path_; }

    [[nodiscard]] std::optional<std::string> find(const std::string& digest) const;
    void append(Transcript t);
    [[nodiscard]] std::size_t size() const;

    /// cached_complete, with concurrent misses on the same digest collapsed
    /// into a single adapter call.
    std::string complete(ModelAdapter& adapter, const ChatRequest& request);

    [[nodiscard]] std::size_t hits() const noexcept { return hits_.load(); }
    [[nodiscard]] std::size_t invocations() const noexcept { return invocations_.load(); }

private:
    CacheMode mode_;
    std::optional<std::filesystem::path> path_;
    std::FILE* file_ = nullptr;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::string> responses_;
    std::mutex inflight_mutex_;
    std::map<std::string, std::shared_future<std::string>> inflight_;
    std::atomic<std::size_t> hits_{0};
    std::atomic<std::size_t> invocations_{0};
};

std::string cached_complete(ModelAdapter& adapter, TranscriptStore& store, const ChatRequest& request);

/// Adapter view of a store in front of another adapter.
class CachedAdapter : public ModelAdapter {
public:
    CachedAdapter(ModelAdapter& inner, TranscriptStore& store) : inner_(inner), store_(store) {}
    [[nodiscard]] std::string identity() const override { return inner_.identity(); }
    std::string complete(const ChatRequest& request) override { return store_.complete(inner_, request); }

private:
    ModelAdapter& inner_;
    TranscriptStore& store_;
};

}  // namespace tabaudit::llm
