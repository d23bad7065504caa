#include <chrono>
#include <ctime>
#include <fstream>
#include <mutex>

#include <sys/file.h>

#include "tabaudit/error.hpp"
#include "tabaudit/transcript_cache.hpp"

namespace tabaudit::llm {

namespace {

constexpr auto kReplace = nlohmann::json::error_handler_t::replace;

nlohmann::json without_checksum(const Transcript& t) {
    return {
        {"request_digest", t.request_digest},
        {"request", to_json(t.request)},
        {"response", t.response},
        {"timestamp", t.timestamp},
        {"model", t.model},
    };
}

}  // namespace

std::string_view to_string(CacheMode mode) {
    switch (mode) {
        case CacheMode::Off: return "off";
        case CacheMode::Record: return "record";
        case CacheMode::Replay: return "replay";
    }
    return "off";
}

CacheMode cache_mode_from_string(std::string_view text) {
    if (text == "off") return CacheMode::Off;
    if (text == "record") return CacheMode::Record;
    if (text == "replay") return CacheMode::Replay;
    throw ConfigError("unknown cache mode '" + std::string(text) + "' (expected off, record or replay)");
}

std::string transcript_checksum(const Transcript& t) {
    return sha256_hex(without_checksum(t).dump(-1, ' ', false, kReplace));
}

nlohmann::json to_json(const Transcript& t) {
    auto j = without_checksum(t);
    j["checksum"] = t.checksum.empty() ? transcript_checksum(t) : t.checksum;
    return j;
}

Transcript transcript_from_json(const nlohmann::json& j) {
    Transcript t;
    t.request_digest = j.at("request_digest").get<std::string>();
    t.request = request_from_json(j.at("request"));
    t.response = j.at("response").get<std::string>();
    t.timestamp = j.at("timestamp").get<std::string>();
    t.model = j.at("model").get<std::string>();
    if (j.contains("checksum")) t.checksum = j.at("checksum").get<std::string>();
    return t;
}

std::optional<std::string> transcript_problem(const Transcript& t) {
    if (request_digest(t.model, t.request) != t.request_digest) {
        return "request_digest does not match the stored request and model";
    }
    if (t.checksum.empty()) return "missing checksum";
    if (transcript_checksum(t) != t.checksum) return "checksum mismatch (response or metadata altered)";
    return std::nullopt;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string transcript_line(const Transcript& t) {
    return to_json(t).dump(-1, ' ', false, kReplace);
}

std::vector<Transcript> read_transcripts(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open cache file " + path.string());
    std::vector<Transcript> out;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        Transcript t;
        try {
            t = transcript_from_json(nlohmann::json::parse(line));
        } catch (const nlohmann::json::exception& e) {
            throw CorruptCache(number, e.what());
        } catch (const Error& e) {
            throw CorruptCache(number, e.what());
        }
        if (auto problem = transcript_problem(t)) throw CorruptCache(number, *problem);
        out.push_back(std::move(t));
    }
    return out;
}

TranscriptStore::TranscriptStore(CacheMode mode) : mode_(mode) {}

TranscriptStore::TranscriptStore(std::filesystem::path path, CacheMode mode) : mode_(mode), path_(std::move(path)) {
    if (mode_ == CacheMode::Off) return;
    const bool exists = std::filesystem::exists(*path_);
    if (!exists && mode_ == CacheMode::Replay) {
        throw ConfigError("replay cache " + path_->string() + " does not exist");
    }
    if (exists) {
        for (auto& t : read_transcripts(*path_)) responses_.try_emplace(t.request_digest, std::move(t.response));
    }
    if (mode_ == CacheMode::Record) {
        if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
        file_ = std::fopen(path_->c_str(), "ab");
        if (!file_) throw Error("cannot open cache file " + path_->string() + " for appending");
    }
}

TranscriptStore::~TranscriptStore() {
    if (file_) std::fclose(file_);
}

std::optional<std::string> TranscriptStore::find(const std::string& digest) const {
    std::shared_lock lock(mutex_);
    const auto it = responses_.find(digest);
    if (it == responses_.end()) return std::nullopt;
    return it->second;
}

std::size_t TranscriptStore::size() const {
    std::shared_lock lock(mutex_);
    return responses_.size();
}

void TranscriptStore::append(Transcript t) {
    if (t.checksum.empty()) t.checksum = transcript_checksum(t);
    std::unique_lock lock(mutex_);
    if (responses_.contains(t.request_digest)) return;
    if (file_) {
        const std::string line = transcript_line(t) + "\n";
        const int fd = fileno(file_);
        ::flock(fd, LOCK_EX);
        std::fseek(file_, 0, SEEK_END);
        const bool ok = std::fwrite(line.data(), 1, line.size(), file_) == line.size() && std::fflush(file_) == 0;
        ::flock(fd, LOCK_UN);
        if (!ok) throw Error("failed to append to cache file " + path_->string());
    }
    responses_.emplace(std::move(t.request_digest), std::move(t.response));
}

std::string TranscriptStore::complete(ModelAdapter& adapter, const ChatRequest& request) {
    if (mode_ == CacheMode::Off) {
        ++invocations_;
        return adapter.complete(request);
    }
    const std::string identity = adapter.identity();
    const std::string digest = request_digest(identity, request);
    if (auto hit = find(digest)) {
        ++hits_;
        return *hit;
    }
    if (mode_ == CacheMode::Replay) throw ReplayMiss("no cached response for digest " + digest);

    std::promise<std::string> promise;
    std::shared_future<std::string> pending;
    {
        std::lock_guard lock(inflight_mutex_);
        const auto it = inflight_.find(digest);
        if (it != inflight_.end()) {
            pending = it->second;
        } else {
            inflight_.emplace(digest, promise.get_future().share());
        }
    }
    if (pending.valid()) {
        ++hits_;
        return pending.get();
    }
    // someone may have finished between find() and taking the slot
    if (auto hit = find(digest)) {
        promise.set_value(*hit);
        std::lock_guard lock(inflight_mutex_);
        inflight_.erase(digest);
        ++hits_;
        return *hit;
    }

    try {
        ++invocations_;
        std::string response = adapter.complete(request);
        Transcript t;
        t.request_digest = digest;
        t.request = request;
        t.response = response;
        t.timestamp = utc_timestamp();
        t.model = identity;
        append(std::move(t));
        promise.set_value(response);
        std::lock_guard lock(inflight_mutex_);
        inflight_.erase(digest);
        return response;
    } catch (...) {
        promise.set_exception(std::current_exception());
        std::lock_guard lock(inflight_mutex_);
        inflight_.erase(digest);
        throw;
    }
}

std::string cached_complete(ModelAdapter& adapter, TranscriptStore& store, const ChatRequest& request) {
    return store.complete(adapter, request);
}

}  // namespace tabaudit::llm
