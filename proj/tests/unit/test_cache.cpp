#include <sys/wait.h>

#include <fstream>
#include <thread>

#include "adapters.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "tabaudit/error.hpp"
#include "tabaudit/transcript_cache.hpp"

using namespace tabaudit;
using llm::CacheMode;
using llm::TranscriptStore;

namespace {

std::vector<std::string> file_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

}  // namespace

TEST_SUITE("cache") {
    TEST_CASE("record then replay returns the recorded bytes") {
        fixture::TempDir dir("cache-record");
        const auto path = dir.path() / "t.jsonl";
        auto echo = fixture::echo_adapter();
        {
            TranscriptStore store(path, CacheMode::Record);
            CHECK(store.complete(echo, fixture::simple_request("one")) == "one");
            CHECK(store.complete(echo, fixture::simple_request("one")) == "one");
            CHECK(store.complete(echo, fixture::simple_request("two", 0.7)) == "two");
            CHECK(echo.calls() == 2);
            CHECK(store.invocations() == 2);
            CHECK(store.hits() == 1);
        }
        CHECK(file_lines(path).size() == 2);

        fixture::ScriptedAdapter silent([](const llm::ChatRequest&) -> std::string {
            throw TransportError("must not be called in replay");
        }, "echo");
        TranscriptStore replay(path, CacheMode::Replay);
        CHECK(replay.complete(silent, fixture::simple_request("one")) == "one");
        CHECK(replay.complete(silent, fixture::simple_request("two", 0.7)) == "two");
        CHECK(silent.calls() == 0);
        CHECK_THROWS_AS(replay.complete(silent, fixture::simple_request("three")), ReplayMiss);
        CHECK_THROWS_AS(replay.complete(silent, fixture::simple_request("two", 0.8)), ReplayMiss);

        fixture::ScriptedAdapter other([](const llm::ChatRequest&) { return std::string("x"); }, "other-model");
        CHECK_THROWS_AS(replay.complete(other, fixture::simple_request("one")), ReplayMiss);
    }

    TEST_CASE("replay against a missing or empty cache") {
        fixture::TempDir dir("cache-empty");
        CHECK_THROWS_AS(TranscriptStore(dir.path() / "absent.jsonl", CacheMode::Replay), ConfigError);
        fixture::write_file(dir.path() / "empty.jsonl", "");
        TranscriptStore empty(dir.path() / "empty.jsonl", CacheMode::Replay);
        auto echo = fixture::echo_adapter();
        CHECK_THROWS_AS(empty.complete(echo, fixture::simple_request("q")), ReplayMiss);
        CHECK(echo.calls() == 0);
    }

    TEST_CASE("corrupt lines are reported with their number") {
        fixture::TempDir dir("cache-corrupt");
        const auto path = dir.path() / "t.jsonl";
        auto echo = fixture::echo_adapter();
        {
            TranscriptStore store(path, CacheMode::Record);
            for (int i = 0; i < 3; ++i) store.complete(echo, fixture::simple_request("q" + std::to_string(i)));
        }
        auto lines = file_lines(path);
        REQUIRE(lines.size() == 3);
        const auto pos = lines[1].find("\"response\":\"q1\"");
        REQUIRE(pos != std::string::npos);
        lines[1].replace(pos, 15, "\"response\":\"qX\"");
        fixture::write_file(path, lines[0] + "\n" + lines[1] + "\n" + lines[2] + "\n");
        try {
            llm::read_transcripts(path);
            FAIL("expected CorruptCache");
        } catch (const CorruptCache& e) {
            CHECK(e.line() == 2);
        }
        fixture::write_file(path, lines[0] + "\n{not json\n");
        try {
            TranscriptStore store(path, CacheMode::Replay);
            FAIL("expected CorruptCache");
        } catch (const CorruptCache& e) {
            CHECK(e.line() == 2);
        }
    }

    TEST_CASE("off mode never stores") {
        auto echo = fixture::echo_adapter();
        TranscriptStore store(CacheMode::Off);
        store.complete(echo, fixture::simple_request("a"));
        store.complete(echo, fixture::simple_request("a"));
        CHECK(echo.calls() == 2);
        CHECK(store.size() == 0);
        CHECK_THROWS_AS(llm::cache_mode_from_string("sometimes"), ConfigError);
    }

    TEST_CASE("concurrent misses on one digest collapse into one call") {
        fixture::ScriptedAdapter slow([](const llm::ChatRequest& r) {
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
            return std::string(llm::last_user_content(r));
        });
        TranscriptStore store(CacheMode::Record);
        std::vector<std::string> results(8);
        {
            std::vector<std::jthread> threads;
            for (std::size_t i = 0; i < results.size(); ++i) {
                threads.emplace_back([&, i] { results[i] = store.complete(slow, fixture::simple_request("same")); });
            }
        }
        CHECK(slow.calls() == 1);
        CHECK(store.invocations() == 1);
        for (const auto& r : results) CHECK(r == "same");
    }

    TEST_CASE("concurrent writers produce whole lines") {
        fixture::TempDir dir("cache-writers");
        const auto path = dir.path() / "shared.jsonl";
        const int writers = 4, per_writer = 40;
        {
            std::vector<std::jthread> threads;
            for (int w = 0; w < writers; ++w) {
                threads.emplace_back([&, w] {
                    auto echo = fixture::echo_adapter();
                    TranscriptStore store(path, CacheMode::Record);
                    for (int i = 0; i < per_writer; ++i) {
                        store.complete(echo, fixture::simple_request(std::string(200, 'a' + w) + std::to_string(i)));
                    }
                });
            }
        }
        std::vector<pid_t> children;
        for (int w = 0; w < writers; ++w) {
            const pid_t pid = fork();
            if (pid == 0) {
                int code = 0;
                try {
                    auto echo = fixture::echo_adapter();
                    TranscriptStore store(path, CacheMode::Record);
                    for (int i = 0; i < per_writer; ++i) {
                        store.complete(echo, fixture::simple_request(std::string(300, 'p' + w) + std::to_string(i)));
                    }
                } catch (...) {
                    code = 1;
                }
                _exit(code);
            }
            children.push_back(pid);
        }
        for (const pid_t pid : children) {
            int status = 0;
            waitpid(pid, &status, 0);
            CHECK(WIFEXITED(status));
            CHECK(WEXITSTATUS(status) == 0);
        }
        const auto all = llm::read_transcripts(path);
        CHECK(all.size() == static_cast<std::size_t>(2 * writers * per_writer));
    }

    TEST_CASE("transcript json round trip") {
        llm::Transcript t;
        t.request = fixture::simple_request("hello", 0.3);
        t.model = "m";
        t.request_digest = llm::request_digest("m", t.request);
        t.response = "world";
        t.timestamp = "2024-01-01T00:00:00Z";
        const auto j = llm::to_json(t);
        const auto back = llm::transcript_from_json(j);
        CHECK_FALSE(llm::transcript_problem(back).has_value());
        CHECK(back.response == "world");
        CHECK(back.request == t.request);
        auto tampered = back;
        tampered.model = "n";
        CHECK(llm::transcript_problem(tampered).has_value());
    }
}
