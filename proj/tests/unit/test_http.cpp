#include <atomic>
#include <thread>

#include "adapters.hpp"
#include "doctest.h"
#include "httplib.h"
#include "tabaudit/error.hpp"
#include "tabaudit/http_adapter.hpp"

using namespace tabaudit;

namespace {

// Local chat-completion endpoint whose handler is supplied per test.
class StubServer {
public:
    explicit StubServer(httplib::Server::Handler handler) {
        server_.Post("/v1/chat/completions", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~StubServer() {
        server_.stop();
        thread_.join();
    }
    [[nodiscard]] llm::HttpEndpoint endpoint() const {
        llm::HttpEndpoint e;
        e.base_url = "http://127.0.0.1:" + std::to_string(port_) + "/v1/";
        e.model = "stub-model";
        e.api_key = "test-key";
        e.timeout = std::chrono::seconds(5);
        return e;
    }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string completion(const std::string& content) {
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

void no_sleep(std::chrono::milliseconds) {}

}  // namespace

TEST_SUITE("http") {
    TEST_CASE("request body and auth header reach the endpoint") {
        std::string seen_auth, seen_body;
        StubServer server([&](const httplib::Request& req, httplib::Response& res) {
            seen_auth = req.get_header_value("Authorization");
            seen_body = req.body;
            const auto j = nlohmann::json::parse(req.body);
            res.set_content(completion(j.at("messages").back().at("content").get<std::string>()), "application/json");
        });
        auto request = fixture::simple_request("ping", 0.5);
        request.stop_sequences = {"\n"};
        request.seed = 99;
        llm::HttpAdapter adapter(server.endpoint(), no_sleep);
        CHECK(adapter.complete(request) == "ping");
        CHECK(adapter.identity() == "stub-model");
        CHECK(seen_auth == "Bearer test-key");
        const auto body = nlohmann::json::parse(seen_body);
        CHECK(body.at("model") == "stub-model");
        CHECK(body.at("temperature") == 0.5);
        CHECK(body.at("stop") == nlohmann::json::array({"\n"}));
        CHECK(body.at("messages").size() == 2);
        CHECK(body.at("messages")[0].at("role") == "system");
        CHECK_FALSE(body.contains("seed"));
    }

    TEST_CASE("rate limits are retried with backoff") {
        std::atomic<int> hits{0};
        StubServer server([&](const httplib::Request&, httplib::Response& res) {
            if (++hits <= 2) {
                res.status = 429;
                res.set_content("slow down", "text/plain");
                return;
            }
            res.set_content(completion("done"), "application/json");
        });
        std::vector<std::chrono::milliseconds> sleeps;
        const auto result = llm::http_complete(server.endpoint(), fixture::simple_request("q"),
                                               [&](std::chrono::milliseconds d) { sleeps.push_back(d); });
        CHECK(result.content == "done");
        CHECK(result.attempts == 3);
        CHECK(hits.load() == 3);
        REQUIRE(sleeps.size() == 2);
        CHECK(sleeps[0] >= std::chrono::milliseconds(1000));
        CHECK(sleeps[1] >= std::chrono::milliseconds(2000));
    }

    TEST_CASE("persistent rate limiting is reported as such") {
        StubServer server([](const httplib::Request&, httplib::Response& res) { res.status = 429; });
        auto endpoint = server.endpoint();
        endpoint.retry.max_attempts = 3;
        CHECK_THROWS_AS(llm::http_complete(endpoint, fixture::simple_request("q"), no_sleep), RateLimitExhausted);
    }

    TEST_CASE("server errors are retried, client errors are not") {
        std::atomic<int> hits{0};
        StubServer flaky([&](const httplib::Request&, httplib::Response& res) {
            if (++hits == 1) {
                res.status = 503;
                return;
            }
            res.set_content(completion("ok"), "application/json");
        });
        CHECK(llm::http_complete(flaky.endpoint(), fixture::simple_request("q"), no_sleep).attempts == 2);

        std::atomic<int> bad_hits{0};
        StubServer bad([&](const httplib::Request&, httplib::Response& res) {
            ++bad_hits;
            res.status = 400;
        });
        CHECK_THROWS_AS(llm::http_complete(bad.endpoint(), fixture::simple_request("q"), no_sleep), TransportError);
        CHECK(bad_hits.load() == 1);
    }

    TEST_CASE("authentication failure is immediate") {
        std::atomic<int> hits{0};
        StubServer server([&](const httplib::Request&, httplib::Response& res) {
            ++hits;
            res.status = 401;
        });
        llm::HttpAdapter adapter(server.endpoint(), no_sleep);
        CHECK_THROWS_AS(adapter.complete(fixture::simple_request("q")), AuthError);
        CHECK(hits.load() == 1);
        CHECK(adapter.attempts() == 1);
    }

    TEST_CASE("malformed responses") {
        StubServer server([](const httplib::Request&, httplib::Response& res) {
            res.set_content("{\"choices\": []}", "application/json");
        });
        CHECK_THROWS_AS(llm::http_complete(server.endpoint(), fixture::simple_request("q"), no_sleep),
                        MalformedResponse);
        CHECK_THROWS_AS(llm::parse_chat_completion("not json"), MalformedResponse);
        CHECK(llm::parse_chat_completion(completion("hi")) == "hi");
        CHECK(llm::parse_chat_completion(R"({"choices":[{"message":{"content":null}}]})").empty());
    }

    TEST_CASE("configuration errors") {
        llm::HttpEndpoint e;
        e.base_url = "http://127.0.0.1:1/v1";
        e.model = "m";
        CHECK_THROWS_AS(llm::http_complete(e, fixture::simple_request("q"), no_sleep), ConfigError);
        e.api_key = "k";
        e.base_url = "ftp://host";
        CHECK_THROWS_AS(llm::http_complete(e, fixture::simple_request("q"), no_sleep), ConfigError);
    }

    TEST_CASE("backoff schedule") {
        llm::RetryPolicy p;
        CHECK(llm::backoff_delay(p, 0, 0.0) == std::chrono::milliseconds(1000));
        CHECK(llm::backoff_delay(p, 1, 0.0) == std::chrono::milliseconds(2000));
        CHECK(llm::backoff_delay(p, 3, 0.0) == std::chrono::milliseconds(8000));
        CHECK(llm::backoff_delay(p, 1, 1.0) == std::chrono::milliseconds(2500));
    }
}
