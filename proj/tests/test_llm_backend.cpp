#include "persona_lab/error.hpp"
#include "persona_lab/llm_backend.hpp"
#include "support.hpp"

#include <doctest.h>
#include <httplib.h>

#include <cstdlib>
#include <deque>
#include <thread>

using namespace persona_lab;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

GenerationRequest request(std::string agent = "a-000-0000", std::uint64_t seq = 0) {
    GenerationRequest r;
    r.messages = {{Role::System, "You are a character."}, {Role::User, "Hello"}};
    r.temperature = 0.7;
    r.model_id = "gpt-3.5-turbo-0613";
    r.agent_id = std::move(agent);
    r.sequence = seq;
    return r;
}

Errc code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::Config;
}

json completion(const std::string &text) {
    return {{"id", "cmpl-1"}, {"choices", json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", text}}}}})}};
}

struct FakeTransport : HttpTransport {
    std::deque<HttpResponse> responses;
    std::vector<std::string> bodies;
    std::vector<std::map<std::string, std::string>> headers;
    std::vector<std::string> paths;

    HttpResponse post(const std::string &path, const std::string &body,
                      const std::map<std::string, std::string> &h) override {
        paths.push_back(path);
        bodies.push_back(body);
        headers.push_back(h);
        if (responses.empty()) return {0, "", {}, "connection refused"};
        auto r = responses.front();
        responses.pop_front();
        return r;
    }
};

struct FakeTime {
    std::chrono::steady_clock::time_point now{};
    std::vector<std::chrono::milliseconds> sleeps;

    SleepFn sleeper() {
        return [this](std::chrono::milliseconds d) {
            sleeps.push_back(d);
            now += d;
        };
    }
    ClockFn clock() {
        return [this] { return now; };
    }
};

LiveConfig fast_config() {
    LiveConfig c;
    c.base_url = "http://127.0.0.1:1/v1";
    c.requests_per_minute = 6000;
    c.max_retries = 3;
    c.backoff_initial = 100ms;
    c.backoff_cap = 250ms;
    return c;
}

} // namespace

TEST_SUITE("llm_backend") {

TEST_CASE("fingerprints separate agents, calls and sampling settings") {
    const auto base = fingerprint(request());
    CHECK(base == fingerprint(request()));
    CHECK(base.size() == 64);
    CHECK(base != fingerprint(request("b-000-0000")));
    CHECK(base != fingerprint(request("a-000-0000", 1)));
    auto r = request();
    r.temperature = 0.8;
    CHECK(base != fingerprint(r));
    r = request();
    r.model_id = "other";
    CHECK(base != fingerprint(r));
    r = request();
    r.messages[1].content = "Hello!";
    CHECK(base != fingerprint(r));
    r = request();
    r.max_tokens = 10;
    CHECK(base != fingerprint(r));
}

TEST_CASE("requests round-trip through their canonical JSON") {
    auto r = request("x", 42);
    r.max_tokens = 256;
    r.messages.push_back({Role::Assistant, "reply"});
    const auto back = request_from_json(request_to_json(r));
    CHECK(back.messages == r.messages);
    CHECK(back.temperature == r.temperature);
    CHECK(back.model_id == r.model_id);
    CHECK(back.max_tokens == r.max_tokens);
    CHECK(back.agent_id == r.agent_id);
    CHECK(back.sequence == r.sequence);
    CHECK(fingerprint(back) == fingerprint(r));
}

TEST_CASE("request validation") {
    auto r = request();
    r.temperature = 2.5;
    CHECK(code_of([&] { validate(r); }) == Errc::Config);
    r = request();
    r.messages.clear();
    CHECK(code_of([&] { validate(r); }) == Errc::Config);
    r = request();
    r.max_tokens = 0;
    CHECK(code_of([&] { validate(r); }) == Errc::Config);
}

TEST_CASE("agent channels stamp identity and a per-agent sequence") {
    std::vector<GenerationRequest> seen;
    ScriptedMockBackend mock([&](const GenerationRequest &r) -> std::optional<std::string> {
        seen.push_back(r);
        return "ok";
    });
    AgentChannel a(mock, "a", 0.7, "m");
    AgentChannel b(mock, "b", 0.7, "m", 128);
    a.generate({{Role::User, "hi"}});
    a.generate({{Role::User, "hi"}});
    b.generate({{Role::User, "hi"}});
    REQUIRE(seen.size() == 3);
    CHECK(seen[0].sequence == 0);
    CHECK(seen[1].sequence == 1);
    CHECK(seen[2].sequence == 0);
    CHECK(seen[2].agent_id == "b");
    CHECK(seen[2].max_tokens == 128);
    CHECK(a.calls() == 2);
    CHECK(fingerprint(seen[0]) != fingerprint(seen[1]));
    CHECK(fingerprint(seen[0]) != fingerprint(seen[2]));
}

TEST_CASE("scripted mock serves its script and misses otherwise") {
    const std::string sheet = "(a) 5\n(b) 1\n";
    ScriptedMockBackend mock;
    mock.add_rule("extroverted", "Statements:", {sheet});
    mock.add_rule("", "story", {"first", "second"});
    auto r = request();
    r.messages = {{Role::System, "You are a character who is extroverted."}, {Role::User, "Statements: ..."}};
    const auto res = mock.generate(r);
    CHECK(res.text == "(a) 5\n(b) 1");
    CHECK(res.backend_id == "scripted-mock");
    CHECK(res.raw_fingerprint == fingerprint(r));

    r.messages.back().content = "tell a story";
    CHECK(mock.generate(r).text == "first");
    CHECK(mock.generate(r).text == "second");
    CHECK(mock.generate(r).text == "second");

    r.messages.back().content = "something else";
    CHECK(code_of([&] { mock.generate(r); }) == Errc::ScriptMiss);
    CHECK(mock.call_count() == 5);
}

TEST_CASE("record then replay") {
    support::TempDir dir("store");
    const auto store = dir / "store.jsonl";
    auto inner = std::make_shared<ScriptedMockBackend>([](const GenerationRequest &r) -> std::optional<std::string> {
        return "reply to " + r.agent_id + "#" + std::to_string(r.sequence);
    });
    {
        RecordingBackend rec(inner, store, [] { return std::string("2024-01-01T00:00:00Z"); });
        for (int i = 0; i < 3; ++i) rec.generate(request("a", static_cast<std::uint64_t>(i)));
        CHECK(rec.recorded() == 3);
    }
    const auto entries = read_store(store);
    REQUIRE(entries.size() == 3);
    CHECK(entries[1].text == "reply to a#1");
    CHECK(entries[1].timestamp == "2024-01-01T00:00:00Z");
    CHECK(entries[1].fingerprint == fingerprint(request("a", 1)));
    const auto store_text = read_file(store);
    for (const auto line : split_lines(store_text)) {
        if (line.empty()) continue;
        const auto j = json::parse(line);
        CHECK(j.contains("fingerprint"));
        CHECK(j.contains("request"));
        CHECK(j.contains("text"));
        CHECK(j.contains("timestamp"));
    }

    const auto calls_before = inner->call_count();
    ReplayBackend replay(store);
    CHECK(replay.size() == 3);
    CHECK(replay.generate(request("a", 2)).text == "reply to a#2");
    CHECK(replay.generate(request("a", 2)).text == "reply to a#2");
    CHECK(inner->call_count() == calls_before);
    CHECK(code_of([&] { replay.generate(request("a", 9)); }) == Errc::ScriptMiss);
    CHECK(replay.misses() == 1);
}

TEST_CASE("corrupt stores are rejected") {
    support::TempDir dir("corrupt");
    const auto store = dir / "store.jsonl";
    {
        RecordingBackend rec(std::make_shared<ScriptedMockBackend>([](const GenerationRequest &) -> std::optional<std::string> {
                                 return "x";
                             }),
                             store);
        rec.generate(request());
    }
    auto text = read_file(store);
    SUBCASE("not JSON") {
        write_file(store, text + "{not json\n");
        CHECK(code_of([&] { ReplayBackend r(store); }) == Errc::StoreCorrupt);
    }
    SUBCASE("fingerprint does not match the request") {
        auto j = json::parse(split_lines(text)[0]);
        j["request"]["temperature"] = 0.1;
        write_file(store, j.dump() + "\n");
        CHECK(code_of([&] { ReplayBackend r(store); }) == Errc::StoreCorrupt);
    }
    SUBCASE("conflicting duplicates") {
        auto j = json::parse(split_lines(text)[0]);
        j["text"] = "y";
        write_file(store, text + j.dump() + "\n");
        CHECK(code_of([&] { ReplayBackend r(store); }) == Errc::StoreCorrupt);
    }
}

TEST_CASE("backoff schedule doubles and is capped") {
    LiveConfig c;
    CHECK(backoff_delay(c, 1) == 1000ms);
    CHECK(backoff_delay(c, 2) == 2000ms);
    CHECK(backoff_delay(c, 3) == 4000ms);
    CHECK(backoff_delay(c, 6) == 30000ms);
    CHECK(backoff_delay(c, 60) == 30000ms);
}

TEST_CASE("token bucket paces requests") {
    FakeTime t;
    TokenBucket bucket(60.0, 1.0, t.clock(), t.sleeper());
    CHECK(bucket.acquire() == 0ms);
    CHECK(bucket.acquire() == 1000ms);
    t.now += 5000ms; // refill is capped at capacity
    CHECK(bucket.acquire() == 0ms);
    CHECK(bucket.acquire() == 1000ms);
    CHECK(code_of([] { TokenBucket b(0.0, 1.0); }) == Errc::Config);
}

TEST_CASE("default rate limit is 20 requests per minute") {
    CHECK(LiveConfig{}.requests_per_minute == 20.0);
    FakeTime t;
    auto transport = std::make_unique<FakeTransport>();
    for (int i = 0; i < 3; ++i) transport->responses.push_back({200, completion("hi").dump(), {}, ""});
    LiveBackend live(LiveConfig{}, "k", std::move(transport), t.sleeper(), t.clock());
    for (int i = 0; i < 3; ++i) live.generate(request("a", static_cast<std::uint64_t>(i)));
    CHECK(t.sleeps == std::vector<std::chrono::milliseconds>{3000ms, 3000ms});
}

TEST_CASE("live backend speaks chat completions") {
    FakeTime t;
    auto transport = std::make_unique<FakeTransport>();
    auto *fake = transport.get();
    fake->responses.push_back({200, completion("Hello there.  \n").dump(), {}, ""});
    LiveBackend live(fast_config(), "secret-key", std::move(transport), t.sleeper(), t.clock());
    const auto res = live.generate(request());
    CHECK(res.text == "Hello there.");
    CHECK(res.backend_id == "live");
    CHECK(fake->paths == std::vector<std::string>{"/chat/completions"});
    CHECK(fake->headers[0].at("Authorization") == "Bearer secret-key");
    const auto body = json::parse(fake->bodies[0]);
    CHECK(body["model"] == "gpt-3.5-turbo-0613");
    CHECK(body["temperature"] == 0.7);
    CHECK(body["messages"][0]["role"] == "system");
    CHECK(body["messages"][1]["content"] == "Hello");
    CHECK_FALSE(body.contains("max_tokens"));
}

TEST_CASE("live backend retries throttling and server errors") {
    FakeTime t;
    auto transport = std::make_unique<FakeTransport>();
    auto *fake = transport.get();
    fake->responses.push_back({429, "slow down", {}, ""});
    fake->responses.push_back({503, "busy", {}, ""});
    fake->responses.push_back({0, "", {}, "timeout"});
    fake->responses.push_back({200, completion("ok").dump(), {}, ""});
    LiveBackend live(fast_config(), "k", std::move(transport), t.sleeper(), t.clock());
    CHECK(live.generate(request()).text == "ok");
    CHECK(fake->bodies.size() == 4);
    CHECK(t.sleeps == std::vector<std::chrono::milliseconds>{100ms, 200ms, 250ms});
}

TEST_CASE("live backend honours Retry-After") {
    FakeTime t;
    auto transport = std::make_unique<FakeTransport>();
    transport->responses.push_back({429, "", {{"Retry-After", "0.2"}}, ""});
    transport->responses.push_back({200, completion("ok").dump(), {}, ""});
    LiveBackend live(fast_config(), "k", std::move(transport), t.sleeper(), t.clock());
    CHECK(live.generate(request()).text == "ok");
    CHECK(t.sleeps == std::vector<std::chrono::milliseconds>{200ms});
}

TEST_CASE("live backend gives up with BackendUnavailable") {
    FakeTime t;
    SUBCASE("retries exhausted") {
        auto transport = std::make_unique<FakeTransport>();
        auto *fake = transport.get();
        for (int i = 0; i < 10; ++i) fake->responses.push_back({500, "oops", {}, ""});
        LiveBackend live(fast_config(), "k", std::move(transport), t.sleeper(), t.clock());
        CHECK(code_of([&] { live.generate(request()); }) == Errc::BackendUnavailable);
        CHECK(fake->bodies.size() == 4);
    }
    SUBCASE("auth failure is not retried") {
        auto transport = std::make_unique<FakeTransport>();
        auto *fake = transport.get();
        fake->responses.push_back({401, "bad key", {}, ""});
        LiveBackend live(fast_config(), "k", std::move(transport), t.sleeper(), t.clock());
        try {
            live.generate(request());
            FAIL("expected BackendUnavailable");
        } catch (const Error &e) {
            CHECK(e.code() == Errc::BackendUnavailable);
            CHECK(std::string(e.what()).find("PERSONA_LAB_API_KEY") != std::string::npos);
        }
        CHECK(fake->bodies.size() == 1);
    }
    SUBCASE("malformed body") {
        auto transport = std::make_unique<FakeTransport>();
        transport->responses.push_back({200, "{\"choices\": []}", {}, ""});
        LiveBackend live(fast_config(), "k", std::move(transport), t.sleeper(), t.clock());
        CHECK(code_of([&] { live.generate(request()); }) == Errc::BackendUnavailable);
    }
}

TEST_CASE("the API key comes from the environment") {
    LiveConfig c = fast_config();
    c.api_key_env = "PERSONA_LAB_TEST_UNSET_KEY";
    ::unsetenv(c.api_key_env.c_str());
    try {
        LiveBackend live(c);
        FAIL("expected BackendUnavailable");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::BackendUnavailable);
        CHECK(std::string(e.what()).find("PERSONA_LAB_TEST_UNSET_KEY") != std::string::npos);
    }
    ::setenv(c.api_key_env.c_str(), "from-env", 1);
    CHECK_NOTHROW(LiveBackend{c});
    ::unsetenv(c.api_key_env.c_str());
}

TEST_CASE("live backend against a loopback HTTP server") {
    httplib::Server server;
    std::string seen_auth;
    json seen_body;
    server.Post("/v1/chat/completions", [&](const httplib::Request &req, httplib::Response &res) {
        seen_auth = req.get_header_value("Authorization");
        seen_body = json::parse(req.body);
        res.set_content(completion("A story.").dump(), "application/json");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    LiveConfig c = fast_config();
    c.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    LiveBackend live(c, "loopback-key", make_http_transport(c.base_url, std::chrono::seconds(5)));
    const auto res = live.generate(request());
    server.stop();
    thread.join();

    CHECK(res.text == "A story.");
    CHECK(seen_auth == "Bearer loopback-key");
    CHECK(seen_body["model"] == "gpt-3.5-turbo-0613");
}

TEST_CASE("unreachable endpoints surface as BackendUnavailable") {
    LiveConfig c = fast_config();
    c.max_retries = 1;
    c.backoff_initial = 1ms;
    c.base_url = "http://127.0.0.1:1/v1";
    LiveBackend live(c, "k", make_http_transport(c.base_url, std::chrono::seconds(2)));
    CHECK(code_of([&] { live.generate(request()); }) == Errc::BackendUnavailable);
}

} // TEST_SUITE
