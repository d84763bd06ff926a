#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace persona_lab {

enum class Role { System, User, Assistant };

std::string_view role_name(Role role) noexcept;

struct ChatMessage {
    Role role = Role::User;
    std::string content;

    bool operator==(const ChatMessage &) const = default;
};

struct GenerationRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.7;
    std::string model_id;
    std::optional<int> max_tokens; // unset means provider default (unlimited)
    // Identity of the caller: two agents sending the same prompt, or one agent
    // sending it twice, must be distinguishable when recording and replaying.
    std::string agent_id;
    std::uint64_t sequence = 0;
};

/// Throws Error(Config) when the request violates its invariants.
void validate(const GenerationRequest &request);

/// Canonical JSON form used for fingerprinting and in the replay store.
nlohmann::json request_to_json(const GenerationRequest &request);
GenerationRequest request_from_json(const nlohmann::json &j);

/// SHA-256 over the canonical request form.
std::string fingerprint(const GenerationRequest &request);

struct GenerationResult {
    std::string text;
    std::string backend_id;
    std::int64_t latency_ms = 0;
    std::string raw_fingerprint;
};

class Backend {
  public:
    virtual ~Backend() = default;
    virtual GenerationResult generate(const GenerationRequest &request) = 0;
    [[nodiscard]] virtual std::string id() const = 0;
};

/// Per-agent handle that stamps every request with the agent id and a
/// monotonically increasing sequence number.
class AgentChannel {
  public:
    AgentChannel(Backend &backend, std::string agent_id, double temperature, std::string model_id,
                 std::optional<int> max_tokens = std::nullopt);

    GenerationResult generate(std::vector<ChatMessage> messages);
    [[nodiscard]] std::uint64_t calls() const noexcept { return next_sequence_; }
    [[nodiscard]] const std::string &agent_id() const noexcept { return agent_id_; }

  private:
    Backend *backend_;
    std::string agent_id_;
    double temperature_;
    std::string model_id_;
    std::optional<int> max_tokens_;
    std::uint64_t next_sequence_ = 0;
};

// ---------------------------------------------------------------------------
// Scripted mock

/// Returns the canned completion for a request, or nullopt for a script miss.
using Responder = std::function<std::optional<std::string>(const GenerationRequest &)>;

class ScriptedMockBackend : public Backend {
  public:
    ScriptedMockBackend() = default;
    explicit ScriptedMockBackend(Responder fallback);

    /// Requests whose system prompt contains `system_contains` and whose last
    /// user message contains `user_contains` receive `responses` in order; the
    /// last response repeats once the list is exhausted.
    void add_rule(std::string system_contains, std::string user_contains, std::vector<std::string> responses);

    GenerationResult generate(const GenerationRequest &request) override;
    [[nodiscard]] std::string id() const override { return "scripted-mock"; }
    [[nodiscard]] std::size_t call_count() const;

  private:
    struct Rule {
        std::string system_contains;
        std::string user_contains;
        std::vector<std::string> responses;
        std::size_t served = 0;
    };
    mutable std::mutex mutex_;
    std::vector<Rule> rules_;
    Responder fallback_;
    std::size_t calls_ = 0;
};

// ---------------------------------------------------------------------------
// Record / replay

struct StoreEntry {
    std::string fingerprint;
    GenerationRequest request;
    std::string text;
    std::string timestamp;
};

/// Parses a JSONL replay store, verifying each fingerprint against its request.
std::vector<StoreEntry> read_store(const std::filesystem::path &path);

class RecordingBackend : public Backend {
  public:
    using TimestampFn = std::function<std::string()>;

    RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path store_path,
                     TimestampFn timestamp = {});

    GenerationResult generate(const GenerationRequest &request) override;
    [[nodiscard]] std::string id() const override { return "record(" + inner_->id() + ")"; }
    [[nodiscard]] std::size_t recorded() const;
    [[nodiscard]] const std::filesystem::path &store_path() const noexcept { return path_; }

  private:
    std::shared_ptr<Backend> inner_;
    std::filesystem::path path_;
    TimestampFn timestamp_;
    mutable std::mutex mutex_;
    std::ofstream out_;
    std::size_t recorded_ = 0;
};

class ReplayBackend : public Backend {
  public:
    explicit ReplayBackend(const std::filesystem::path &store_path);

    GenerationResult generate(const GenerationRequest &request) override;
    [[nodiscard]] std::string id() const override { return "replay"; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] std::size_t misses() const;

  private:
    std::unordered_map<std::string, std::string> entries_;
    mutable std::mutex mutex_;
    std::size_t misses_ = 0;
};

std::shared_ptr<Backend> record_session(std::shared_ptr<Backend> inner, const std::filesystem::path &path);
std::shared_ptr<Backend> replay_session(const std::filesystem::path &path);

// ---------------------------------------------------------------------------
// Live HTTP backend

struct HttpResponse {
    int status = 0; // 0 when the request never got a response
    std::string body;
    std::map<std::string, std::string> headers;
    std::string error;
};

class HttpTransport {
  public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const std::string &path, const std::string &body,
                              const std::map<std::string, std::string> &headers) = 0;
};

/// cpp-httplib transport; base_url is scheme://host[:port][/prefix].
std::unique_ptr<HttpTransport> make_http_transport(const std::string &base_url, std::chrono::seconds timeout);

using SleepFn = std::function<void(std::chrono::milliseconds)>;
using ClockFn = std::function<std::chrono::steady_clock::time_point()>;

/// Token bucket refilled continuously at requests_per_minute / 60 tokens per second.
class TokenBucket {
  public:
    TokenBucket(double requests_per_minute, double capacity, ClockFn clock = {}, SleepFn sleep = {});

    /// Blocks (via the sleep function) until a token is available, then takes it.
    /// Returns the total time waited.
    std::chrono::milliseconds acquire();

  private:
    void refill(std::chrono::steady_clock::time_point now);

    double rate_per_ms_;
    double capacity_;
    double tokens_;
    std::chrono::steady_clock::time_point last_;
    ClockFn clock_;
    SleepFn sleep_;
    std::mutex mutex_;
};

struct LiveConfig {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key_env = "PERSONA_LAB_API_KEY";
    std::chrono::seconds timeout{60};
    int max_retries = 5;
    std::chrono::milliseconds backoff_initial{1000};
    std::chrono::milliseconds backoff_cap{30000};
    double requests_per_minute = 20.0;

    bool operator==(const LiveConfig &) const = default;
};

/// Exponential backoff delay before retry number `retry` (1-based), capped.
std::chrono::milliseconds backoff_delay(const LiveConfig &config, int retry);

/// Body of an OpenAI-compatible chat-completions request.
nlohmann::json chat_completion_body(const GenerationRequest &request);
/// Extracts choices[0].message.content; throws Error(BackendUnavailable) on a malformed body.
std::string parse_chat_completion(const std::string &body);

class LiveBackend : public Backend {
  public:
    /// Reads the API key from the configured environment variable; throws
    /// Error(BackendUnavailable) with instructions when it is unset.
    explicit LiveBackend(LiveConfig config);
    LiveBackend(LiveConfig config, std::string api_key, std::unique_ptr<HttpTransport> transport,
                SleepFn sleep = {}, ClockFn clock = {});

    GenerationResult generate(const GenerationRequest &request) override;
    [[nodiscard]] std::string id() const override { return "live"; }

  private:
    LiveConfig config_;
    std::string api_key_;
    std::unique_ptr<HttpTransport> transport_;
    SleepFn sleep_;
    ClockFn clock_;
    TokenBucket bucket_;
};

} // namespace persona_lab
