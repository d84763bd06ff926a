#include "persona_lab/error.hpp"
#include "persona_lab/llm_backend.hpp"
#include "persona_lab/util.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <regex>
#include <thread>

namespace persona_lab {

using nlohmann::json;

namespace {

class HttplibTransport : public HttpTransport {
  public:
    HttplibTransport(const std::string &base_url, std::chrono::seconds timeout) {
        static const std::regex url_re(R"(^(https?)://([^/:]+)(?::(\d+))?(/.*)?$)");
        std::smatch m;
        if (!std::regex_match(base_url, m, url_re)) {
            throw Error(Errc::Config, "base_url must look like https://host[:port][/prefix]: " + base_url);
        }
        std::string origin = m[1].str() + "://" + m[2].str();
        if (m[3].matched) {
            origin += ":" + m[3].str();
        }
        prefix_ = m[4].matched ? m[4].str() : "";
        while (!prefix_.empty() && prefix_.back() == '/') {
            prefix_.pop_back();
        }
        client_ = std::make_unique<httplib::Client>(origin);
        client_->set_connection_timeout(timeout);
        client_->set_read_timeout(timeout);
        client_->set_write_timeout(timeout);
    }

    HttpResponse post(const std::string &path, const std::string &body,
                      const std::map<std::string, std::string> &headers) override {
        httplib::Headers h;
        for (const auto &[k, v] : headers) {
            h.emplace(k, v);
        }
        std::lock_guard lock(mutex_);
        auto res = client_->Post(prefix_ + path, h, body, "application/json");
        HttpResponse out;
        if (!res) {
            out.error = httplib::to_string(res.error());
            return out;
        }
        out.status = res->status;
        out.body = res->body;
        for (const auto &[k, v] : res->headers) {
            out.headers[k] = v;
        }
        return out;
    }

  private:
    std::unique_ptr<httplib::Client> client_;
    std::string prefix_;
    std::mutex mutex_;
};

bool retryable_status(int status) { return status == 0 || status == 408 || status == 429 || status >= 500; }

std::optional<std::chrono::milliseconds> retry_after(const HttpResponse &res) {
    for (const auto &[k, v] : res.headers) {
        std::string key = k;
        std::ranges::transform(key, key.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (key == "retry-after") {
            char *end = nullptr;
            const double seconds = std::strtod(v.c_str(), &end);
            if (end != v.c_str() && seconds >= 0) {
                return std::chrono::milliseconds(static_cast<std::int64_t>(seconds * 1000));
            }
        }
    }
    return std::nullopt;
}

void real_sleep(std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }
std::chrono::steady_clock::time_point real_now() { return std::chrono::steady_clock::now(); }

std::string read_api_key(const LiveConfig &config) {
    const char *key = std::getenv(config.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
        throw Error(Errc::BackendUnavailable,
                    "live backend needs an API key: export " + config.api_key_env +
                        "=<key> (or run with --backend mock / --backend replay)");
    }
    return key;
}

} // namespace

std::unique_ptr<HttpTransport> make_http_transport(const std::string &base_url, std::chrono::seconds timeout) {
    return std::make_unique<HttplibTransport>(base_url, timeout);
}

TokenBucket::TokenBucket(double requests_per_minute, double capacity, ClockFn clock, SleepFn sleep)
    : rate_per_ms_(requests_per_minute / 60000.0), capacity_(std::max(1.0, capacity)), tokens_(capacity_),
      clock_(clock ? std::move(clock) : ClockFn(real_now)), sleep_(sleep ? std::move(sleep) : SleepFn(real_sleep)) {
    if (!(requests_per_minute > 0)) {
        throw Error(Errc::Config, "requests_per_minute must be positive");
    }
    last_ = clock_();
}

void TokenBucket::refill(std::chrono::steady_clock::time_point now) {
    const auto elapsed = std::chrono::duration<double, std::milli>(now - last_).count();
    if (elapsed > 0) {
        tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_ms_);
        last_ = now;
    }
}

std::chrono::milliseconds TokenBucket::acquire() {
    std::lock_guard lock(mutex_);
    std::chrono::milliseconds waited{0};
    refill(clock_());
    while (tokens_ < 1.0) {
        const auto wait = std::chrono::milliseconds(static_cast<std::int64_t>(std::ceil((1.0 - tokens_) / rate_per_ms_)));
        sleep_(wait);
        waited += wait;
        refill(clock_());
    }
    tokens_ -= 1.0;
    return waited;
}

std::chrono::milliseconds backoff_delay(const LiveConfig &config, int retry) {
    const auto shift = std::clamp(retry - 1, 0, 30);
    const auto delay = config.backoff_initial.count() * (std::int64_t{1} << shift);
    return std::chrono::milliseconds(std::min<std::int64_t>(delay, config.backoff_cap.count()));
}

json chat_completion_body(const GenerationRequest &request) {
    json messages = json::array();
    for (const auto &m : request.messages) {
        messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    }
    json body = {{"model", request.model_id}, {"messages", std::move(messages)}, {"temperature", request.temperature}};
    if (request.max_tokens) {
        body["max_tokens"] = *request.max_tokens;
    }
    return body;
}

std::string parse_chat_completion(const std::string &body) {
    try {
        const auto j = json::parse(body);
        const auto &content = j.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) {
            throw Error(Errc::BackendUnavailable, "completion has no text content");
        }
        return content.get<std::string>();
    } catch (const json::exception &e) {
        throw Error(Errc::BackendUnavailable, std::string("malformed chat-completion response: ") + e.what());
    }
}

LiveBackend::LiveBackend(LiveConfig config)
    : LiveBackend(config, read_api_key(config), make_http_transport(config.base_url, config.timeout)) {}

LiveBackend::LiveBackend(LiveConfig config, std::string api_key, std::unique_ptr<HttpTransport> transport,
                         SleepFn sleep, ClockFn clock)
    : config_(std::move(config)), api_key_(std::move(api_key)), transport_(std::move(transport)),
      sleep_(sleep ? std::move(sleep) : SleepFn(real_sleep)), clock_(clock ? std::move(clock) : ClockFn(real_now)),
      bucket_(config_.requests_per_minute, 1.0, clock_, sleep_) {}

GenerationResult LiveBackend::generate(const GenerationRequest &request) {
    validate(request);
    const auto body = chat_completion_body(request).dump(-1, ' ', false, json::error_handler_t::replace);
    const std::map<std::string, std::string> headers = {{"Authorization", "Bearer " + api_key_}};
    std::string last_error;
    std::optional<std::chrono::milliseconds> server_delay;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            // a Retry-After header replaces the exponential schedule for this wait
            sleep_(server_delay ? std::min(*server_delay, config_.backoff_cap) : backoff_delay(config_, attempt));
        }
        bucket_.acquire();
        const auto start = clock_();
        const auto res = transport_->post("/chat/completions", body, headers);
        const auto latency = std::chrono::duration_cast<std::chrono::milliseconds>(clock_() - start).count();
        if (res.status >= 200 && res.status < 300) {
            return {std::string(trim_right(parse_chat_completion(res.body))), id(), std::max<std::int64_t>(0, latency),
                    fingerprint(request)};
        }
        last_error = res.status == 0 ? "network error: " + res.error
                                     : "HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 300);
        if (!retryable_status(res.status)) {
            if (res.status == 401 || res.status == 403) {
                last_error += " (check " + config_.api_key_env + ")";
            }
            throw Error(Errc::BackendUnavailable, last_error);
        }
        server_delay = retry_after(res);
    }
    throw Error(Errc::BackendUnavailable,
                "giving up after " + std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

} // namespace persona_lab
