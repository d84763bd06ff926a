#include "persona_lab/llm_backend.hpp"

#include "persona_lab/error.hpp"
#include "persona_lab/util.hpp"

#include <cmath>
#include <ctime>

namespace persona_lab {

using nlohmann::json;

std::string_view role_name(Role role) noexcept {
    switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    }
    return "user";
}

namespace {

Role parse_role(const std::string &name) {
    if (name == "system") return Role::System;
    if (name == "user") return Role::User;
    if (name == "assistant") return Role::Assistant;
    throw Error(Errc::StoreCorrupt, "unknown role '" + name + "'");
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const ChatMessage *last_user(const GenerationRequest &r) {
    for (auto it = r.messages.rbegin(); it != r.messages.rend(); ++it) {
        if (it->role == Role::User) {
            return &*it;
        }
    }
    return nullptr;
}

} // namespace

void validate(const GenerationRequest &request) {
    if (request.messages.empty()) {
        throw Error(Errc::Config, "generation request has no messages");
    }
    if (!(request.temperature >= 0.0 && request.temperature <= 2.0)) {
        throw Error(Errc::Config, "temperature must lie in [0, 2]");
    }
    if (request.max_tokens && *request.max_tokens <= 0) {
        throw Error(Errc::Config, "max_tokens must be positive");
    }
    for (const auto &m : request.messages) {
        if (m.role != Role::Assistant && m.content.empty()) {
            throw Error(Errc::Config, "system and user messages must be non-empty");
        }
    }
}

json request_to_json(const GenerationRequest &request) {
    json messages = json::array();
    for (const auto &m : request.messages) {
        messages.push_back({{"role", role_name(m.role)}, {"content", m.content}});
    }
    json j = {{"agent_id", request.agent_id},
              {"sequence", request.sequence},
              {"model", request.model_id},
              {"temperature", request.temperature},
              {"messages", std::move(messages)}};
    j["max_tokens"] = request.max_tokens ? json(*request.max_tokens) : json(nullptr);
    return j;
}

GenerationRequest request_from_json(const json &j) {
    try {
        GenerationRequest r;
        r.agent_id = j.at("agent_id").get<std::string>();
        r.sequence = j.at("sequence").get<std::uint64_t>();
        r.model_id = j.at("model").get<std::string>();
        r.temperature = j.at("temperature").get<double>();
        if (const auto &mt = j.at("max_tokens"); !mt.is_null()) {
            r.max_tokens = mt.get<int>();
        }
        for (const auto &m : j.at("messages")) {
            r.messages.push_back({parse_role(m.at("role").get<std::string>()), m.at("content").get<std::string>()});
        }
        return r;
    } catch (const json::exception &e) {
        throw Error(Errc::StoreCorrupt, std::string("bad request record: ") + e.what());
    }
}

std::string fingerprint(const GenerationRequest &request) {
    return sha256_hex(request_to_json(request).dump(-1, ' ', false, json::error_handler_t::replace));
}

AgentChannel::AgentChannel(Backend &backend, std::string agent_id, double temperature, std::string model_id,
                           std::optional<int> max_tokens)
    : backend_(&backend), agent_id_(std::move(agent_id)), temperature_(temperature), model_id_(std::move(model_id)),
      max_tokens_(max_tokens) {}

GenerationResult AgentChannel::generate(std::vector<ChatMessage> messages) {
    GenerationRequest request{std::move(messages), temperature_, model_id_, max_tokens_, agent_id_, next_sequence_++};
    validate(request);
    return backend_->generate(request);
}

// --- scripted mock ----------------------------------------------------------

ScriptedMockBackend::ScriptedMockBackend(Responder fallback) : fallback_(std::move(fallback)) {}

void ScriptedMockBackend::add_rule(std::string system_contains, std::string user_contains,
                                   std::vector<std::string> responses) {
    std::lock_guard lock(mutex_);
    rules_.push_back({std::move(system_contains), std::move(user_contains), std::move(responses), 0});
}

GenerationResult ScriptedMockBackend::generate(const GenerationRequest &request) {
    const auto fp = fingerprint(request);
    std::optional<std::string> text;
    {
        std::lock_guard lock(mutex_);
        ++calls_;
        const std::string_view system =
            request.messages.front().role == Role::System ? std::string_view(request.messages.front().content) : "";
        const auto *user = last_user(request);
        for (auto &rule : rules_) {
            if (rule.responses.empty() || system.find(rule.system_contains) == std::string_view::npos) {
                continue;
            }
            if (user == nullptr || user->content.find(rule.user_contains) == std::string::npos) {
                continue;
            }
            const auto idx = std::min(rule.served, rule.responses.size() - 1);
            ++rule.served;
            text = rule.responses[idx];
            break;
        }
    }
    if (!text && fallback_) {
        text = fallback_(request);
    }
    if (!text) {
        throw Error(Errc::ScriptMiss, "no scripted response for agent '" + request.agent_id + "' call " +
                                          std::to_string(request.sequence));
    }
    return {std::string(trim_right(*text)), id(), 0, fp};
}

std::size_t ScriptedMockBackend::call_count() const {
    std::lock_guard lock(mutex_);
    return calls_;
}

// --- record / replay --------------------------------------------------------

std::vector<StoreEntry> read_store(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::StoreCorrupt, "cannot read replay store " + path.string());
    }
    std::vector<StoreEntry> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto where = path.string() + ":" + std::to_string(line_no);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception &e) {
            throw Error(Errc::StoreCorrupt, where + ": " + e.what());
        }
        StoreEntry entry;
        try {
            entry.fingerprint = j.at("fingerprint").get<std::string>();
            entry.text = j.at("text").get<std::string>();
            entry.timestamp = j.at("timestamp").get<std::string>();
        } catch (const json::exception &e) {
            throw Error(Errc::StoreCorrupt, where + ": " + e.what());
        }
        if (!j.contains("request")) {
            throw Error(Errc::StoreCorrupt, where + ": missing request");
        }
        entry.request = request_from_json(j["request"]);
        if (fingerprint(entry.request) != entry.fingerprint) {
            throw Error(Errc::StoreCorrupt, where + ": fingerprint does not match request");
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, std::filesystem::path store_path,
                                   TimestampFn timestamp)
    : inner_(std::move(inner)), path_(std::move(store_path)), timestamp_(std::move(timestamp)) {
    if (!timestamp_) {
        timestamp_ = utc_now;
    }
    if (path_.has_parent_path()) {
        std::filesystem::create_directories(path_.parent_path());
    }
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) {
        throw Error(Errc::Config, "cannot open replay store for writing: " + path_.string());
    }
}

GenerationResult RecordingBackend::generate(const GenerationRequest &request) {
    auto result = inner_->generate(request);
    result.raw_fingerprint = fingerprint(request);
    json line = {{"fingerprint", result.raw_fingerprint},
                 {"request", request_to_json(request)},
                 {"text", result.text},
                 {"timestamp", timestamp_()}};
    std::lock_guard lock(mutex_);
    out_ << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    out_.flush();
    ++recorded_;
    return result;
}

std::size_t RecordingBackend::recorded() const {
    std::lock_guard lock(mutex_);
    return recorded_;
}

ReplayBackend::ReplayBackend(const std::filesystem::path &store_path) {
    for (auto &entry : read_store(store_path)) {
        const auto [it, inserted] = entries_.emplace(entry.fingerprint, entry.text);
        if (!inserted && it->second != entry.text) {
            throw Error(Errc::StoreCorrupt, "conflicting completions for fingerprint " + entry.fingerprint);
        }
    }
}

GenerationResult ReplayBackend::generate(const GenerationRequest &request) {
    auto fp = fingerprint(request);
    const auto it = entries_.find(fp);
    if (it == entries_.end()) {
        std::lock_guard lock(mutex_);
        ++misses_;
        throw Error(Errc::ScriptMiss, "replay store has no entry for agent '" + request.agent_id + "' call " +
                                          std::to_string(request.sequence));
    }
    return {it->second, id(), 0, std::move(fp)};
}

std::size_t ReplayBackend::misses() const {
    std::lock_guard lock(mutex_);
    return misses_;
}

std::shared_ptr<Backend> record_session(std::shared_ptr<Backend> inner, const std::filesystem::path &path) {
    return std::make_shared<RecordingBackend>(std::move(inner), path);
}

std::shared_ptr<Backend> replay_session(const std::filesystem::path &path) {
    return std::make_shared<ReplayBackend>(path);
}

} // namespace persona_lab
