#include "persona_lab/experiment.hpp"

#include "persona_lab/error.hpp"
#include "persona_lab/util.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

namespace persona_lab {

using nlohmann::json;

std::string_view backend_mode_name(BackendMode mode) noexcept {
    switch (mode) {
    case BackendMode::Live: return "live";
    case BackendMode::Record: return "record";
    case BackendMode::Replay: return "replay";
    case BackendMode::ScriptedMock: return "mock";
    }
    return "mock";
}

std::optional<BackendMode> parse_backend_mode(std::string_view name) noexcept {
    for (auto m : {BackendMode::Live, BackendMode::Record, BackendMode::Replay, BackendMode::ScriptedMock}) {
        if (backend_mode_name(m) == name) return m;
    }
    return std::nullopt;
}

std::string_view experiment_name(ExperimentKind kind) noexcept {
    return kind == ExperimentKind::NonInteractive ? "exp1" : "exp2";
}

std::optional<ExperimentKind> parse_experiment(std::string_view name) noexcept {
    if (name == "exp1") return ExperimentKind::NonInteractive;
    if (name == "exp2") return ExperimentKind::Interactive;
    return std::nullopt;
}

// --- configuration -----------------------------------------------------------

void validate(const ExperimentConfig &c) {
    const auto fail = [](const std::string &msg) { throw Error(Errc::Config, msg); };
    if (c.population_per_group < 1) fail("population_per_group must be >= 1");
    if (!(c.temperature >= 0.0 && c.temperature <= 2.0)) fail("temperature must lie in [0, 2]");
    if (c.model_id.empty()) fail("model_id must be set");
    if (c.max_tokens && *c.max_tokens <= 0) fail("max_tokens must be positive or null");
    if (c.word_min < 0 || c.word_min >= c.word_max) fail("word_min must be below word_max");
    if (c.bfi_retries < 1) fail("bfi_retries must be >= 1");
    if (c.story_retries < 1) fail("story_retries must be >= 1");
    if (c.pairing != "CrossGroupBothOrders") fail("pairing must be CrossGroupBothOrders");
    if (c.concurrency < 1) fail("concurrency must be >= 1");
    if (!(c.max_group_failure_fraction >= 0.0 && c.max_group_failure_fraction <= 1.0))
        fail("max_group_failure_fraction must lie in [0, 1]");
    if (c.live.max_retries < 0) fail("live.max_retries must be >= 0");
    if (!(c.live.requests_per_minute > 0)) fail("live.requests_per_minute must be positive");
    const auto &m = c.mock;
    for (double p : {m.signal_fraction, m.cross_fraction, m.alignment, m.answer_noise, m.post_writing_drift,
                     m.malformed_rate, m.short_story_rate}) {
        if (!(p >= 0.0 && p <= 1.0)) fail("mock probabilities must lie in [0, 1]");
    }
    if (m.story_min_words < 1 || m.story_min_words > m.story_max_words) fail("mock story word range is invalid");
}

json config_to_json(const ExperimentConfig &c, bool include_runtime) {
    json j;
    j["population_per_group"] = c.population_per_group;
    j["temperature"] = c.temperature;
    j["model_id"] = c.model_id;
    j["max_tokens"] = c.max_tokens ? json(*c.max_tokens) : json(nullptr);
    j["word_min"] = c.word_min;
    j["word_max"] = c.word_max;
    j["bfi_retries"] = c.bfi_retries;
    j["story_retries"] = c.story_retries;
    j["pairing"] = c.pairing;
    j["rng_seed"] = c.rng_seed;
    if (include_runtime) {
        j["backend_mode"] = backend_mode_name(c.backend_mode);
        j["concurrency"] = c.concurrency;
    }
    j["max_group_failure_fraction"] = c.max_group_failure_fraction;
    j["profiles_file"] = c.profiles_file;
    j["live"] = {{"base_url", c.live.base_url},
                 {"api_key_env", c.live.api_key_env},
                 {"timeout_s", c.live.timeout.count()},
                 {"max_retries", c.live.max_retries},
                 {"backoff_initial_ms", c.live.backoff_initial.count()},
                 {"backoff_cap_ms", c.live.backoff_cap.count()},
                 {"requests_per_minute", c.live.requests_per_minute}};
    j["mock"] = {{"signal_fraction", c.mock.signal_fraction},
                 {"cross_fraction", c.mock.cross_fraction},
                 {"alignment", c.mock.alignment},
                 {"answer_noise", c.mock.answer_noise},
                 {"post_writing_drift", c.mock.post_writing_drift},
                 {"malformed_rate", c.mock.malformed_rate},
                 {"short_story_rate", c.mock.short_story_rate},
                 {"story_min_words", c.mock.story_min_words},
                 {"story_max_words", c.mock.story_max_words}};
    return j;
}

namespace {

template <typename T> void read_key(const json &j, const char *key, T &out) {
    if (const auto it = j.find(key); it != j.end()) {
        out = it->get<T>();
    }
}

void reject_unknown(const json &j, std::initializer_list<std::string_view> known, const std::string &where) {
    for (const auto &[key, _] : j.items()) {
        if (std::ranges::find(known, std::string_view(key)) == known.end()) {
            throw Error(Errc::Config, "unknown config key '" + where + key + "'");
        }
    }
}

} // namespace

ExperimentConfig config_from_json(const json &j) {
    ExperimentConfig c;
    try {
        if (!j.is_object()) {
            throw Error(Errc::Config, "config must be a JSON object");
        }
        reject_unknown(j,
                       {"population_per_group", "temperature", "model_id", "max_tokens", "word_min", "word_max",
                        "bfi_retries", "story_retries", "pairing", "rng_seed", "backend_mode", "concurrency",
                        "max_group_failure_fraction", "profiles_file", "live", "mock"},
                       "");
        read_key(j, "population_per_group", c.population_per_group);
        read_key(j, "temperature", c.temperature);
        read_key(j, "model_id", c.model_id);
        if (const auto it = j.find("max_tokens"); it != j.end() && !it->is_null()) {
            c.max_tokens = it->get<int>();
        }
        read_key(j, "word_min", c.word_min);
        read_key(j, "word_max", c.word_max);
        read_key(j, "bfi_retries", c.bfi_retries);
        read_key(j, "story_retries", c.story_retries);
        read_key(j, "pairing", c.pairing);
        read_key(j, "rng_seed", c.rng_seed);
        if (const auto it = j.find("backend_mode"); it != j.end()) {
            const auto mode = parse_backend_mode(it->get<std::string>());
            if (!mode) throw Error(Errc::Config, "backend_mode must be live, record, replay or mock");
            c.backend_mode = *mode;
        }
        read_key(j, "concurrency", c.concurrency);
        read_key(j, "max_group_failure_fraction", c.max_group_failure_fraction);
        read_key(j, "profiles_file", c.profiles_file);
        if (const auto it = j.find("live"); it != j.end()) {
            const auto &l = *it;
            reject_unknown(l,
                           {"base_url", "api_key_env", "timeout_s", "max_retries", "backoff_initial_ms",
                            "backoff_cap_ms", "requests_per_minute"},
                           "live.");
            read_key(l, "base_url", c.live.base_url);
            read_key(l, "api_key_env", c.live.api_key_env);
            if (l.contains("timeout_s")) c.live.timeout = std::chrono::seconds(l["timeout_s"].get<std::int64_t>());
            read_key(l, "max_retries", c.live.max_retries);
            if (l.contains("backoff_initial_ms"))
                c.live.backoff_initial = std::chrono::milliseconds(l["backoff_initial_ms"].get<std::int64_t>());
            if (l.contains("backoff_cap_ms"))
                c.live.backoff_cap = std::chrono::milliseconds(l["backoff_cap_ms"].get<std::int64_t>());
            read_key(l, "requests_per_minute", c.live.requests_per_minute);
        }
        if (const auto it = j.find("mock"); it != j.end()) {
            const auto &m = *it;
            reject_unknown(m,
                           {"signal_fraction", "cross_fraction", "alignment", "answer_noise", "post_writing_drift",
                            "malformed_rate", "short_story_rate", "story_min_words", "story_max_words"},
                           "mock.");
            read_key(m, "signal_fraction", c.mock.signal_fraction);
            read_key(m, "cross_fraction", c.mock.cross_fraction);
            read_key(m, "alignment", c.mock.alignment);
            read_key(m, "answer_noise", c.mock.answer_noise);
            read_key(m, "post_writing_drift", c.mock.post_writing_drift);
            read_key(m, "malformed_rate", c.mock.malformed_rate);
            read_key(m, "short_story_rate", c.mock.short_story_rate);
            read_key(m, "story_min_words", c.mock.story_min_words);
            read_key(m, "story_max_words", c.mock.story_max_words);
        }
    } catch (const json::exception &e) {
        throw Error(Errc::Config, std::string("config: ") + e.what());
    }
    validate(c);
    return c;
}

ExperimentConfig parse_config(std::string_view text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::exception &e) {
        throw Error(Errc::Config, std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

ExperimentConfig load_config(const std::filesystem::path &path) { return parse_config(read_file(path)); }

std::string default_config_text() {
    return R"(// persona-lab experiment configuration (JSON with // comments)
{
  // agents bootstrapped per persona profile
  "population_per_group": 100,
  // sampling temperature for every generation call
  "temperature": 0.7,
  "model_id": "gpt-3.5-turbo-0613",
  // null leaves the provider default in place
  "max_tokens": null,
  // stories outside [word_min, word_max] words are resampled, then rejected
  "word_min": 500,
  "word_max": 900,
  // total attempts per questionnaire / per story
  "bfi_retries": 3,
  "story_retries": 3,
  "pairing": "CrossGroupBothOrders",
  "rng_seed": 42,
  // live | record | replay | mock (overridden by --backend)
  "backend_mode": "mock",
  // agents processed in parallel
  "concurrency": 1,
  // a run fails when more than this share of a group has unusable questionnaires
  "max_group_failure_fraction": 0.5,
  // empty: the builtin creative/analytical profiles
  "profiles_file": "",
  "live": {
    // any OpenAI-compatible chat-completions endpoint; the key comes from the named env var
    "base_url": "https://api.openai.com/v1",
    "api_key_env": "PERSONA_LAB_API_KEY",
    "timeout_s": 60,
    "max_retries": 5,
    "backoff_initial_ms": 1000,
    "backoff_cap_ms": 30000,
    "requests_per_minute": 20.0
  },
  // synthetic persona mock used by --backend mock
  "mock": {
    "signal_fraction": 0.7,
    "cross_fraction": 0.0,
    "alignment": 0.5,
    "answer_noise": 0.15,
    "post_writing_drift": 0.3,
    "malformed_rate": 0.0,
    "short_story_rate": 0.0,
    "story_min_words": 560,
    "story_max_words": 860
  }
}
)";
}

std::vector<PersonaProfile> resolve_profiles(const ExperimentConfig &config, const std::filesystem::path &base_dir) {
    std::vector<PersonaProfile> profiles;
    if (config.profiles_file.empty()) {
        profiles = builtin_profiles();
    } else {
        std::filesystem::path path(config.profiles_file);
        if (path.is_relative() && !base_dir.empty()) {
            path = base_dir / path;
        }
        profiles = load_profiles(path);
    }
    const auto creative = std::ranges::count(profiles, Group::Creative, &PersonaProfile::group);
    const auto analytical = std::ranges::count(profiles, Group::Analytical, &PersonaProfile::group);
    if (profiles.size() != 2 || creative != 1 || analytical != 1) {
        throw Error(Errc::Config, "exactly one creative and one analytical profile are required");
    }
    return profiles;
}

// --- prompts -------------------------------------------------------------------

namespace {

constexpr std::string_view kWritingPrompt =
    "Please share a personal story below in 800 words. Do not explicitly mention your personality traits in the "
    "story.";
constexpr std::string_view kInteractiveTemplate =
    "Please share a personal story below in 800 words. Do not explicitly mention your personality traits in the "
    "story. Last response to question is {other_model_response}";

} // namespace

std::string writing_prompt() { return std::string(kWritingPrompt); }

std::string interactive_prompt(std::string_view partner_story) {
    std::string prompt(kInteractiveTemplate);
    const std::string_view placeholder = "{other_model_response}";
    prompt.replace(prompt.find(placeholder), placeholder.size(), partner_story);
    return prompt;
}

// --- population ------------------------------------------------------------------

const AgentSpec *RunArtifact::find_agent(std::string_view agent_id) const noexcept {
    const auto it = std::ranges::find(agents, agent_id, &AgentSpec::agent_id);
    return it == agents.end() ? nullptr : &*it;
}

bool RunArtifact::has_phase(BfiPhase phase) const noexcept {
    return std::ranges::any_of(bfi, [&](const BfiRecord &r) { return r.scores.phase == phase; });
}

std::vector<AgentSpec> bootstrap_population(const ExperimentConfig &config,
                                            const std::vector<PersonaProfile> &profiles) {
    validate(config);
    const auto width = std::max<std::size_t>(3, std::to_string(config.population_per_group).size());
    std::vector<AgentSpec> agents;
    for (const auto &profile : profiles) {
        for (int i = 0; i < config.population_per_group; ++i) {
            auto index = std::to_string(i);
            index.insert(0, width - index.size(), '0');
            const auto tag =
                sha256_hex(std::to_string(config.rng_seed) + ":" + profile.id + ":" + std::to_string(i)).substr(0, 4);
            agents.push_back({profile.id + "-" + index + "-" + tag, profile.id, profile.group, config.temperature});
        }
    }
    std::ranges::sort(agents, {}, &AgentSpec::agent_id);
    return agents;
}

// --- running -----------------------------------------------------------------------

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers; the exception of the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &fn) {
    std::vector<std::exception_ptr> errors(n);
    const auto run_one = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> workers;
        const auto count = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
        for (std::size_t w = 0; w < count; ++w) {
            workers.emplace_back([&] {
                for (auto i = next++; i < n; i = next++) run_one(i);
            });
        }
    }
    for (const auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

struct AgentState {
    const AgentSpec *spec = nullptr;
    const PersonaProfile *profile = nullptr;
    std::unique_ptr<AgentChannel> channel;
    std::vector<BfiRecord> bfi;
    std::vector<StoryRecord> stories;
    std::vector<FailureRecord> failures;
};

std::vector<AgentState> make_states(const std::vector<AgentSpec> &population, const ExperimentConfig &config,
                                    const std::vector<PersonaProfile> &profiles, Backend &backend) {
    std::vector<AgentState> states;
    for (const auto &agent : population) {
        AgentState s;
        s.spec = &agent;
        s.profile = find_profile(profiles, agent.profile_id);
        if (s.profile == nullptr) {
            throw Error(Errc::Config, "agent '" + agent.agent_id + "' references unknown profile '" + agent.profile_id + "'");
        }
        if (s.profile->group != agent.group) {
            throw Error(Errc::Config, "agent '" + agent.agent_id + "' group label disagrees with its profile");
        }
        s.channel = std::make_unique<AgentChannel>(backend, agent.agent_id, agent.sampling_temperature,
                                                   config.model_id, config.max_tokens);
        states.push_back(std::move(s));
    }
    return states;
}

std::vector<ChatMessage> persona_context(const AgentState &s) { return {{Role::System, s.profile->system_prompt}}; }

void take_bfi(AgentState &s, std::vector<ChatMessage> context, BfiPhase phase, const ExperimentConfig &config,
              const char *stage) {
    try {
        auto result = administer_bfi(*s.spec, std::move(context), *s.channel, phase, config.bfi_retries);
        s.bfi.push_back({s.spec->agent_id, s.spec->group, result.scores});
    } catch (const PersistentlyMalformedError &e) {
        s.failures.push_back({s.spec->agent_id, stage, e.what(), e.raw_texts()});
    }
}

StoryRecord write_story(AgentState &s, const std::string &prompt, StoryPhase phase,
                        std::optional<std::string> partner, const ExperimentConfig &config) {
    StoryRecord rec;
    rec.agent_id = s.spec->agent_id;
    rec.phase = phase;
    rec.partner_agent_id = std::move(partner);
    auto context = persona_context(s);
    context.push_back({Role::User, prompt});
    for (int attempt = 1; attempt <= config.story_retries; ++attempt) {
        auto reply = s.channel->generate(context);
        rec.text = std::move(reply.text);
        rec.word_count = count_words(rec.text);
        rec.attempt = attempt;
        rec.accepted = static_cast<int>(rec.word_count) >= config.word_min &&
                       static_cast<int>(rec.word_count) <= config.word_max;
        if (rec.accepted) {
            break;
        }
    }
    if (!rec.accepted) {
        s.failures.push_back({rec.agent_id, "story_rejected",
                              std::string(story_phase_name(phase)) + " story has " + std::to_string(rec.word_count) +
                                  " words after " + std::to_string(rec.attempt) + " attempts",
                              {}});
    }
    s.stories.push_back(rec);
    return rec;
}

std::vector<ChatMessage> after_writing_context(const AgentState &s, const std::string &prompt, const StoryRecord &story) {
    auto context = persona_context(s);
    context.push_back({Role::User, prompt});
    context.push_back({Role::Assistant, story.text});
    return context;
}

RunArtifact assemble(ExperimentKind kind, std::vector<AgentState> &states, const std::vector<AgentSpec> &population,
                     const ExperimentConfig &config, const std::vector<PersonaProfile> &profiles) {
    RunArtifact a;
    a.experiment = kind;
    a.tool_version = PERSONA_LAB_VERSION;
    a.context_policy = std::string(kContextPolicy);
    a.config = config;
    a.profiles = profiles;
    a.agents = population;
    std::ranges::sort(a.agents, {}, &AgentSpec::agent_id);
    for (auto &s : states) {
        std::ranges::move(s.bfi, std::back_inserter(a.bfi));
        std::ranges::move(s.stories, std::back_inserter(a.stories));
        std::ranges::move(s.failures, std::back_inserter(a.failures));
    }
    std::ranges::stable_sort(a.bfi, [](const BfiRecord &l, const BfiRecord &r) {
        return std::tie(l.agent_id, l.scores.phase) < std::tie(r.agent_id, r.scores.phase);
    });
    std::ranges::stable_sort(a.stories, [](const StoryRecord &l, const StoryRecord &r) {
        return std::tie(l.agent_id, l.phase) < std::tie(r.agent_id, r.phase);
    });
    std::ranges::stable_sort(a.failures, {}, &FailureRecord::agent_id);
    const auto snapshot = config_to_json(config, false).dump();
    a.run_id = std::string(experiment_name(kind)) + "-seed" + std::to_string(config.rng_seed) + "-" +
               sha256_hex(snapshot).substr(0, 8);
    return a;
}

} // namespace

RunArtifact run_noninteractive(const std::vector<AgentSpec> &population, const ExperimentConfig &config,
                               const std::vector<PersonaProfile> &profiles, Backend &backend) {
    validate(config);
    auto states = make_states(population, config, profiles, backend);
    const auto prompt = writing_prompt();
    parallel_for(states.size(), config.concurrency, [&](std::size_t i) {
        auto &s = states[i];
        take_bfi(s, persona_context(s), BfiPhase::BeforeWriting, config, "bfi_before");
        const auto story = write_story(s, prompt, StoryPhase::Individual, std::nullopt, config);
        if (story.accepted) {
            take_bfi(s, after_writing_context(s, prompt, story), BfiPhase::AfterNonInteractiveWriting, config,
                     "bfi_after");
        }
    });
    return assemble(ExperimentKind::NonInteractive, states, population, config, profiles);
}

RunArtifact run_interactive(const std::vector<AgentSpec> &population, const ExperimentConfig &config,
                            const std::vector<PersonaProfile> &profiles, Backend &backend) {
    validate(config);
    auto states = make_states(population, config, profiles, backend);
    const auto prompt = writing_prompt();

    // phase 1: baseline questionnaire and an individual story from everyone
    std::vector<StoryRecord> first_story(states.size());
    parallel_for(states.size(), config.concurrency, [&](std::size_t i) {
        auto &s = states[i];
        take_bfi(s, persona_context(s), BfiPhase::BeforeWriting, config, "bfi_before");
        first_story[i] = write_story(s, prompt, StoryPhase::Individual, std::nullopt, config);
    });

    // cross-group pairing without replacement
    std::vector<std::size_t> analytical, creative;
    for (std::size_t i = 0; i < states.size(); ++i) {
        (states[i].spec->group == Group::Creative ? creative : analytical).push_back(i);
    }
    const auto by_id = [&](std::size_t l, std::size_t r) { return states[l].spec->agent_id < states[r].spec->agent_id; };
    std::ranges::sort(analytical, by_id);
    std::ranges::sort(creative, by_id);
    std::mt19937_64 rng(sha256_u64("pairing:" + std::to_string(config.rng_seed)));
    seeded_shuffle(creative, rng);
    const auto n_pairs = std::min(analytical.size(), creative.size());
    std::vector<std::size_t> partner(states.size(), states.size());
    std::vector<PairRecord> pairs;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        partner[analytical[p]] = creative[p];
        partner[creative[p]] = analytical[p];
        pairs.push_back({states[analytical[p]].spec->agent_id, states[creative[p]].spec->agent_id});
    }

    // phase 2: every paired agent writes once more, conditioned on its partner's story
    parallel_for(states.size(), config.concurrency, [&](std::size_t i) {
        if (partner[i] == states.size()) {
            return;
        }
        auto &s = states[i];
        const auto &source = first_story[partner[i]];
        if (!source.accepted) {
            s.failures.push_back({s.spec->agent_id, "interactive_skipped",
                                  "partner " + source.agent_id + " produced no accepted story", {}});
            return;
        }
        const auto second_prompt = interactive_prompt(source.text);
        const auto story = write_story(s, second_prompt, StoryPhase::InteractiveSecond, source.agent_id, config);
        if (story.accepted) {
            take_bfi(s, after_writing_context(s, second_prompt, story), BfiPhase::AfterInteractiveWriting, config,
                     "bfi_after");
        }
    });

    auto artifact = assemble(ExperimentKind::Interactive, states, population, config, profiles);
    artifact.pairs = std::move(pairs);
    std::ranges::sort(artifact.pairs, {}, &PairRecord::analytical_id);
    return artifact;
}

void check_data_quality(const RunArtifact &artifact) {
    for (Group g : {Group::Creative, Group::Analytical}) {
        std::size_t members = 0;
        std::size_t failed = 0;
        for (const auto &agent : artifact.agents) {
            if (agent.group != g) continue;
            ++members;
            const bool bad = std::ranges::any_of(artifact.failures, [&](const FailureRecord &f) {
                return f.agent_id == agent.agent_id && f.stage.starts_with("bfi");
            });
            failed += bad ? 1 : 0;
        }
        if (members > 0 &&
            static_cast<double>(failed) > artifact.config.max_group_failure_fraction * static_cast<double>(members)) {
            throw Error(Errc::DataQuality, std::to_string(failed) + " of " + std::to_string(members) + " " +
                                               std::string(group_name(g)) + " agents gave unusable questionnaires");
        }
    }
}

std::shared_ptr<Backend> make_backend(const ExperimentConfig &config, const std::vector<PersonaProfile> &profiles,
                                      BackendMode mode, const std::filesystem::path &store, BackendMode record_source) {
    const auto mock = [&] {
        auto mock_config = config.mock;
        mock_config.seed = config.rng_seed;
        return std::make_shared<ScriptedMockBackend>(make_synthetic_responder(profiles, mock_config));
    };
    switch (mode) {
    case BackendMode::ScriptedMock: return mock();
    case BackendMode::Live: return std::make_shared<LiveBackend>(config.live);
    case BackendMode::Record: {
        if (store.empty()) throw Error(Errc::Config, "record mode needs a store path");
        std::shared_ptr<Backend> inner;
        if (record_source == BackendMode::ScriptedMock) {
            inner = mock();
        } else {
            inner = std::make_shared<LiveBackend>(config.live);
        }
        return record_session(std::move(inner), store);
    }
    case BackendMode::Replay:
        if (store.empty()) throw Error(Errc::Config, "replay mode needs a store path");
        return replay_session(store);
    }
    throw Error(Errc::Config, "unknown backend mode");
}

} // namespace persona_lab
