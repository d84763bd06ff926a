#pragma once

#include "persona_lab/bfi.hpp"
#include "persona_lab/llm_backend.hpp"
#include "persona_lab/mock_backend.hpp"
#include "persona_lab/persona.hpp"
#include "persona_lab/records.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace persona_lab {

enum class BackendMode { Live, Record, Replay, ScriptedMock };

std::string_view backend_mode_name(BackendMode mode) noexcept;
std::optional<BackendMode> parse_backend_mode(std::string_view name) noexcept;

struct ExperimentConfig {
    int population_per_group = 100;
    double temperature = 0.7;
    std::string model_id = "gpt-3.5-turbo-0613";
    std::optional<int> max_tokens;
    int word_min = 500;
    int word_max = 900;
    int bfi_retries = 3;   // total questionnaire attempts per administration
    int story_retries = 3; // total story attempts per writing task
    std::string pairing = "CrossGroupBothOrders";
    std::uint64_t rng_seed = 42;
    BackendMode backend_mode = BackendMode::ScriptedMock;
    int concurrency = 1;
    double max_group_failure_fraction = 0.5;
    std::string profiles_file; // empty: the two builtin profiles
    LiveConfig live;
    SyntheticMockConfig mock;

    bool operator==(const ExperimentConfig &) const = default;
};

/// Throws Error(Config) on any out-of-range field.
void validate(const ExperimentConfig &config);

/// `include_runtime = false` drops fields that only say how a run was
/// executed (backend_mode, concurrency), so record and replay runs snapshot identically.
nlohmann::json config_to_json(const ExperimentConfig &config, bool include_runtime = true);
ExperimentConfig config_from_json(const nlohmann::json &j);
/// Accepts JSON with // comments.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path &path);
/// Every field at its default, with a comment per field.
std::string default_config_text();

/// The builtin profiles, or the catalogue named by profiles_file (relative to `base_dir`).
/// Exactly one creative-group and one analytical-group profile are required.
std::vector<PersonaProfile> resolve_profiles(const ExperimentConfig &config, const std::filesystem::path &base_dir = {});

std::string writing_prompt();
std::string interactive_prompt(std::string_view partner_story);

inline constexpr std::string_view kContextPolicy =
    "fresh context per task (persona system prompt + task prompt); post-writing BFI also carries the agent's own "
    "writing exchange";

struct BfiRecord {
    std::string agent_id;
    Group group = Group::Analytical;
    TraitScores scores;

    bool operator==(const BfiRecord &) const = default;
};

struct FailureRecord {
    std::string agent_id;
    std::string stage; // bfi_before, bfi_after, story_rejected, interactive_skipped
    std::string message;
    std::vector<std::string> raw_texts;

    bool operator==(const FailureRecord &) const = default;
};

struct PairRecord {
    std::string analytical_id;
    std::string creative_id;

    bool operator==(const PairRecord &) const = default;
};

enum class ExperimentKind { NonInteractive, Interactive };

std::string_view experiment_name(ExperimentKind kind) noexcept; // "exp1" / "exp2"
std::optional<ExperimentKind> parse_experiment(std::string_view name) noexcept;

inline constexpr int kSchemaVersion = 1;

struct RunArtifact {
    int schema_version = kSchemaVersion;
    std::string run_id;
    ExperimentKind experiment = ExperimentKind::NonInteractive;
    std::string tool_version;
    std::string context_policy;
    ExperimentConfig config;
    std::vector<PersonaProfile> profiles;
    std::vector<AgentSpec> agents;   // sorted by agent_id
    std::vector<BfiRecord> bfi;      // sorted by (agent_id, phase)
    std::vector<StoryRecord> stories; // sorted by (agent_id, phase)
    std::vector<PairRecord> pairs;
    std::vector<FailureRecord> failures;

    /// Configs compare by their persisted snapshot, so backend_mode is ignored.
    bool operator==(const RunArtifact &other) const;

    [[nodiscard]] const AgentSpec *find_agent(std::string_view agent_id) const noexcept;
    [[nodiscard]] bool has_phase(BfiPhase phase) const noexcept;
};

/// population_per_group agents per profile; ids are "<profile>-<index>-<tag>"
/// where the tag is derived from rng_seed.
std::vector<AgentSpec> bootstrap_population(const ExperimentConfig &config,
                                            const std::vector<PersonaProfile> &profiles);

/// Per agent: BFI, one individual story (resampled until it passes the word
/// filter), BFI again with the writing exchange in context.
RunArtifact run_noninteractive(const std::vector<AgentSpec> &population, const ExperimentConfig &config,
                               const std::vector<PersonaProfile> &profiles, Backend &backend);

/// Every agent takes the BFI and writes an individual story; agents are then
/// paired across groups and each writes a second story conditioned on its
/// partner's first story, followed by the post-interaction BFI.
RunArtifact run_interactive(const std::vector<AgentSpec> &population, const ExperimentConfig &config,
                            const std::vector<PersonaProfile> &profiles, Backend &backend);

/// Throws Error(DataQuality) when more than max_group_failure_fraction of a
/// group's agents failed a questionnaire.
void check_data_quality(const RunArtifact &artifact);

/// Writes config.json, run.json (manifest with file hashes), agents.csv,
/// bfi_scores.csv, stories.jsonl and, when given, a copy of the replay store.
void save_run(const RunArtifact &artifact, const std::filesystem::path &dir,
              const std::optional<std::filesystem::path> &replay_store = std::nullopt);
/// Throws SchemaMismatch or CorruptRun.
RunArtifact load_run(const std::filesystem::path &dir);

/// Builds the backend for a run. Record mode wraps `record_source` (live or
/// mock) and writes to `store`; replay mode reads `store`.
std::shared_ptr<Backend> make_backend(const ExperimentConfig &config, const std::vector<PersonaProfile> &profiles,
                                      BackendMode mode, const std::filesystem::path &store = {},
                                      BackendMode record_source = BackendMode::Live);

} // namespace persona_lab
