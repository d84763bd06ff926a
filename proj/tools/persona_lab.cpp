// persona-lab: run persona experiments against an LLM backend and analyse them.
//
// Exit codes: 0 ok, 1 internal error, 2 config/usage/run-file error,
// 3 backend error, 4 data-quality error, 5 replay verification mismatch.

#include "persona_lab/error.hpp"
#include "persona_lab/experiment.hpp"
#include "persona_lab/liwc.hpp"
#include "persona_lab/report.hpp"
#include "persona_lab/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace persona_lab;
using nlohmann::json;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitDataQuality = 4;
constexpr int kExitMismatch = 5;

int exit_code_for(Errc code) {
    switch (code) {
    case Errc::BackendUnavailable:
    case Errc::ScriptMiss:
    case Errc::StoreCorrupt:
        return kExitBackend;
    case Errc::DataQuality:
    case Errc::PersistentlyMalformed:
    case Errc::EmptyDocument:
    case Errc::DegenerateData:
    case Errc::InsufficientSamples:
    case Errc::SingleClass:
    case Errc::TooFewSamples:
    case Errc::ConstantSequence:
    case Errc::NonFinite:
        return kExitDataQuality;
    default:
        return kExitConfig;
    }
}

void print(const json &summary) { std::cout << summary.dump(2) << "\n"; }

struct RunOptions {
    std::string experiment;
    std::string config_path;
    std::string run_dir;
    std::string backend;
    std::string store;
    std::string record_source = "live";
    std::optional<std::uint64_t> seed;
    bool force = false;
};

BackendMode backend_flag(const std::string &name) {
    const auto mode = parse_backend_mode(name);
    if (!mode) throw Error(Errc::Config, "--backend must be live, record, replay or mock");
    return *mode;
}

bool has_run_files(const fs::path &dir) {
    return fs::exists(dir / "run.json") || fs::exists(dir / "replay_store.jsonl") || fs::exists(dir / "stories.jsonl");
}

RunArtifact execute(ExperimentKind kind, const ExperimentConfig &config, const std::vector<PersonaProfile> &profiles,
                    Backend &backend) {
    const auto population = bootstrap_population(config, profiles);
    return kind == ExperimentKind::NonInteractive ? run_noninteractive(population, config, profiles, backend)
                                                  : run_interactive(population, config, profiles, backend);
}

int cmd_init(const std::string &dir, bool force) {
    const auto path = fs::path(dir) / "experiment.json";
    if (fs::exists(path) && !force) {
        throw Error(Errc::AlreadyExists, path.string() + " exists (use --force to overwrite)");
    }
    write_file(path, default_config_text());
    print({{"config", path.string()}});
    return 0;
}

int cmd_run(const RunOptions &o) {
    const auto kind = parse_experiment(o.experiment);
    if (!kind) throw Error(Errc::Config, "experiment must be exp1 or exp2");
    auto config = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    if (o.seed) config.rng_seed = *o.seed;
    if (!o.backend.empty()) config.backend_mode = backend_flag(o.backend);
    validate(config);
    const auto base_dir = o.config_path.empty() ? fs::path() : fs::path(o.config_path).parent_path();
    const auto profiles = resolve_profiles(config, base_dir);

    const fs::path run_dir(o.run_dir);
    if (has_run_files(run_dir) && !o.force) {
        throw Error(Errc::AlreadyExists, run_dir.string() + " already holds a run (use --force to overwrite)");
    }

    fs::path store = o.store;
    std::optional<fs::path> store_copy;
    const auto record_source = backend_flag(o.record_source);
    switch (config.backend_mode) {
    case BackendMode::Record:
        if (store.empty()) store = run_dir / "replay_store.jsonl";
        if (fs::exists(store)) {
            if (!o.force) throw Error(Errc::AlreadyExists, store.string() + " exists (use --force to overwrite)");
            fs::remove(store);
        }
        store_copy = store;
        break;
    case BackendMode::Replay:
        if (store.empty()) throw Error(Errc::Config, "--backend replay needs --store");
        store_copy = store;
        break;
    default:
        break;
    }

    const auto backend = make_backend(config, profiles, config.backend_mode, store, record_source);
    auto artifact = execute(*kind, config, profiles, *backend);
    save_run(artifact, run_dir, store_copy);

    const auto accepted = std::ranges::count_if(artifact.stories, [](const StoryRecord &s) { return s.accepted; });
    print({{"run_id", artifact.run_id},
           {"run_dir", run_dir.string()},
           {"experiment", experiment_name(artifact.experiment)},
           {"backend", backend_mode_name(config.backend_mode)},
           {"agents", artifact.agents.size()},
           {"bfi_records", artifact.bfi.size()},
           {"stories", artifact.stories.size()},
           {"accepted_stories", accepted},
           {"pairs", artifact.pairs.size()},
           {"failures", artifact.failures.size()}});
    check_data_quality(artifact);
    return 0;
}

int cmd_analyze(const std::string &run_dir, const std::string &dic) {
    const auto run = load_run(run_dir);
    const auto dict = load_dic(dic);
    if (dict.skipped_annotations() > 0) {
        std::cerr << "note: skipped " << dict.skipped_annotations() << " conditional dictionary annotations\n";
    }
    const auto rep = analyze_run(run, dict, run_dir);
    json files = json::array();
    for (const auto &[name, _] : rep.files) files.push_back(name);
    print({{"run_id", rep.run_id},
           {"stories", rep.story_phase},
           {"stories_used", rep.stories_used},
           {"stories_rejected", rep.stories_rejected},
           {"cv_accuracy", rep.cv_accuracy},
           {"cv_folds", rep.cv_folds},
           {"explained_variance_ratio", rep.explained_variance_ratio},
           {"files", files}});
    return 0;
}

BfiPhase phase_flag(const std::string &name) {
    const auto p = parse_phase(name);
    if (!p) throw Error(Errc::Config, "unknown phase '" + name + "'");
    return *p;
}

int cmd_compare(const std::string &run_a, const std::string &run_b, const std::string &phase_a,
                const std::string &phase_b, std::string out) {
    const auto a = load_run(run_a);
    const auto b = load_run(run_b);
    const auto table = compare_runs(a, b, phase_flag(phase_a), phase_flag(phase_b));
    if (out.empty()) out = (fs::path(run_b) / "stats" / "compare.csv").string();
    write_file(out, table);
    print({{"control", a.run_id}, {"experimental", b.run_id}, {"table", out}});
    return 0;
}

int cmd_replay_verify(const std::string &run_dir, std::string store) {
    const auto recorded = load_run(run_dir);
    if (store.empty()) store = (fs::path(run_dir) / "replay_store.jsonl").string();
    auto config = recorded.config;
    config.backend_mode = BackendMode::Replay;
    const auto backend = make_backend(config, recorded.profiles, BackendMode::Replay, store);
    const auto replayed = execute(recorded.experiment, config, recorded.profiles, *backend);
    const bool identical = replayed == recorded;
    print({{"run_id", recorded.run_id}, {"store", store}, {"identical", identical}});
    if (!identical) {
        std::cerr << "replayed run differs from " << run_dir << "\n";
        return kExitMismatch;
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Persona-conditioned LLM agent experiments: BFI questionnaires, story writing, LIWC analysis"};
    app.set_version_flag("--version", std::string(PERSONA_LAB_VERSION));
    app.require_subcommand(1);

    std::string init_dir;
    bool force = false;
    auto *init = app.add_subcommand("init", "Write a commented default experiment.json into DIR");
    init->add_option("dir", init_dir, "Target directory")->required();
    init->add_flag("--force", force, "Overwrite an existing config");

    RunOptions run_opts;
    std::uint64_t seed = 0;
    auto *run = app.add_subcommand("run", "Run exp1 (non-interactive) or exp2 (interactive)");
    run->add_option("experiment", run_opts.experiment, "exp1 or exp2")->required()->check(CLI::IsMember({"exp1", "exp2"}));
    run->add_option("--config", run_opts.config_path, "Experiment config (defaults when omitted)")->check(CLI::ExistingFile);
    run->add_option("--run-dir", run_opts.run_dir, "Output run directory")->required();
    run->add_option("--backend", run_opts.backend, "live, record, replay or mock (overrides the config)")
        ->check(CLI::IsMember({"live", "record", "replay", "mock"}));
    auto *seed_opt = run->add_option("--seed", seed, "Override rng_seed");
    run->add_option("--store", run_opts.store, "Replay store (record: written, replay: read)");
    run->add_option("--record-source", run_opts.record_source, "Backend wrapped by --backend record")
        ->check(CLI::IsMember({"live", "mock"}));
    run->add_flag("--force", run_opts.force, "Overwrite an existing run");

    std::string analyze_dir, dic;
    auto *analyze = app.add_subcommand("analyze", "Compute LIWC statistics, tables and figures for a run");
    analyze->add_option("--run-dir", analyze_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    analyze->add_option("--dic", dic, "LIWC .dic dictionary")->required()->check(CLI::ExistingFile);

    std::string run_a, run_b, phase_a = "AfterNonInteractiveWriting", phase_b = "AfterInteractiveWriting", out;
    auto *compare = app.add_subcommand("compare", "Compare post-writing BFI scores of a control and an experimental run");
    compare->add_option("control", run_a, "Control run directory")->required()->check(CLI::ExistingDirectory);
    compare->add_option("experimental", run_b, "Experimental run directory")->required()->check(CLI::ExistingDirectory);
    compare->add_option("--phase-a", phase_a, "Control phase")->capture_default_str();
    compare->add_option("--phase-b", phase_b, "Experimental phase")->capture_default_str();
    compare->add_option("--out", out, "Output CSV (default: <experimental>/stats/compare.csv)");

    std::string verify_dir, verify_store;
    auto *verify = app.add_subcommand("replay-verify", "Re-run a recorded run from its replay store and compare");
    verify->add_option("--run-dir", verify_dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    verify->add_option("--store", verify_store, "Replay store (default: <run-dir>/replay_store.jsonl)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*init) return cmd_init(init_dir, force);
        if (*run) {
            if (*seed_opt) run_opts.seed = seed;
            return cmd_run(run_opts);
        }
        if (*analyze) return cmd_analyze(analyze_dir, dic);
        if (*compare) return cmd_compare(run_a, run_b, phase_a, phase_b, out);
        if (*verify) return cmd_replay_verify(verify_dir, verify_store);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
