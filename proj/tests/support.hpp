#pragma once

#include "persona_lab/experiment.hpp"
#include "persona_lab/util.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace support {

namespace fs = std::filesystem;

inline fs::path source_dir() { return PL_SOURCE_DIR; }
inline fs::path data_file(const std::string &name) { return source_dir() / "data" / name; }
inline std::string golden(const std::string &name) {
    return persona_lab::read_file(source_dir() / "tests" / "golden" / name);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string &tag = "t") {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = fs::temp_directory_path() / ("persona_lab_" + tag + "_" + std::to_string(rng()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    [[nodiscard]] const fs::path &path() const { return path_; }
    fs::path operator/(const std::string &name) const { return path_ / name; }

  private:
    fs::path path_;
};

inline persona_lab::ExperimentConfig small_config(int per_group = 6, std::uint64_t seed = 7) {
    persona_lab::ExperimentConfig c;
    c.population_per_group = per_group;
    c.rng_seed = seed;
    return c;
}

/// Runs an experiment end to end against the synthetic mock.
inline persona_lab::RunArtifact mock_run(persona_lab::ExperimentKind kind, const persona_lab::ExperimentConfig &config) {
    using namespace persona_lab;
    const auto profiles = resolve_profiles(config);
    auto backend = make_backend(config, profiles, BackendMode::ScriptedMock);
    const auto population = bootstrap_population(config, profiles);
    return kind == ExperimentKind::NonInteractive ? run_noninteractive(population, config, profiles, *backend)
                                                  : run_interactive(population, config, profiles, *backend);
}

/// Every file below `dir`, relative path -> bytes.
inline std::map<std::string, std::string> snapshot(const fs::path &dir) {
    std::map<std::string, std::string> out;
    for (const auto &e : fs::recursive_directory_iterator(dir)) {
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).generic_string()] = persona_lab::read_file(e.path());
    }
    return out;
}

} // namespace support
