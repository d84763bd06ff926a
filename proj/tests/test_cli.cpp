#include "persona_lab/util.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

struct Result {
    int code = -1;
    std::string out;
};

/// Runs the CLI with `args`; stdout and stderr land in one captured log.
Result cli(const support::TempDir &dir, const std::string &args, const std::string &env = "") {
    const auto log = dir / "cli.log";
    const std::string cmd = env + " \"" + std::string(PL_CLI_PATH) + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = persona_lab::read_file(log);
    return r;
}

std::string q(const fs::path &p) { return "\"" + p.string() + "\""; }

/// A small config file for fast runs.
fs::path small_config_file(const support::TempDir &dir) {
    const auto path = dir / "small.json";
    persona_lab::write_file(path, "{\n  // a short run\n  \"population_per_group\": 8,\n  \"rng_seed\": 3\n}\n");
    return path;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("init writes a commented config once") {
    support::TempDir dir("cli_init");
    const auto r = cli(dir, "init " + q(dir / "exp"));
    CHECK(r.code == 0);
    const auto text = persona_lab::read_file(dir / "exp" / "experiment.json");
    CHECK(text.find("//") != std::string::npos);
    CHECK(text.find("population_per_group") != std::string::npos);
    const auto again = cli(dir, "init " + q(dir / "exp"));
    CHECK(again.code == 2);
    CHECK(again.out.find("AlreadyExists") != std::string::npos);
    CHECK(cli(dir, "init " + q(dir / "exp") + " --force").code == 0);
}

TEST_CASE("run, analyze and compare with the mock backend") {
    support::TempDir dir("cli_run");
    const auto config = small_config_file(dir);
    const auto r1 = cli(dir, "run exp1 --backend mock --config " + q(config) + " --run-dir " + q(dir / "r1"));
    REQUIRE(r1.code == 0);
    CHECK(r1.out.find("exp1-seed3-") != std::string::npos);
    CHECK(fs::exists(dir / "r1" / "run.json"));

    const auto r2 = cli(dir, "run exp2 --backend mock --config " + q(config) + " --run-dir " + q(dir / "r2"));
    REQUIRE(r2.code == 0);

    const auto dic = q(support::data_file("mini_liwc.dic"));
    CHECK(cli(dir, "analyze --run-dir " + q(dir / "r1") + " --dic " + dic).code == 0);
    CHECK(fs::exists(dir / "r1" / "stats" / "pb_top5.csv"));
    CHECK(fs::exists(dir / "r1" / "stats" / "cv_accuracy.txt"));
    CHECK(cli(dir, "analyze --run-dir " + q(dir / "r2") + " --dic " + dic).code == 0);

    CHECK(cli(dir, "compare " + q(dir / "r1") + " " + q(dir / "r2")).code == 0);
    const auto csv = persona_lab::read_file(dir / "r2" / "stats" / "compare.csv");
    CHECK(csv.starts_with("Group,Trait,Mean-B_C,Mean-A_C,Mean-A_E,F-Statistic,p-Value,Cohen's d\n"));

    // a second run into the same directory is refused
    const auto again = cli(dir, "run exp1 --backend mock --config " + q(config) + " --run-dir " + q(dir / "r1"));
    CHECK(again.code == 2);

    // the wrong phase pairing is a usage error
    CHECK(cli(dir, "compare " + q(dir / "r2") + " " + q(dir / "r1")).code == 2);

    // missing dictionary
    CHECK(cli(dir, "analyze --run-dir " + q(dir / "r1") + " --dic " + q(dir / "none.dic")).code == 2);
}

TEST_CASE("the seed flag overrides the config") {
    support::TempDir dir("cli_seed");
    const auto config = small_config_file(dir);
    const auto r = cli(dir, "run exp1 --backend mock --seed 11 --config " + q(config) + " --run-dir " + q(dir / "r"));
    REQUIRE(r.code == 0);
    CHECK(r.out.find("exp1-seed11-") != std::string::npos);
}

TEST_CASE("live backend without a key exits with the backend code") {
    support::TempDir dir("cli_live");
    const auto config = small_config_file(dir);
    const auto r = cli(dir, "run exp1 --backend live --config " + q(config) + " --run-dir " + q(dir / "r"),
                       "env -u PERSONA_LAB_API_KEY");
    CHECK(r.code == 3);
    CHECK(r.out.find("PERSONA_LAB_API_KEY") != std::string::npos);
}

TEST_CASE("record, replay and verify") {
    support::TempDir dir("cli_rr");
    const auto config = small_config_file(dir);
    const auto rec = cli(dir, "run exp2 --backend record --record-source mock --config " + q(config) + " --run-dir " +
                                  q(dir / "rec"));
    REQUIRE(rec.code == 0);
    const auto store = dir / "rec" / "replay_store.jsonl";
    REQUIRE(fs::exists(store));

    const auto rep = cli(dir, "run exp2 --backend replay --store " + q(store) + " --config " + q(config) +
                                  " --run-dir " + q(dir / "rep"));
    REQUIRE(rep.code == 0);
    CHECK(support::snapshot(dir / "rec") == support::snapshot(dir / "rep"));

    const auto verify = cli(dir, "replay-verify --run-dir " + q(dir / "rec"));
    CHECK(verify.code == 0);
    CHECK(verify.out.find("true") != std::string::npos);

    // replay without a store is a usage error
    CHECK(cli(dir, "run exp2 --backend replay --config " + q(config) + " --run-dir " + q(dir / "x")).code == 2);
}

TEST_CASE("bad input exits with the usage code") {
    support::TempDir dir("cli_bad");
    persona_lab::write_file(dir / "bad.json", "{\"population_per_group\": -1}");
    CHECK(cli(dir, "run exp1 --backend mock --config " + q(dir / "bad.json") + " --run-dir " + q(dir / "r")).code == 2);
    CHECK(cli(dir, "frobnicate").code == 2);
    CHECK(cli(dir, "analyze --run-dir " + q(dir / "nowhere") + " --dic " + q(support::data_file("mini_liwc.dic")))
              .code == 2);
    const auto version = cli(dir, "--version");
    CHECK(version.code == 0);
    CHECK_FALSE(version.out.empty());
}

} // TEST_SUITE
