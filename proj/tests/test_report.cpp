#include "persona_lab/error.hpp"
#include "persona_lab/report.hpp"
#include "persona_lab/svg.hpp"
#include "persona_lab/util.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace persona_lab;

namespace {

Errc code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::Config;
}

using Table = std::vector<std::vector<std::string>>;

/// Header row first; every row must have the header's width.
Table parse_csv(const std::string &text) {
    Table out;
    for (const auto line : split_lines(text)) {
        if (line.empty()) continue;
        out.push_back(csv_split(line));
        CHECK(out.back().size() == out.front().size());
    }
    return out;
}

double num(const std::string &s) { return s == "nan" ? std::nan("") : std::stod(s); }

const LiwcDictionary &dict() {
    static const auto d = load_dic(support::data_file("mini_liwc.dic"));
    return d;
}

const RunArtifact &exp1_run() {
    static const auto run = support::mock_run(ExperimentKind::NonInteractive, support::small_config(15, 21));
    return run;
}

const RunArtifact &exp2_run() {
    static const auto run = support::mock_run(ExperimentKind::Interactive, support::small_config(15, 21));
    return run;
}

std::string join(const std::vector<std::string> &row) {
    std::string out;
    for (const auto &f : row) out += (out.empty() ? "" : ",") + f;
    return out;
}

} // namespace

TEST_SUITE("report") {

TEST_CASE("every output is written with the expected header") {
    support::TempDir dir("report");
    const auto rep = analyze_run(exp1_run(), dict(), dir.path());
    const std::map<std::string, std::string> headers = {
        {"stats/bfi_anova.csv", "Trait,F-statistic,p-value"},
        {"stats/bfi_before_after.csv", "Group,Trait,Mean-B,Mean-A,F-Statistic,p-Value,Cohen's d"},
        {"stats/pb_top5.csv", "Rank,LIWC category,r_pb"},
        {"stats/spearman_top5_per_trait.csv", "Trait,Rank,Term,Corr."},
        {"stats/spearman_violin_data.csv", "Trait,Term,Corr."},
        {"stats/pca_coords.csv", "agent_id,group,pc1,pc2"},
    };
    for (const auto &[name, header] : headers) {
        REQUIRE(std::filesystem::exists(dir / name));
        const auto table = parse_csv(read_file(dir / name));
        CHECK(join(table.front()) == header);
    }
    for (const auto *name : {"liwc_rates.csv", "stats/cv_accuracy.txt", "stats/pca_scatter.svg", "stats/bfi_boxplots.svg"})
        CHECK(std::filesystem::exists(dir / name));
    CHECK(rep.stories_used == 30);
    CHECK(rep.story_phase == "Individual");
    CHECK(rep.files.size() == 10);
}

TEST_CASE("questionnaire tables") {
    const auto rep = build_report(exp1_run(), dict());
    const auto anova = parse_csv(rep.files.at("stats/bfi_anova.csv"));
    REQUIRE(anova.size() == 6);
    for (std::size_t i = 1; i < anova.size(); ++i) {
        const auto trait = *parse_trait(anova[i][0]);
        const auto a = trait_scores(exp1_run(), Group::Analytical, trait, BfiPhase::BeforeWriting);
        const auto c = trait_scores(exp1_run(), Group::Creative, trait, BfiPhase::BeforeWriting);
        const double t = oracle::t_statistic(a, c);
        CHECK(num(anova[i][1]) == doctest::Approx(t * t).epsilon(1e-9));
        CHECK(num(anova[i][2]) >= 0.0);
        CHECK(num(anova[i][2]) <= 1.0);
    }
    const auto ba = parse_csv(rep.files.at("stats/bfi_before_after.csv"));
    REQUIRE(ba.size() == 11);
    CHECK(ba[1][0] == "creative");
    CHECK(ba[6][0] == "analytical");
    for (std::size_t i = 1; i < ba.size(); ++i) {
        const auto g = *parse_group(ba[i][0]);
        const auto before = trait_scores(exp1_run(), g, *parse_trait(ba[i][1]), BfiPhase::BeforeWriting);
        const double mean = std::accumulate(before.begin(), before.end(), 0.0) / static_cast<double>(before.size());
        CHECK(num(ba[i][2]) == doctest::Approx(mean));
    }
}

TEST_CASE("point-biserial top five is ranked by magnitude") {
    const auto rep = build_report(exp1_run(), dict());
    const auto pb = parse_csv(rep.files.at("stats/pb_top5.csv"));
    REQUIRE(pb.size() == 6);
    for (std::size_t i = 1; i < pb.size(); ++i) {
        CHECK(pb[i][0] == std::to_string(i));
        CHECK(std::fabs(num(pb[i][2])) <= 1.0);
        if (i > 1) CHECK(std::fabs(num(pb[i][2])) <= std::fabs(num(pb[i - 1][2])));
    }
}

TEST_CASE("spearman tables agree with each other") {
    const auto rep = build_report(exp1_run(), dict());
    const auto top = parse_csv(rep.files.at("stats/spearman_top5_per_trait.csv"));
    const auto violin = parse_csv(rep.files.at("stats/spearman_violin_data.csv"));
    CHECK(top.size() == violin.size());
    CHECK(top.size() <= 26);
    for (std::size_t i = 1; i < top.size(); ++i) {
        CHECK(top[i][0] == violin[i][0]);
        CHECK(top[i][2] == violin[i][1]);
        CHECK(top[i][3] == violin[i][2]);
        const int rank = std::stoi(top[i][1]);
        CHECK(rank >= 1);
        CHECK(rank <= 5);
    }
}

TEST_CASE("projection and classifier outputs") {
    const auto rep = build_report(exp1_run(), dict());
    const auto coords = parse_csv(rep.files.at("stats/pca_coords.csv"));
    REQUIRE(coords.size() == 31);
    double sum1 = 0, sum2 = 0;
    for (std::size_t i = 1; i < coords.size(); ++i) {
        sum1 += num(coords[i][2]);
        sum2 += num(coords[i][3]);
    }
    CHECK(std::fabs(sum1) <= 1e-9);
    CHECK(std::fabs(sum2) <= 1e-9);
    REQUIRE(rep.explained_variance_ratio.size() == 2);
    CHECK(rep.explained_variance_ratio[0] >= rep.explained_variance_ratio[1]);

    const auto txt = rep.files.at("stats/cv_accuracy.txt");
    const double acc = std::stod(txt.substr(0, txt.find('\n')));
    CHECK(acc == rep.cv_accuracy);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK(rep.cv_folds == 10);
    CHECK(txt.find("folds=10") != std::string::npos);
    CHECK(txt.find("seed=21") != std::string::npos);

    const auto &scatter = rep.files.at("stats/pca_scatter.svg");
    CHECK(scatter.starts_with("<svg"));
    std::size_t circles = 0;
    for (auto pos = scatter.find("<circle"); pos != std::string::npos; pos = scatter.find("<circle", pos + 1)) ++circles;
    CHECK(circles == 30);
}

TEST_CASE("interactive runs profile the second stories") {
    const auto rep = build_report(exp2_run(), dict());
    CHECK(rep.story_phase == "InteractiveSecond");
    CHECK(rep.stories_used == 30);
    const auto ba = parse_csv(rep.files.at("stats/bfi_before_after.csv"));
    CHECK(ba.size() == 11);
}

TEST_CASE("analysis is byte-identical across reruns") {
    support::TempDir a("rep_a"), b("rep_b");
    analyze_run(exp2_run(), dict(), a.path());
    analyze_run(support::mock_run(ExperimentKind::Interactive, support::small_config(15, 21)), dict(), b.path());
    CHECK(support::snapshot(a.path()) == support::snapshot(b.path()));
}

TEST_CASE("missing phases are reported") {
    auto run = exp1_run();
    std::erase_if(run.bfi, [](const BfiRecord &r) { return r.scores.phase == BfiPhase::AfterNonInteractiveWriting; });
    CHECK(code_of([&] { build_report(run, dict()); }) == Errc::MissingPhase);
    auto no_before = exp1_run();
    std::erase_if(no_before.bfi, [](const BfiRecord &r) { return r.scores.phase == BfiPhase::BeforeWriting; });
    CHECK(code_of([&] { build_report(no_before, dict()); }) == Errc::MissingPhase);
}

TEST_CASE("comparing a run with itself gives zero effects") {
    const auto csv = compare_runs(exp1_run(), exp1_run(), BfiPhase::AfterNonInteractiveWriting,
                                  BfiPhase::AfterNonInteractiveWriting);
    const auto table = parse_csv(csv);
    REQUIRE(table.size() == 11);
    CHECK(join(table.front()) == "Group,Trait,Mean-B_C,Mean-A_C,Mean-A_E,F-Statistic,p-Value,Cohen's d");
    CHECK(table[1][0] == "creative");
    for (std::size_t i = 1; i < table.size(); ++i) {
        CHECK(table[i][3] == table[i][4]);
        const double f = num(table[i][5]), d = num(table[i][7]);
        // identical samples: zero effect, or undefined when both are constant
        CHECK((f == 0.0 || std::isnan(f)));
        CHECK((d == 0.0 || std::isnan(d)));
    }
}

TEST_CASE("control against experimental run") {
    const auto table = parse_csv(compare_runs(exp1_run(), exp2_run()));
    REQUIRE(table.size() == 11);
    for (std::size_t i = 1; i < table.size(); ++i) {
        const auto g = *parse_group(table[i][0]);
        const auto t = *parse_trait(table[i][1]);
        const auto after = trait_scores(exp2_run(), g, t, BfiPhase::AfterInteractiveWriting);
        const double mean = std::accumulate(after.begin(), after.end(), 0.0) / static_cast<double>(after.size());
        CHECK(num(table[i][4]) == doctest::Approx(mean));
    }
}

TEST_CASE("mismatched comparisons are refused") {
    CHECK(code_of([] { compare_runs(exp1_run(), exp1_run()); }) == Errc::PhaseMismatch);
    auto other = exp2_run();
    other.profiles.front().system_prompt += " Different.";
    CHECK(code_of([&] { compare_runs(exp1_run(), other); }) == Errc::PhaseMismatch);
}

TEST_CASE("box statistics") {
    const auto s = svg::box_stats({1, 2, 3, 4, 100});
    CHECK(s.median == 3);
    CHECK(s.q1 == 2);
    CHECK(s.q3 == 4);
    CHECK(s.whisker_high == 4);
    CHECK(s.whisker_low == 1);
    CHECK(s.outliers == std::vector<double>{100});
}

} // TEST_SUITE
