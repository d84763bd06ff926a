#pragma once

#include "persona_lab/experiment.hpp"
#include "persona_lab/liwc.hpp"
#include "persona_lab/ml.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace persona_lab {

struct AnalysisOptions {
    int cv_folds = 10; // clamped to the number of stories
    std::size_t top_k = 5;
    ml::LogisticConfig logistic;
};

struct AnalysisReport {
    std::string run_id;
    std::string story_phase;    // phase of the stories that were profiled
    std::size_t stories_used = 0;
    std::size_t stories_rejected = 0;
    double cv_accuracy = 0.0;
    int cv_folds = 0;
    std::vector<double> explained_variance_ratio;
    /// Relative path (under the run directory) -> file contents.
    std::map<std::string, std::string> files;
};

/// Stories analysed: accepted Individual stories for exp1, accepted
/// InteractiveSecond stories for exp2. Throws MissingPhase when the run lacks
/// the BFI phases an analysis needs.
AnalysisReport build_report(const RunArtifact &run, const LiwcDictionary &dict, const AnalysisOptions &options = {});

/// build_report, then writes liwc_rates.csv and stats/* below `run_dir`.
AnalysisReport analyze_run(const RunArtifact &run, const LiwcDictionary &dict, const std::filesystem::path &run_dir,
                           const AnalysisOptions &options = {});

/// Control run `a` against experimental run `b`: Mean-B_C (a, BeforeWriting),
/// Mean-A_C (a, phase_a), Mean-A_E (b, phase_b), then ANOVA and Cohen's d of
/// A_E against A_C. Throws PhaseMismatch when a phase is absent or the runs
/// use different profiles.
std::string compare_runs(const RunArtifact &a, const RunArtifact &b,
                         BfiPhase phase_a = BfiPhase::AfterNonInteractiveWriting,
                         BfiPhase phase_b = BfiPhase::AfterInteractiveWriting);

/// Scores of one group, trait and phase in agent order.
std::vector<double> trait_scores(const RunArtifact &run, Group group, Trait trait, BfiPhase phase);

} // namespace persona_lab
