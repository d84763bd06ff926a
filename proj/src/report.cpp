#include "persona_lab/report.hpp"

#include "persona_lab/error.hpp"
#include "persona_lab/stats.hpp"
#include "persona_lab/svg.hpp"
#include "persona_lab/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace persona_lab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Comparison {
    double f = kNaN;
    double p = kNaN;
    double d = kNaN;
};

bool tolerable(Errc code) {
    return code == Errc::DegenerateData || code == Errc::InsufficientSamples;
}

/// ANOVA and Cohen's d of b against a; undefined statistics become NaN.
Comparison compare_samples(const std::vector<double> &a, const std::vector<double> &b) {
    Comparison c;
    try {
        const auto r = stats::one_way_anova(a, b);
        c.f = r.statistic;
        c.p = r.p_value.value_or(kNaN);
    } catch (const Error &e) {
        if (!tolerable(e.code())) throw;
    }
    try {
        c.d = stats::cohens_d(a, b);
    } catch (const Error &e) {
        if (!tolerable(e.code())) throw;
    }
    return c;
}

double mean_or_nan(const std::vector<double> &xs) { return xs.empty() ? kNaN : stats::mean(xs); }

std::string fmt(double v) { return format_double(v); }

void require_phase(const RunArtifact &run, BfiPhase phase, Errc code) {
    if (!run.has_phase(phase)) {
        throw Error(code, "run " + run.run_id + " has no " + std::string(phase_name(phase)) + " questionnaires");
    }
}

constexpr std::array<Group, 2> kGroupOrder = {Group::Creative, Group::Analytical};

} // namespace

std::vector<double> trait_scores(const RunArtifact &run, Group group, Trait trait, BfiPhase phase) {
    std::vector<double> out;
    for (const auto &r : run.bfi) {
        if (r.group == group && r.scores.phase == phase) {
            out.push_back(r.scores[trait]);
        }
    }
    return out;
}

AnalysisReport build_report(const RunArtifact &run, const LiwcDictionary &dict, const AnalysisOptions &options) {
    const bool interactive = run.experiment == ExperimentKind::Interactive;
    const auto story_phase = interactive ? StoryPhase::InteractiveSecond : StoryPhase::Individual;
    const auto after_phase = interactive ? BfiPhase::AfterInteractiveWriting : BfiPhase::AfterNonInteractiveWriting;
    require_phase(run, BfiPhase::BeforeWriting, Errc::MissingPhase);
    require_phase(run, after_phase, Errc::MissingPhase);

    AnalysisReport rep;
    rep.run_id = run.run_id;
    rep.story_phase = std::string(story_phase_name(story_phase));

    std::vector<StoryRecord> stories;
    for (const auto &s : run.stories) {
        if (s.phase != story_phase) continue;
        if (s.accepted) {
            stories.push_back(s);
        } else {
            ++rep.stories_rejected;
        }
    }
    rep.stories_used = stories.size();
    if (stories.empty()) {
        throw Error(Errc::MissingPhase, "run " + run.run_id + " has no accepted " + rep.story_phase + " stories");
    }
    const auto group_of = [&](const std::string &id) {
        const auto *agent = run.find_agent(id);
        if (agent == nullptr) throw Error(Errc::CorruptRun, "story for unknown agent '" + id + "'");
        return agent->group;
    };
    const auto corpus = vectorize_corpus(stories, group_of, dict);

    // per-story LIWC rates
    {
        std::string csv = "agent_id,group,total_tokens";
        for (const auto &name : corpus.column_names) csv += "," + csv_escape(name);
        csv += "\n";
        for (std::size_t r = 0; r < corpus.agent_ids.size(); ++r) {
            csv += csv_escape(corpus.agent_ids[r]) + "," + std::string(group_name(corpus.labels[r])) + "," +
                   std::to_string(corpus.total_tokens[r]);
            for (double v : corpus.rates[r]) csv += "," + fmt(v);
            csv += "\n";
        }
        rep.files["liwc_rates.csv"] = std::move(csv);
    }

    // questionnaire: creative vs analytical before writing
    {
        std::string csv = "Trait,F-statistic,p-value\n";
        for (Trait t : kTraits) {
            const auto c = compare_samples(trait_scores(run, Group::Analytical, t, BfiPhase::BeforeWriting),
                                           trait_scores(run, Group::Creative, t, BfiPhase::BeforeWriting));
            csv += std::string(trait_name(t)) + "," + fmt(c.f) + "," + fmt(c.p) + "\n";
        }
        rep.files["stats/bfi_anova.csv"] = std::move(csv);
    }

    // questionnaire: before vs after writing, per group
    {
        std::string csv = "Group,Trait,Mean-B,Mean-A,F-Statistic,p-Value,Cohen's d\n";
        for (Group g : kGroupOrder) {
            for (Trait t : kTraits) {
                const auto before = trait_scores(run, g, t, BfiPhase::BeforeWriting);
                const auto after = trait_scores(run, g, t, after_phase);
                const auto c = compare_samples(before, after);
                csv += std::string(group_name(g)) + "," + std::string(trait_name(t)) + "," + fmt(mean_or_nan(before)) +
                       "," + fmt(mean_or_nan(after)) + "," + fmt(c.f) + "," + fmt(c.p) + "," + fmt(c.d) + "\n";
            }
        }
        rep.files["stats/bfi_before_after.csv"] = std::move(csv);
    }

    // LIWC categories most associated with group membership
    {
        std::vector<double> labels;
        for (Group g : corpus.labels) labels.push_back(g == Group::Creative ? 1.0 : 0.0);
        const auto ranked = stats::top_k_correlates(labels, corpus.rates, corpus.column_names, options.top_k,
                                                    stats::Correlation::PointBiserial);
        std::string csv = "Rank,LIWC category,r_pb\n";
        for (std::size_t i = 0; i < ranked.size(); ++i) {
            csv += std::to_string(i + 1) + "," + csv_escape(ranked[i].name) + "," + fmt(ranked[i].coefficient) + "\n";
        }
        rep.files["stats/pb_top5.csv"] = std::move(csv);
    }

    // LIWC categories against pre-writing trait scores
    {
        std::map<std::string, const BfiRecord *> before;
        for (const auto &r : run.bfi) {
            if (r.scores.phase == BfiPhase::BeforeWriting) before[r.agent_id] = &r;
        }
        std::vector<std::vector<double>> rows;
        std::vector<const BfiRecord *> scores;
        for (std::size_t r = 0; r < corpus.agent_ids.size(); ++r) {
            if (const auto it = before.find(corpus.agent_ids[r]); it != before.end()) {
                rows.push_back(corpus.rates[r]);
                scores.push_back(it->second);
            }
        }
        std::string table = "Trait,Rank,Term,Corr.\n";
        std::string violin = "Trait,Term,Corr.\n";
        for (Trait t : kTraits) {
            std::vector<double> target;
            for (const auto *s : scores) target.push_back(s->scores[t]);
            std::vector<stats::RankedCoefficient> ranked;
            if (target.size() >= 3) {
                ranked = stats::top_k_correlates(target, rows, corpus.column_names, options.top_k,
                                                 stats::Correlation::Spearman);
            }
            for (std::size_t i = 0; i < ranked.size(); ++i) {
                table += std::string(trait_name(t)) + "," + std::to_string(i + 1) + "," + csv_escape(ranked[i].name) +
                         "," + fmt(ranked[i].coefficient) + "\n";
                violin += std::string(trait_name(t)) + "," + csv_escape(ranked[i].name) + "," +
                          fmt(ranked[i].coefficient) + "\n";
            }
        }
        rep.files["stats/spearman_top5_per_trait.csv"] = std::move(table);
        rep.files["stats/spearman_violin_data.csv"] = std::move(violin);
    }

    std::vector<int> labels;
    for (Group g : corpus.labels) labels.push_back(static_cast<int>(g));
    const auto x = ml::FeatureMatrix::from_rows(corpus.rates, labels, corpus.column_names);

    // 2-D projection
    {
        const auto model = ml::pca_fit(x, 2, true);
        rep.explained_variance_ratio = model.explained_variance_ratio;
        const auto coords = ml::pca_transform(model, x);
        std::string csv = "agent_id,group,pc1,pc2\n";
        std::vector<svg::ScatterPoint> points;
        for (std::size_t r = 0; r < coords.size(); ++r) {
            csv += csv_escape(corpus.agent_ids[r]) + "," + std::string(group_name(corpus.labels[r])) + "," +
                   fmt(coords[r][0]) + "," + fmt(coords[r][1]) + "\n";
            points.push_back({coords[r][0], coords[r][1], corpus.labels[r]});
        }
        rep.files["stats/pca_coords.csv"] = std::move(csv);
        rep.files["stats/pca_scatter.svg"] =
            svg::pca_scatter(points, model.explained_variance_ratio, "LIWC rates, " + rep.story_phase + " stories");
    }

    // group separability
    {
        rep.cv_folds = std::min<int>(options.cv_folds, static_cast<int>(x.rows));
        rep.cv_accuracy = ml::kfold_cv_accuracy(x, rep.cv_folds, run.config.rng_seed, options.logistic);
        std::string txt = fmt(rep.cv_accuracy) + "\n";
        txt += "run_id=" + run.run_id + "\n";
        txt += "stories=" + rep.story_phase + "\n";
        txt += "samples=" + std::to_string(x.rows) + "\n";
        txt += "features=" + std::to_string(x.cols) + " LIWC category rates\n";
        txt += "folds=" + std::to_string(rep.cv_folds) + " stratified\n";
        txt += "seed=" + std::to_string(run.config.rng_seed) + "\n";
        txt += "standardize=column z-score (population sd)\n";
        txt += "l2_lambda=" + fmt(options.logistic.l2_lambda) + "\n";
        txt += "learning_rate=" + fmt(options.logistic.learning_rate) + "\n";
        txt += "max_iters=" + std::to_string(options.logistic.max_iters) + "\n";
        txt += "tol=" + fmt(options.logistic.tol) + "\n";
        rep.files["stats/cv_accuracy.txt"] = std::move(txt);
    }

    // questionnaire distributions
    {
        std::vector<std::pair<std::string, std::vector<svg::BoxSeries>>> panels;
        for (Trait t : kTraits) {
            std::vector<svg::BoxSeries> series;
            for (Group g : kGroupOrder) {
                for (BfiPhase p : {BfiPhase::BeforeWriting, after_phase}) {
                    series.push_back({std::string(group_name(g)) + " " + std::string(phase_name(p)), g,
                                      trait_scores(run, g, t, p)});
                }
            }
            panels.emplace_back(std::string(trait_name(t)), std::move(series));
        }
        rep.files["stats/bfi_boxplots.svg"] = svg::boxplots(panels, "BFI scores by group and phase");
    }
    return rep;
}

AnalysisReport analyze_run(const RunArtifact &run, const LiwcDictionary &dict, const std::filesystem::path &run_dir,
                           const AnalysisOptions &options) {
    auto rep = build_report(run, dict, options);
    for (const auto &[name, body] : rep.files) {
        write_file(run_dir / name, body);
    }
    return rep;
}

std::string compare_runs(const RunArtifact &a, const RunArtifact &b, BfiPhase phase_a, BfiPhase phase_b) {
    if (a.profiles != b.profiles) {
        throw Error(Errc::PhaseMismatch, "runs " + a.run_id + " and " + b.run_id + " use different persona profiles");
    }
    require_phase(a, BfiPhase::BeforeWriting, Errc::PhaseMismatch);
    require_phase(a, phase_a, Errc::PhaseMismatch);
    require_phase(b, phase_b, Errc::PhaseMismatch);

    std::string csv = "Group,Trait,Mean-B_C,Mean-A_C,Mean-A_E,F-Statistic,p-Value,Cohen's d\n";
    for (Group g : kGroupOrder) {
        for (Trait t : kTraits) {
            const auto before = trait_scores(a, g, t, BfiPhase::BeforeWriting);
            const auto control = trait_scores(a, g, t, phase_a);
            const auto experimental = trait_scores(b, g, t, phase_b);
            const auto c = compare_samples(control, experimental);
            csv += std::string(group_name(g)) + "," + std::string(trait_name(t)) + "," + fmt(mean_or_nan(before)) + "," +
                   fmt(mean_or_nan(control)) + "," + fmt(mean_or_nan(experimental)) + "," + fmt(c.f) + "," +
                   fmt(c.p) + "," + fmt(c.d) + "\n";
        }
    }
    return csv;
}

} // namespace persona_lab
