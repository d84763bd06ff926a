#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace persona_lab::stats {

struct StatResult {
    double statistic = 0.0;
    std::optional<double> p_value;
    std::optional<double> effect_size;
    std::size_t n_a = 0;
    std::size_t n_b = 0;
};

double mean(std::span<const double> xs);
/// Unbiased (n - 1) sample variance.
double sample_variance(std::span<const double> xs);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// Upper tail P(F > f) of the F(df1, df2) distribution.
double f_survival(double f, double df1, double df2);

/// Two-group one-way ANOVA. F has (1, n_a + n_b - 2) degrees of freedom;
/// effect_size carries Cohen's d when it is defined.
StatResult one_way_anova(std::span<const double> a, std::span<const double> b);

/// (mean(b) - mean(a)) / pooled SD: positive when b exceeds a.
double cohens_d(std::span<const double> a, std::span<const double> b);

/// Pearson correlation between 0/1 labels and values; positive means class 1 has the higher mean.
double point_biserial(std::span<const int> labels, std::span<const double> values);

double pearson(std::span<const double> x, std::span<const double> y);
/// Fractional ranks (1-based); ties share their average rank.
std::vector<double> average_ranks(std::span<const double> xs);
double spearman(std::span<const double> x, std::span<const double> y);

enum class Correlation { PointBiserial, Spearman };

struct RankedCoefficient {
    std::string name;
    double coefficient = 0.0;
};

/// Correlates `target` with every column of `rows` (row-major, rows.size() ==
/// target.size()). Ranked by |coefficient| descending, ties by name ascending.
/// Columns whose coefficient is undefined (constant column) are left out.
std::vector<RankedCoefficient> top_k_correlates(std::span<const double> target,
                                                const std::vector<std::vector<double>> &rows,
                                                const std::vector<std::string> &column_names, std::size_t k,
                                                Correlation method);

} // namespace persona_lab::stats
