#include "persona_lab/stats.hpp"

#include "persona_lab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace persona_lab::stats {

namespace {

void require_size(std::span<const double> xs, std::size_t n, const char *what) {
    if (xs.size() < n) {
        throw Error(Errc::InsufficientSamples,
                    std::string(what) + " needs at least " + std::to_string(n) + " samples per group");
    }
}

// Continued fraction for I_x(a, b) by the modified Lentz method.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) {
            break;
        }
    }
    return h;
}

} // namespace

double mean(std::span<const double> xs) {
    if (xs.empty()) {
        throw Error(Errc::InsufficientSamples, "mean of an empty sample");
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) {
    require_size(xs, 2, "variance");
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return ss / static_cast<double>(xs.size() - 1);
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    // the continued fraction converges fast for x < (a + 1) / (a + b + 2)
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double f_survival(double f, double df1, double df2) {
    if (std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    const double p = incomplete_beta(df2 / 2.0, df1 / 2.0, df2 / (df2 + df1 * f));
    return std::clamp(p, 0.0, 1.0);
}

StatResult one_way_anova(std::span<const double> a, std::span<const double> b) {
    require_size(a, 2, "ANOVA");
    require_size(b, 2, "ANOVA");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double ma = mean(a);
    const double mb = mean(b);
    const double grand = (na * ma + nb * mb) / (na + nb);
    const double ss_between = na * (ma - grand) * (ma - grand) + nb * (mb - grand) * (mb - grand);
    double ss_within = 0.0;
    for (double x : a) ss_within += (x - ma) * (x - ma);
    for (double x : b) ss_within += (x - mb) * (x - mb);
    const double df2 = na + nb - 2.0;

    StatResult r;
    r.n_a = a.size();
    r.n_b = b.size();
    if (ss_within == 0.0) {
        if (ss_between == 0.0) {
            throw Error(Errc::DegenerateData, "both groups are constant and equal; F is undefined");
        }
        r.statistic = std::numeric_limits<double>::infinity();
        r.p_value = 0.0;
        return r;
    }
    r.statistic = ss_between / (ss_within / df2);
    r.p_value = f_survival(r.statistic, 1.0, df2);
    r.effect_size = (mb - ma) / std::sqrt(ss_within / df2);
    return r;
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
    require_size(a, 2, "Cohen's d");
    require_size(b, 2, "Cohen's d");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double pooled = ((na - 1.0) * sample_variance(a) + (nb - 1.0) * sample_variance(b)) / (na + nb - 2.0);
    if (!(pooled > 0.0)) {
        throw Error(Errc::DegenerateData, "pooled variance is zero");
    }
    return (mean(b) - mean(a)) / std::sqrt(pooled);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(Errc::LengthMismatch, "correlation inputs differ in length");
    }
    if (x.size() < 2) {
        throw Error(Errc::InsufficientSamples, "correlation needs at least 2 points");
    }
    const double mx = mean(x);
    const double my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw Error(Errc::ConstantSequence, "correlation with a constant sequence is undefined");
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double point_biserial(std::span<const int> labels, std::span<const double> values) {
    if (labels.size() != values.size()) {
        throw Error(Errc::LengthMismatch, "labels and values differ in length");
    }
    bool has0 = false, has1 = false;
    std::vector<double> coded;
    coded.reserve(labels.size());
    for (int l : labels) {
        if (l != 0 && l != 1) {
            throw Error(Errc::Config, "point-biserial labels must be 0 or 1");
        }
        (l == 1 ? has1 : has0) = true;
        coded.push_back(static_cast<double>(l));
    }
    if (!has0 || !has1) {
        throw Error(Errc::SingleClass, "point-biserial needs both classes");
    }
    try {
        return pearson(coded, values);
    } catch (const Error &e) {
        if (e.code() == Errc::ConstantSequence) {
            throw Error(Errc::DegenerateData, "values are all equal");
        }
        throw;
    }
}

std::vector<double> average_ranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
    std::vector<double> ranks(xs.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) {
        throw Error(Errc::LengthMismatch, "spearman inputs differ in length");
    }
    if (x.size() < 3) {
        throw Error(Errc::InsufficientSamples, "spearman needs at least 3 points");
    }
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    return pearson(rx, ry);
}

std::vector<RankedCoefficient> top_k_correlates(std::span<const double> target,
                                                const std::vector<std::vector<double>> &rows,
                                                const std::vector<std::string> &column_names, std::size_t k,
                                                Correlation method) {
    if (rows.size() != target.size()) {
        throw Error(Errc::LengthMismatch, "matrix rows do not align with the target");
    }
    std::vector<int> labels;
    if (method == Correlation::PointBiserial) {
        for (double t : target) labels.push_back(static_cast<int>(t));
    }
    std::vector<RankedCoefficient> ranked;
    std::vector<double> column(rows.size());
    for (std::size_t c = 0; c < column_names.size(); ++c) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != column_names.size()) {
                throw Error(Errc::LengthMismatch, "row width differs from the column count");
            }
            column[r] = rows[r][c];
        }
        try {
            const double coef = method == Correlation::Spearman ? spearman(column, target) : point_biserial(labels, column);
            ranked.push_back({column_names[c], coef});
        } catch (const Error &e) {
            if (e.code() != Errc::ConstantSequence && e.code() != Errc::DegenerateData) {
                throw;
            }
        }
    }
    std::ranges::sort(ranked, [](const RankedCoefficient &l, const RankedCoefficient &r) {
        const double al = std::fabs(l.coefficient);
        const double ar = std::fabs(r.coefficient);
        if (al != ar) return al > ar;
        return l.name < r.name;
    });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

} // namespace persona_lab::stats
