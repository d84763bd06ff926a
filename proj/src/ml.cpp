#include "persona_lab/ml.hpp"

#include "persona_lab/error.hpp"
#include "persona_lab/util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace persona_lab::ml {

namespace {

double sigmoid(double z) {
    if (z >= 0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void check_labels(const FeatureMatrix &x) {
    if (x.labels.size() != x.rows) {
        throw Error(Errc::LengthMismatch, "one label per row is required");
    }
    const bool has0 = std::ranges::find(x.labels, 0) != x.labels.end();
    const bool has1 = std::ranges::find(x.labels, 1) != x.labels.end();
    if (!has0 || !has1) {
        throw Error(Errc::SingleClass, "both classes must be present");
    }
}

} // namespace

FeatureMatrix FeatureMatrix::from_rows(const std::vector<std::vector<double>> &rows, std::vector<int> labels,
                                       std::vector<std::string> column_names) {
    FeatureMatrix m;
    m.rows = rows.size();
    m.cols = rows.empty() ? column_names.size() : rows.front().size();
    m.values.reserve(m.rows * m.cols);
    for (const auto &r : rows) {
        if (r.size() != m.cols) {
            throw Error(Errc::LengthMismatch, "ragged feature rows");
        }
        m.values.insert(m.values.end(), r.begin(), r.end());
    }
    m.labels = std::move(labels);
    m.column_names = std::move(column_names);
    return m;
}

FeatureMatrix FeatureMatrix::subset(std::span<const std::size_t> indices) const {
    FeatureMatrix m;
    m.rows = indices.size();
    m.cols = cols;
    m.column_names = column_names;
    m.values.reserve(m.rows * cols);
    for (auto i : indices) {
        const auto r = row(i);
        m.values.insert(m.values.end(), r.begin(), r.end());
        if (!labels.empty()) {
            m.labels.push_back(labels[i]);
        }
    }
    return m;
}

Standardizer Standardizer::fit(const FeatureMatrix &x) {
    Standardizer s;
    s.mean.assign(x.cols, 0.0);
    s.sd.assign(x.cols, 0.0);
    if (x.rows == 0) {
        return s;
    }
    for (std::size_t c = 0; c < x.cols; ++c) {
        double m = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) m += x.at(r, c);
        m /= static_cast<double>(x.rows);
        double ss = 0.0;
        for (std::size_t r = 0; r < x.rows; ++r) ss += (x.at(r, c) - m) * (x.at(r, c) - m);
        s.mean[c] = m;
        const double sd = std::sqrt(ss / static_cast<double>(x.rows));
        // relative threshold: a column of identical floats can still leave rounding noise
        s.sd[c] = sd > 1e-12 * std::max(1.0, std::fabs(m)) ? sd : 0.0;
    }
    return s;
}

void Standardizer::apply_row(std::span<const double> in, std::span<double> out) const {
    for (std::size_t c = 0; c < in.size(); ++c) {
        out[c] = sd[c] > 0 ? (in[c] - mean[c]) / sd[c] : 0.0;
    }
}

FeatureMatrix Standardizer::apply(const FeatureMatrix &x) const {
    FeatureMatrix out = x;
    for (std::size_t r = 0; r < x.rows; ++r) {
        apply_row(x.row(r), std::span<double>(out.values.data() + r * x.cols, x.cols));
    }
    return out;
}

double logistic_loss(const FeatureMatrix &x, std::span<const double> weights, double bias, double l2_lambda) {
    double total = 0.0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double z = dot(x.row(r), weights) + bias;
        total += softplus(z) - static_cast<double>(x.labels[r]) * z;
    }
    return total / static_cast<double>(x.rows) + 0.5 * l2_lambda * dot(weights, weights);
}

void logistic_gradient(const FeatureMatrix &x, std::span<const double> weights, double bias, double l2_lambda,
                       std::span<double> grad_w, double &grad_bias) {
    std::ranges::fill(grad_w, 0.0);
    grad_bias = 0.0;
    const double inv_n = 1.0 / static_cast<double>(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto row = x.row(r);
        const double residual = sigmoid(dot(row, weights) + bias) - static_cast<double>(x.labels[r]);
        for (std::size_t c = 0; c < x.cols; ++c) grad_w[c] += residual * row[c];
        grad_bias += residual;
    }
    for (std::size_t c = 0; c < x.cols; ++c) grad_w[c] = grad_w[c] * inv_n + l2_lambda * weights[c];
    grad_bias *= inv_n;
}

double LogisticModel::predict_proba(std::span<const double> raw_row) const {
    std::vector<double> z(raw_row.size());
    standardization.apply_row(raw_row, z);
    return sigmoid(dot(z, weights) + bias);
}

LogisticModel logistic_fit(const FeatureMatrix &x, const LogisticConfig &config) {
    check_labels(x);
    if (x.rows < 2) {
        throw Error(Errc::TooFewSamples, "logistic regression needs at least 2 rows");
    }
    if (!std::ranges::all_of(x.values, [](double v) { return std::isfinite(v); })) {
        throw Error(Errc::NonFinite, "feature matrix contains non-finite values");
    }
    LogisticModel model;
    model.standardization = Standardizer::fit(x);
    const auto z = model.standardization.apply(x);
    const std::size_t d = x.cols;

    // parameters packed as [w..., b]
    std::vector<double> params(d + 1, 0.0), grad(d + 1), trial(d + 1), trial_grad(d + 1);
    const auto eval = [&](const std::vector<double> &p) {
        return logistic_loss(z, std::span(p).first(d), p[d], config.l2_lambda);
    };
    const auto gradient = [&](const std::vector<double> &p, std::vector<double> &g) {
        logistic_gradient(z, std::span(p).first(d), p[d], config.l2_lambda, std::span(g).first(d), g[d]);
    };

    double loss = eval(params);
    gradient(params, grad);
    model.loss_history.push_back(loss);
    double step = config.learning_rate;
    int iter = 0;
    for (; iter < config.max_iters; ++iter) {
        const double gnorm = norm(grad);
        if (gnorm < config.tol) {
            break;
        }
        double t = step;
        double trial_loss = 0.0;
        for (;;) {
            for (std::size_t i = 0; i <= d; ++i) trial[i] = params[i] - t * grad[i];
            trial_loss = eval(trial);
            if (std::isfinite(trial_loss) && trial_loss <= loss - 1e-4 * t * gnorm * gnorm) {
                break;
            }
            t *= 0.5;
            if (t < 1e-20) {
                break;
            }
        }
        if (!std::isfinite(trial_loss)) {
            throw Error(Errc::NonFinite, "logistic loss diverged; lower the learning rate");
        }
        if (t < 1e-20 || trial_loss > loss) {
            break; // no descent possible at machine precision
        }
        gradient(trial, trial_grad);
        double sy = 0.0, ss = 0.0;
        for (std::size_t i = 0; i <= d; ++i) {
            const double s = trial[i] - params[i];
            sy += s * (trial_grad[i] - grad[i]);
            ss += s * s;
        }
        step = sy > 0 ? std::clamp(ss / sy, 1e-10, 1e10) : config.learning_rate;
        params.swap(trial);
        grad.swap(trial_grad);
        loss = trial_loss;
        model.loss_history.push_back(loss);
    }
    model.iterations = iter;
    model.gradient_norm = norm(grad);
    model.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d));
    model.bias = params[d];
    return model;
}

double accuracy(const LogisticModel &model, const FeatureMatrix &x) {
    if (x.rows == 0) {
        throw Error(Errc::TooFewSamples, "accuracy of an empty set");
    }
    std::size_t hits = 0;
    for (std::size_t r = 0; r < x.rows; ++r) {
        hits += model.predict(x.row(r)) == x.labels[r] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(x.rows);
}

std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
    if (k < 2) {
        throw Error(Errc::Config, "k-fold needs k >= 2");
    }
    std::mt19937_64 rng(seed);
    std::vector<int> folds(labels.size(), 0);
    std::size_t dealt = 0;
    for (int cls : {0, 1}) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) members.push_back(i);
        }
        seeded_shuffle(members, rng);
        for (auto i : members) {
            folds[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(k));
        }
    }
    return folds;
}

double kfold_cv_accuracy(const FeatureMatrix &x, int k, std::uint64_t seed, const LogisticConfig &config) {
    check_labels(x);
    if (k < 2 || x.rows < static_cast<std::size_t>(k)) {
        throw Error(Errc::TooFewSamples,
                    std::to_string(x.rows) + " rows cannot be split into " + std::to_string(k) + " folds");
    }
    const auto folds = stratified_folds(x.labels, k, seed);
    double total = 0.0;
    for (int f = 0; f < k; ++f) {
        std::vector<std::size_t> train, test;
        for (std::size_t i = 0; i < x.rows; ++i) {
            (folds[i] == f ? test : train).push_back(i);
        }
        const auto train_x = x.subset(train);
        const auto test_x = x.subset(test);
        const auto ones = std::ranges::count(train_x.labels, 1);
        if (ones == 0 || ones == static_cast<std::ptrdiff_t>(train_x.rows)) {
            // single-class training fold: the only sensible model is constant
            const int only = ones == 0 ? 0 : 1;
            total += static_cast<double>(std::ranges::count(test_x.labels, only)) / static_cast<double>(test_x.rows);
            continue;
        }
        total += accuracy(logistic_fit(train_x, config), test_x);
    }
    return total / static_cast<double>(k);
}

PcaModel pca_fit(const FeatureMatrix &x, int n_components, bool standardize) {
    if (x.rows < 2) {
        throw Error(Errc::TooFewSamples, "PCA needs at least 2 rows");
    }
    if (n_components < 1 || static_cast<std::size_t>(n_components) > x.cols) {
        throw Error(Errc::Config, "n_components must lie in [1, d]");
    }
    PcaModel model;
    model.standardized = standardize;
    model.standardization = Standardizer::fit(x);
    if (!standardize) {
        std::ranges::fill(model.standardization.sd, 1.0);
    }
    const auto z = model.standardization.apply(x);
    const std::size_t d = x.cols;

    std::vector<double> cov(d * d, 0.0);
    for (std::size_t r = 0; r < z.rows; ++r) {
        const auto row = z.row(r);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i; j < d; ++j) cov[i * d + j] += row[i] * row[j];
        }
    }
    const double denom = static_cast<double>(z.rows - 1);
    double trace = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            cov[i * d + j] /= denom;
            cov[j * d + i] = cov[i * d + j];
        }
        trace += cov[i * d + i];
    }
    if (!(trace > 0.0)) {
        throw Error(Errc::DegenerateData, "total variance is zero");
    }

    const auto multiply = [&](const std::vector<double> &v, std::vector<double> &out) {
        for (std::size_t i = 0; i < d; ++i) out[i] = dot(std::span(cov).subspan(i * d, d), v);
    };
    const auto orthogonalize = [&](std::vector<double> &v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &u : model.components) {
                const double proj = dot(u, v);
                for (std::size_t i = 0; i < d; ++i) v[i] -= proj * u[i];
            }
        }
    };

    std::vector<double> v(d), w(d);
    for (int comp = 0; comp < n_components; ++comp) {
        // deterministic start, nudged off symmetric directions
        for (std::size_t i = 0; i < d; ++i) v[i] = 1.0 + 0.1 * static_cast<double>(i % 7) + 0.01 * static_cast<double>(i);
        orthogonalize(v);
        for (std::size_t e = 0; norm(v) < 1e-8 && e < d; ++e) {
            std::ranges::fill(v, 0.0);
            v[e] = 1.0;
            orthogonalize(v);
        }
        double n = norm(v);
        for (auto &vi : v) vi /= n;

        for (int iter = 0; iter < 20000; ++iter) {
            multiply(v, w);
            orthogonalize(w); // deflation: previous eigen-directions removed
            n = norm(w);
            if (n < 1e-14 * trace) {
                break; // remaining spectrum is zero; any orthogonal unit vector will do
            }
            double delta = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                w[i] /= n;
                delta = std::max(delta, std::fabs(w[i] - v[i]));
            }
            v.swap(w);
            if (delta < 1e-13) {
                break;
            }
        }
        orthogonalize(v);
        n = norm(v);
        for (auto &vi : v) vi /= n;

        std::size_t arg = 0;
        for (std::size_t i = 1; i < d; ++i) {
            if (std::fabs(v[i]) > std::fabs(v[arg]) + 1e-12) arg = i;
        }
        if (v[arg] < 0) {
            for (auto &vi : v) vi = -vi;
        }
        multiply(v, w);
        const double eigenvalue = std::max(0.0, dot(v, w));
        model.components.push_back(v);
        model.eigenvalues.push_back(eigenvalue);
        model.explained_variance_ratio.push_back(std::clamp(eigenvalue / trace, 0.0, 1.0));
    }
    return model;
}

std::vector<std::vector<double>> pca_transform(const PcaModel &model, const FeatureMatrix &x) {
    std::vector<std::vector<double>> coords;
    coords.reserve(x.rows);
    std::vector<double> z(x.cols);
    for (std::size_t r = 0; r < x.rows; ++r) {
        model.standardization.apply_row(x.row(r), z);
        std::vector<double> point;
        for (const auto &component : model.components) point.push_back(dot(component, z));
        coords.push_back(std::move(point));
    }
    return coords;
}

} // namespace persona_lab::ml
