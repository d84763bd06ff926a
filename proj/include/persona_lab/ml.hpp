#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace persona_lab::ml {

/// Dense row-major feature matrix with binary row labels.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<int> labels; // 0 or 1, one per row (may be empty for unsupervised use)
    std::vector<std::string> column_names;

    static FeatureMatrix from_rows(const std::vector<std::vector<double>> &rows, std::vector<int> labels = {},
                                   std::vector<std::string> column_names = {});

    [[nodiscard]] double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
    /// Rows selected by index, labels and names carried along.
    [[nodiscard]] FeatureMatrix subset(std::span<const std::size_t> indices) const;
};

/// Per-column z-scoring fitted on training data; constant columns map to 0.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> sd; // 0 marks a constant column

    static Standardizer fit(const FeatureMatrix &x);
    [[nodiscard]] FeatureMatrix apply(const FeatureMatrix &x) const;
    void apply_row(std::span<const double> in, std::span<double> out) const;
};

struct LogisticConfig {
    int max_iters = 5000;
    double learning_rate = 1.0; // initial step; later steps are Barzilai-Borwein estimates
    double l2_lambda = 1e-3;
    double tol = 1e-6;          // stop once the gradient norm falls below this
};

struct LogisticModel {
    std::vector<double> weights; // in standardized units
    double bias = 0.0;
    Standardizer standardization;
    int iterations = 0;
    double gradient_norm = 0.0;
    std::vector<double> loss_history; // objective after each accepted step, starting at w = 0

    [[nodiscard]] double predict_proba(std::span<const double> raw_row) const;
    [[nodiscard]] int predict(std::span<const double> raw_row) const { return predict_proba(raw_row) >= 0.5 ? 1 : 0; }
};

/// Mean negative log-likelihood plus (l2 / 2) * |w|^2; the bias is not penalized.
double logistic_loss(const FeatureMatrix &x, std::span<const double> weights, double bias, double l2_lambda);
/// Gradient of logistic_loss; grad_w must have x.cols entries.
void logistic_gradient(const FeatureMatrix &x, std::span<const double> weights, double bias, double l2_lambda,
                       std::span<double> grad_w, double &grad_bias);

/// Standardizes, then minimizes logistic_loss by gradient descent with an
/// Armijo backtracking line search (so the loss never increases). Throws
/// SingleClass or NonFinite.
LogisticModel logistic_fit(const FeatureMatrix &x, const LogisticConfig &config = {});

double accuracy(const LogisticModel &model, const FeatureMatrix &x);

/// Fold index (0..k-1) per row. Each class is shuffled with the seed and dealt
/// round-robin, so every fold holds floor or ceil of n_class / k rows of each class.
std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

/// Mean held-out accuracy over stratified k folds. Throws TooFewSamples (n < k) or SingleClass.
double kfold_cv_accuracy(const FeatureMatrix &x, int k = 10, std::uint64_t seed = 0, const LogisticConfig &config = {});

struct PcaModel {
    std::vector<std::vector<double>> components; // n_components x d, orthonormal
    std::vector<double> eigenvalues;
    std::vector<double> explained_variance_ratio;
    Standardizer standardization;
    bool standardized = true;
};

/// Top eigenvectors of the covariance matrix by power iteration with deflation.
/// Each component is signed so its largest-magnitude loading is positive.
/// Throws DegenerateData when the total variance is zero.
PcaModel pca_fit(const FeatureMatrix &x, int n_components = 2, bool standardize = true);
std::vector<std::vector<double>> pca_transform(const PcaModel &model, const FeatureMatrix &x);

} // namespace persona_lab::ml
