#pragma once

// Dense statistics over feature matrices: moments, Ledoit-Wolf shrinkage,
// PCA, the PSD matrix square root and the closed-form Gaussian W2 distance.
// All arithmetic is 64-bit; reductions go through the pairwise kernels.

#include "inkbridge/corpus_io.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <string_view>

namespace inkbridge {

enum class CovEstimator { sample, ledoit_wolf };

std::string_view to_string(CovEstimator e) noexcept;
CovEstimator parse_estimator(std::string_view text);

/// Mean and covariance of a feature distribution.
///
/// Construct through make(): the covariance is symmetrized, checked to have no
/// eigenvalue below -1e-8 * trace / d, and any small negative eigenvalues are
/// lifted to zero.
struct GaussianSummary {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    std::size_t n = 0;
    CovEstimator estimator = CovEstimator::sample;

    static GaussianSummary make(Eigen::VectorXd mean, Eigen::MatrixXd cov, std::size_t n, CovEstimator estimator);

    Eigen::Index dim() const noexcept { return mean.size(); }
};

std::string gaussian_to_string(const GaussianSummary &g);
GaussianSummary parse_gaussian(std::string_view json_text, std::string_view source = "<gaussian>");

/// Column mean and unbiased sample covariance (divisor n - 1). Requires n >= 2.
GaussianSummary mean_and_cov(const Eigen::MatrixXd &x);
GaussianSummary mean_and_cov(const FeatureMatrix &x);

struct ShrinkageResult {
    GaussianSummary summary;
    /// Shrinkage intensity in [0, 1].
    double delta = 0.0;
    /// Scale m of the m * I target, trace(S) / d.
    double target_scale = 0.0;
};

/// Ledoit-Wolf (2004) shrinkage toward a scaled identity:
///   (1 - delta) * S + delta * m * I
/// with S the sample covariance using divisor n (not n - 1), m = tr(S) / d,
/// and delta = min(b2, d2) / d2 where, in the normalized Frobenius norm
/// |A|^2 = tr(A A^T) / d,
///   d2 = |S - m I|^2,   b2 = (1 / n^2) * sum_k |x_k x_k^T - S|^2.
/// When S already equals m * I (d2 = 0) delta is reported as 0.
ShrinkageResult ledoit_wolf(const Eigen::MatrixXd &x);
ShrinkageResult ledoit_wolf(const FeatureMatrix &x);

struct PcaModel {
    Eigen::VectorXd mean;
    /// q x d, orthonormal rows, each with its largest-magnitude entry positive.
    Eigen::MatrixXd components;
    /// Descending, non-negative.
    Eigen::VectorXd eigenvalues;
    double variance_retained = 1.0;

    Eigen::Index input_dim() const noexcept { return components.cols(); }
    Eigen::Index output_dim() const noexcept { return components.rows(); }
};

/// Top target_dim eigenvectors of the sample covariance (divisor n - 1).
/// Requires 1 <= target_dim <= min(n - 1, d).
PcaModel pca_fit(const Eigen::MatrixXd &x, std::size_t target_dim);
PcaModel pca_fit(const FeatureMatrix &x, std::size_t target_dim);

/// (x - mean) * components^T.
Eigen::MatrixXd pca_transform(const PcaModel &model, const Eigen::MatrixXd &x);
FeatureMatrix pca_transform(const PcaModel &model, const FeatureMatrix &x);
/// z * components + mean.
Eigen::MatrixXd pca_inverse_transform(const PcaModel &model, const Eigen::MatrixXd &z);

/// Q * sqrt(L) * Q^T from the symmetric eigendecomposition. Eigenvalues in
/// [-1e-8 * lambda_max, 0) are clamped to zero; anything lower throws
/// NumericalError. Input must be symmetric within 1e-8 (relative to its
/// largest entry).
Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd &a);

/// Squared Wasserstein-2 distance between two Gaussians:
///   |mu1 - mu2|^2 + tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2}).
/// The cross term uses the symmetric similarity form, which has the same trace
/// as (S1 S2)^{1/2}. Round-off negatives within 1e-8 * max(1, tr S1 + tr S2)
/// are returned as 0.
double wasserstein2_gaussian(const GaussianSummary &g1, const GaussianSummary &g2);

} // namespace inkbridge
