#include "inkbridge/linalg.hpp"

#include "inkbridge/kernels.hpp"
#include "inkbridge/numeric.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace inkbridge {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(CovEstimator e) noexcept {
    return e == CovEstimator::sample ? "sample" : "ledoit_wolf";
}

CovEstimator parse_estimator(std::string_view text) {
    if (text == "sample") {
        return CovEstimator::sample;
    }
    if (text == "ledoit_wolf" || text == "ledoit-wolf") {
        return CovEstimator::ledoit_wolf;
    }
    throw ValidationError("unknown covariance estimator '" + std::string(text) + "'");
}

namespace {

double vector_sum(const Eigen::VectorXd &v) {
    return pairwise_sum({v.data(), static_cast<std::size_t>(v.size())});
}

double trace_of(const Eigen::MatrixXd &a) { return vector_sum(a.diagonal()); }

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd &a) { return 0.5 * (a + a.transpose()); }

double max_abs(const Eigen::MatrixXd &a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

void require_square_symmetric(const Eigen::MatrixXd &a, const char *what) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw ValidationError(std::string(what) + " must be a non-empty square matrix");
    }
    if (!a.allFinite()) {
        throw NumericalError(std::string(what) + " has non-finite entries");
    }
    const double asym = max_abs(a - a.transpose());
    if (asym > 1e-8 * std::max(1.0, max_abs(a))) {
        throw ValidationError(std::string(what) + " is not symmetric (max asymmetry " + format_double(asym) + ")");
    }
}

/// Eigenvalues clamped to [0, inf) under the relative tolerance tol_scale * lambda_max.
Eigen::VectorXd clamp_psd_eigenvalues(Eigen::VectorXd values, double tolerance, const char *what) {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) < 0.0) {
            if (values(i) < -tolerance) {
                throw NumericalError(std::string(what) + " is not positive semi-definite (eigenvalue " +
                                     format_double(values(i)) + ")");
            }
            values(i) = 0.0;
        }
    }
    return values;
}

Eigen::MatrixXd centered(const Eigen::MatrixXd &x, const Eigen::VectorXd &mean) {
    return x.rowwise() - mean.transpose();
}

} // namespace

// --- GaussianSummary -------------------------------------------------------------

GaussianSummary GaussianSummary::make(Eigen::VectorXd mean, Eigen::MatrixXd cov, std::size_t n,
                                      CovEstimator estimator) {
    if (cov.rows() != cov.cols() || cov.rows() != mean.size() || mean.size() == 0) {
        throw ValidationError("Gaussian summary needs a d-vector mean and a d x d covariance");
    }
    if (!mean.allFinite() || !cov.allFinite()) {
        throw NumericalError("Gaussian summary has non-finite entries");
    }
    GaussianSummary g;
    g.mean = std::move(mean);
    g.cov = symmetrized(cov);
    g.n = n;
    g.estimator = estimator;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.cov);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of covariance failed");
    }
    const double scale = std::max(0.0, trace_of(g.cov) / static_cast<double>(g.dim()));
    const Eigen::VectorXd &values = eig.eigenvalues();
    if (values.minCoeff() < 0.0) {
        const Eigen::VectorXd clamped = clamp_psd_eigenvalues(values, 1e-8 * scale, "covariance");
        // Lift only the negative part so the PSD portion keeps its exact bits.
        const Eigen::VectorXd lift = clamped - values;
        g.cov += eig.eigenvectors() * lift.asDiagonal() * eig.eigenvectors().transpose();
        g.cov = symmetrized(g.cov);
    }
    return g;
}

std::string gaussian_to_string(const GaussianSummary &g) {
    ordered_json doc;
    doc["mean"] = std::vector<double>(g.mean.data(), g.mean.data() + g.mean.size());
    ordered_json cov = ordered_json::array();
    for (Eigen::Index i = 0; i < g.cov.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(g.cov.cols()));
        for (Eigen::Index j = 0; j < g.cov.cols(); ++j) {
            row[static_cast<std::size_t>(j)] = g.cov(i, j);
        }
        cov.push_back(std::move(row));
    }
    doc["cov"] = std::move(cov);
    doc["n"] = g.n;
    doc["estimator"] = to_string(g.estimator);
    return doc.dump() + "\n";
}

GaussianSummary parse_gaussian(std::string_view json_text, std::string_view source) {
    const std::string src(source);
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ValidationError(src + ": malformed JSON: " + e.what());
    }
    try {
        const auto mean_values = doc.at("mean").get<std::vector<double>>();
        const auto rows = doc.at("cov").get<std::vector<std::vector<double>>>();
        const auto d = static_cast<Eigen::Index>(mean_values.size());
        Eigen::VectorXd mean = Eigen::Map<const Eigen::VectorXd>(mean_values.data(), d);
        Eigen::MatrixXd cov(d, d);
        if (static_cast<Eigen::Index>(rows.size()) != d) {
            throw ValidationError(src + ": cov must be " + std::to_string(d) + " x " + std::to_string(d));
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != d) {
                throw ValidationError(src + ": cov must be " + std::to_string(d) + " x " + std::to_string(d));
            }
            for (Eigen::Index j = 0; j < d; ++j) {
                cov(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
        }
        return GaussianSummary::make(std::move(mean), std::move(cov), doc.at("n").get<std::size_t>(),
                                     parse_estimator(doc.at("estimator").get<std::string>()));
    } catch (const json::exception &e) {
        throw ValidationError(src + ": invalid Gaussian summary: " + e.what());
    }
}

// --- estimators -------------------------------------------------------------------

GaussianSummary mean_and_cov(const Eigen::MatrixXd &x) {
    if (x.rows() < 2) {
        throw ValidationError("mean_and_cov needs at least 2 rows, got " + std::to_string(x.rows()));
    }
    Eigen::VectorXd mean = kernels::omp::column_means(x);
    Eigen::MatrixXd cov = kernels::omp::scatter(centered(x, mean)) / static_cast<double>(x.rows() - 1);
    return GaussianSummary::make(std::move(mean), std::move(cov), static_cast<std::size_t>(x.rows()),
                                 CovEstimator::sample);
}

GaussianSummary mean_and_cov(const FeatureMatrix &x) { return mean_and_cov(x.data); }

ShrinkageResult ledoit_wolf(const Eigen::MatrixXd &x) {
    if (x.rows() < 2) {
        throw ValidationError("ledoit_wolf needs at least 2 rows, got " + std::to_string(x.rows()));
    }
    const auto n = static_cast<double>(x.rows());
    const auto d = static_cast<double>(x.cols());
    Eigen::VectorXd mean = kernels::omp::column_means(x);
    const Eigen::MatrixXd c = centered(x, mean);
    const Eigen::MatrixXd s = kernels::omp::scatter(c) / n;

    const double m = trace_of(s) / d;
    Eigen::MatrixXd deviation = s;
    deviation.diagonal().array() -= m;
    const Eigen::MatrixXd deviation_sq = deviation.cwiseProduct(deviation);
    const double d2 = pairwise_sum({deviation_sq.data(), static_cast<std::size_t>(deviation_sq.size())}) / d;

    const Eigen::MatrixXd residual = kernels::omp::outer_residual_sq(c, s);
    const double b2_bar = pairwise_sum({residual.data(), static_cast<std::size_t>(residual.size())}) / d / (n * n);
    const double b2 = std::min(b2_bar, d2);
    const double delta = d2 > 0.0 ? std::clamp(b2 / d2, 0.0, 1.0) : 0.0;

    Eigen::MatrixXd shrunk = (1.0 - delta) * s;
    shrunk.diagonal().array() += delta * m;

    ShrinkageResult result;
    result.summary = GaussianSummary::make(std::move(mean), std::move(shrunk), static_cast<std::size_t>(x.rows()),
                                           CovEstimator::ledoit_wolf);
    result.delta = delta;
    result.target_scale = m;
    return result;
}

ShrinkageResult ledoit_wolf(const FeatureMatrix &x) { return ledoit_wolf(x.data); }

// --- PCA --------------------------------------------------------------------------

PcaModel pca_fit(const Eigen::MatrixXd &x, std::size_t target_dim) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto d = static_cast<std::size_t>(x.cols());
    if (n < 2 || target_dim < 1 || target_dim > std::min(n - 1, d)) {
        throw ValidationError("pca target dimension " + std::to_string(target_dim) + " outside [1, min(n-1, d)] = [1, " +
                              std::to_string(n < 2 ? 0 : std::min(n - 1, d)) + "]");
    }
    PcaModel model;
    model.mean = kernels::omp::column_means(x);
    const Eigen::MatrixXd cov = kernels::omp::scatter(centered(x, model.mean)) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition for PCA failed");
    }
    // Eigen returns ascending order; read it backwards.
    Eigen::VectorXd all = eig.eigenvalues().reverse().cwiseMax(0.0);
    const double total = vector_sum(all);
    if (!(total > 0.0)) {
        throw NumericalError("PCA input has zero total variance");
    }
    const auto q = static_cast<Eigen::Index>(target_dim);
    model.eigenvalues = all.head(q);
    model.components.resize(q, static_cast<Eigen::Index>(d));
    for (Eigen::Index k = 0; k < q; ++k) {
        Eigen::VectorXd v = eig.eigenvectors().col(static_cast<Eigen::Index>(d) - 1 - k);
        Eigen::Index pivot = 0;
        v.cwiseAbs().maxCoeff(&pivot);
        if (v(pivot) < 0.0) {
            v = -v;
        }
        model.components.row(k) = v.transpose();
    }
    model.variance_retained = std::min(1.0, vector_sum(model.eigenvalues) / total);
    return model;
}

PcaModel pca_fit(const FeatureMatrix &x, std::size_t target_dim) { return pca_fit(x.data, target_dim); }

Eigen::MatrixXd pca_transform(const PcaModel &model, const Eigen::MatrixXd &x) {
    if (x.cols() != model.input_dim()) {
        throw ValidationError("pca_transform: input has " + std::to_string(x.cols()) + " columns, model expects " +
                              std::to_string(model.input_dim()));
    }
    return kernels::omp::project(x, model.mean, model.components);
}

FeatureMatrix pca_transform(const PcaModel &model, const FeatureMatrix &x) {
    FeatureMatrix out;
    out.ids = x.ids;
    out.modality = x.modality;
    out.data = pca_transform(model, x.data);
    return out;
}

Eigen::MatrixXd pca_inverse_transform(const PcaModel &model, const Eigen::MatrixXd &z) {
    if (z.cols() != model.output_dim()) {
        throw ValidationError("pca_inverse_transform: input has " + std::to_string(z.cols()) +
                              " columns, model has " + std::to_string(model.output_dim()) + " components");
    }
    Eigen::MatrixXd x = z * model.components;
    x.rowwise() += model.mean.transpose();
    return x;
}

// --- square root and W2 -----------------------------------------------------------

Eigen::MatrixXd sqrtm_psd(const Eigen::MatrixXd &a) {
    require_square_symmetric(a, "sqrtm_psd input");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetrized(a));
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition in sqrtm_psd failed");
    }
    const double lambda_max = std::max(0.0, eig.eigenvalues().maxCoeff());
    const Eigen::VectorXd roots =
        clamp_psd_eigenvalues(eig.eigenvalues(), 1e-8 * lambda_max, "sqrtm_psd input").cwiseSqrt();
    Eigen::MatrixXd root = eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
    return symmetrized(root);
}

double wasserstein2_gaussian(const GaussianSummary &g1, const GaussianSummary &g2) {
    if (g1.dim() != g2.dim()) {
        throw ValidationError("wasserstein2_gaussian: dimension mismatch (" + std::to_string(g1.dim()) + " vs " +
                              std::to_string(g2.dim()) + ")");
    }
    const Eigen::VectorXd diff = g1.mean - g2.mean;
    const double mean_term = pairwise_dot(diff.data(), diff.data(), static_cast<std::size_t>(diff.size()));

    const Eigen::MatrixXd root1 = sqrtm_psd(g1.cov);
    require_square_symmetric(g2.cov, "second covariance");
    const Eigen::MatrixXd middle = symmetrized(root1 * g2.cov * root1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(middle, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition in wasserstein2_gaussian failed");
    }
    const double lambda_max = std::max(0.0, eig.eigenvalues().maxCoeff());
    const Eigen::VectorXd roots =
        clamp_psd_eigenvalues(eig.eigenvalues(), 1e-8 * lambda_max, "covariance product").cwiseSqrt();
    const double cross = vector_sum(roots);

    const double trace_sum = trace_of(g1.cov) + trace_of(g2.cov);
    const double value = mean_term + trace_sum - 2.0 * cross;
    if (value < 0.0) {
        if (value >= -1e-8 * std::max(1.0, trace_sum)) {
            return 0.0;
        }
        throw NumericalError("wasserstein2_gaussian produced a negative value " + format_double(value));
    }
    return value;
}

} // namespace inkbridge
