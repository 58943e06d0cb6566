#pragma once

// Painting-side and cross-modal distribution metrics: Frechet distance
// between feature sets, the distribution consistency error between the
// painting and poem domains, and genre classification accuracy.

#include "inkbridge/corpus_io.hpp"
#include "inkbridge/linalg.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace inkbridge {

/// Squared W2 between Gaussian fits (sample covariance, divisor n - 1) of the
/// two feature sets; the FID convention. Each side needs n >= 2.
double frechet_distance(const FeatureMatrix &real_feats, const FeatureMatrix &gen_feats,
                        CovEstimator estimator = CovEstimator::sample);

enum class PcaFitScope { pooled, per_domain };

std::string_view to_string(PcaFitScope s) noexcept;
PcaFitScope parse_fit_scope(std::string_view text);

struct DceConfig {
    std::size_t pca_dim = 100;
    CovEstimator estimator = CovEstimator::ledoit_wolf;
    PcaFitScope fit_scope = PcaFitScope::pooled;
    /// Scale pooled columns to unit variance before PCA (centering is always applied).
    bool standardize = false;

    void validate() const;
};

struct DceResult {
    /// Squared W2 distance between the reduced domain Gaussians.
    double value = 0.0;
    std::size_t pca_dim = 0;
    /// Pooled fit: retained fraction of pooled variance. Per-domain fit: the smaller of the two.
    double variance_retained = 0.0;
    CovEstimator estimator = CovEstimator::ledoit_wolf;
};

/// Reduces both domains with PCA (pooled fit over paintings then poems, each
/// sorted by id), fits a Gaussian per domain with the configured estimator and
/// returns their squared W2 distance. Each side needs n >= pca_dim + 1.
DceResult dce(const FeatureMatrix &painting_feats, const FeatureMatrix &poem_feats, const DceConfig &cfg = {});

struct LabelSet {
    std::vector<std::string> ids;
    std::vector<Genre> labels;

    void validate() const;
};

/// CSV "id,genre" with the header row.
LabelSet parse_labels(std::istream &in, std::string_view source = "<labels>");
LabelSet load_labels(const std::filesystem::path &path);
/// Genre labels of every manifest item that carries one.
LabelSet labels_from_manifest(const CorpusManifest &manifest);

/// Fraction of ids whose predicted genre equals the true genre, matched by id.
double genre_accuracy(const LabelSet &pred, const LabelSet &truth);

} // namespace inkbridge
