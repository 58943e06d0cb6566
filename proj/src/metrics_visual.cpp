#include "inkbridge/metrics_visual.hpp"

#include "inkbridge/kernels.hpp"
#include "inkbridge/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <set>

namespace inkbridge {

namespace {

GaussianSummary fit_gaussian(const Eigen::MatrixXd &x, CovEstimator estimator) {
    return estimator == CovEstimator::sample ? mean_and_cov(x) : ledoit_wolf(x).summary;
}

/// Rows reordered by id so the pooled fit does not depend on input row order.
Eigen::MatrixXd rows_sorted_by_id(const FeatureMatrix &x) {
    std::vector<std::size_t> order(x.ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&x](std::size_t a, std::size_t b) { return x.ids[a] < x.ids[b]; });
    Eigen::MatrixXd out(x.rows(), x.cols());
    for (std::size_t r = 0; r < order.size(); ++r) {
        out.row(static_cast<Eigen::Index>(r)) = x.data.row(static_cast<Eigen::Index>(order[r]));
    }
    return out;
}

} // namespace

double frechet_distance(const FeatureMatrix &real_feats, const FeatureMatrix &gen_feats, CovEstimator estimator) {
    if (real_feats.cols() != gen_feats.cols()) {
        throw ValidationError("frechet_distance: feature dimension mismatch (" + std::to_string(real_feats.cols()) +
                              " vs " + std::to_string(gen_feats.cols()) + ")");
    }
    if (real_feats.rows() < 2 || gen_feats.rows() < 2) {
        throw ValidationError("frechet_distance needs at least 2 rows per side");
    }
    real_feats.validate();
    gen_feats.validate();
    return wasserstein2_gaussian(fit_gaussian(real_feats.data, estimator), fit_gaussian(gen_feats.data, estimator));
}

std::string_view to_string(PcaFitScope s) noexcept { return s == PcaFitScope::pooled ? "pooled" : "per_domain"; }

PcaFitScope parse_fit_scope(std::string_view text) {
    if (text == "pooled") {
        return PcaFitScope::pooled;
    }
    if (text == "per_domain" || text == "per-domain") {
        return PcaFitScope::per_domain;
    }
    throw ValidationError("unknown PCA fit scope '" + std::string(text) + "'");
}

void DceConfig::validate() const {
    if (pca_dim < 1) {
        throw ValidationError("pca_dim must be at least 1");
    }
}

DceResult dce(const FeatureMatrix &painting_feats, const FeatureMatrix &poem_feats, const DceConfig &cfg) {
    cfg.validate();
    if (painting_feats.cols() != poem_feats.cols()) {
        throw ValidationError("dce: feature dimension mismatch (" + std::to_string(painting_feats.cols()) + " vs " +
                              std::to_string(poem_feats.cols()) + ")");
    }
    const auto need = static_cast<Eigen::Index>(cfg.pca_dim + 1);
    if (painting_feats.rows() < need || poem_feats.rows() < need) {
        throw ValidationError("dce: pca_dim " + std::to_string(cfg.pca_dim) + " needs at least " +
                              std::to_string(need) + " rows per domain (got " + std::to_string(painting_feats.rows()) +
                              " and " + std::to_string(poem_feats.rows()) + ")");
    }
    painting_feats.validate();
    poem_feats.validate();

    Eigen::MatrixXd paintings = rows_sorted_by_id(painting_feats);
    Eigen::MatrixXd poems = rows_sorted_by_id(poem_feats);

    if (cfg.standardize) {
        Eigen::MatrixXd pooled(paintings.rows() + poems.rows(), paintings.cols());
        pooled << paintings, poems;
        const GaussianSummary pooled_moments = mean_and_cov(pooled);
        Eigen::VectorXd scale = pooled_moments.cov.diagonal().cwiseSqrt();
        for (Eigen::Index j = 0; j < scale.size(); ++j) {
            if (!(scale(j) > 0.0)) {
                scale(j) = 1.0;
            }
        }
        paintings = paintings.array().rowwise() / scale.transpose().array();
        poems = poems.array().rowwise() / scale.transpose().array();
    }

    DceResult result;
    result.pca_dim = cfg.pca_dim;
    result.estimator = cfg.estimator;
    Eigen::MatrixXd reduced_paintings;
    Eigen::MatrixXd reduced_poems;
    if (cfg.fit_scope == PcaFitScope::pooled) {
        Eigen::MatrixXd pooled(paintings.rows() + poems.rows(), paintings.cols());
        pooled << paintings, poems;
        const PcaModel model = pca_fit(pooled, cfg.pca_dim);
        result.variance_retained = model.variance_retained;
        reduced_paintings = pca_transform(model, paintings);
        reduced_poems = pca_transform(model, poems);
    } else {
        const PcaModel painting_model = pca_fit(paintings, cfg.pca_dim);
        const PcaModel poem_model = pca_fit(poems, cfg.pca_dim);
        result.variance_retained = std::min(painting_model.variance_retained, poem_model.variance_retained);
        reduced_paintings = pca_transform(painting_model, paintings);
        reduced_poems = pca_transform(poem_model, poems);
    }
    result.value = wasserstein2_gaussian(fit_gaussian(reduced_paintings, cfg.estimator),
                                         fit_gaussian(reduced_poems, cfg.estimator));
    return result;
}

// --- genre accuracy -------------------------------------------------------------------

void LabelSet::validate() const {
    if (ids.size() != labels.size()) {
        throw ValidationError("label set has " + std::to_string(ids.size()) + " ids for " +
                              std::to_string(labels.size()) + " labels");
    }
    std::set<std::string, std::less<>> seen;
    for (const auto &id : ids) {
        if (!seen.insert(id).second) {
            throw ValidationError("duplicate label id '" + id + "'");
        }
    }
}

LabelSet parse_labels(std::istream &in, std::string_view source) {
    const std::string src(source);
    LabelSet out;
    std::string line;
    std::size_t line_no = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ValidationError(src + ":" + std::to_string(line_no) + ": expected \"id,genre\"");
        }
        const std::string id = line.substr(0, comma);
        const std::string label = line.substr(comma + 1);
        if (header) {
            header = false;
            if (id != "id" || label != "genre") {
                throw ValidationError(src + ": header must be \"id,genre\"");
            }
            continue;
        }
        try {
            out.labels.push_back(parse_genre(label));
        } catch (const ValidationError &e) {
            throw ValidationError(src + ": id '" + id + "': " + e.what());
        }
        out.ids.push_back(id);
    }
    out.validate();
    return out;
}

LabelSet load_labels(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    return parse_labels(in, path.string());
}

LabelSet labels_from_manifest(const CorpusManifest &manifest) {
    LabelSet out;
    for (const auto &item : manifest.items) {
        if (item.genre) {
            out.ids.push_back(item.id);
            out.labels.push_back(*item.genre);
        }
    }
    return out;
}

double genre_accuracy(const LabelSet &pred, const LabelSet &truth) {
    pred.validate();
    truth.validate();
    if (pred.ids.empty()) {
        throw ValidationError("genre_accuracy of an empty label set");
    }
    if (pred.ids.size() != truth.ids.size()) {
        throw ValidationError("genre_accuracy: prediction and truth cover different id sets");
    }
    std::map<std::string_view, Genre> expected;
    for (std::size_t i = 0; i < truth.ids.size(); ++i) {
        expected.emplace(truth.ids[i], truth.labels[i]);
    }
    std::size_t agree = 0;
    for (std::size_t i = 0; i < pred.ids.size(); ++i) {
        const auto it = expected.find(pred.ids[i]);
        if (it == expected.end()) {
            throw ValidationError("genre_accuracy: id '" + pred.ids[i] + "' has no true label");
        }
        agree += it->second == pred.labels[i] ? 1 : 0;
    }
    return static_cast<double>(agree) / static_cast<double>(pred.ids.size());
}

} // namespace inkbridge
