#include "inkbridge/losses.hpp"

#include "inkbridge/kernels.hpp"
#include "inkbridge/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace inkbridge {

namespace {

/// Clamped score and the number of entries that needed clamping.
struct ClampCounter {
    std::size_t clamped = 0;

    double operator()(double s) {
        if (s < score_epsilon) {
            ++clamped;
            return score_epsilon;
        }
        if (s > 1.0 - score_epsilon) {
            ++clamped;
            return 1.0 - score_epsilon;
        }
        return s;
    }

    void report(Diagnostics *diag, const char *what) const {
        if (clamped > 0) {
            warn(diag, std::string(what) + ": " + std::to_string(clamped) + " score(s) clamped to [1e-7, 1-1e-7]");
        }
    }
};

void check_scores(std::span<const double> scores, const char *what) {
    if (scores.empty()) {
        throw ValidationError(std::string(what) + ": empty score batch");
    }
    for (const double s : scores) {
        if (!(s >= 0.0 && s <= 1.0)) {
            throw ValidationError(std::string(what) + ": score " + format_double(s) + " outside [0, 1]");
        }
    }
}

template <class F>
double mean_of(std::span<const double> scores, F &&f) {
    return pairwise_sum_of(scores.size(), [&](std::size_t i) { return f(scores[i]); }) /
           static_cast<double>(scores.size());
}

enum class Target { one, zero };

/// Mean pixelwise BCE of one grid against an all-ones or all-zeros target.
double grid_bce(const PatchScoreGrid &grid, Target target, std::size_t &clamped) {
    ClampCounter clamp;
    const auto &s = grid.scores;
    const auto n = static_cast<std::size_t>(s.size());
    const double *data = s.data();
    const double total = pairwise_sum_of(n, [&](std::size_t i) {
        const double p = clamp(data[i]);
        return target == Target::one ? -std::log(p) : -std::log1p(-p);
    });
    clamped += clamp.clamped;
    return total / static_cast<double>(n);
}

double mean_grid_bce(std::span<const PatchScoreGrid> grids, Target target, const char *what, Diagnostics *diag) {
    if (grids.empty()) {
        throw ValidationError(std::string(what) + ": empty grid list");
    }
    for (const auto &grid : grids) {
        grid.validate();
    }
    std::vector<std::size_t> clamped(grids.size(), 0);
    const auto per_grid = kernels::omp::map_items(
        grids.size(), [&](std::size_t i) { return grid_bce(grids[i], target, clamped[i]); });
    std::size_t total_clamped = 0;
    for (const auto c : clamped) {
        total_clamped += c;
    }
    if (total_clamped > 0) {
        warn(diag, std::string(what) + ": " + std::to_string(total_clamped) + " score(s) clamped to [1e-7, 1-1e-7]");
    }
    return pairwise_sum(per_grid) / static_cast<double>(per_grid.size());
}

double mean_l1(std::span<const ReconPair> pairs) {
    const auto per_pair = kernels::omp::map_items(pairs.size(), [&](std::size_t i) { return l1_mean(pairs[i]); });
    return pairwise_sum(per_pair) / static_cast<double>(per_pair.size());
}

} // namespace

void PatchScoreGrid::validate() const {
    if (scores.rows() < 1 || scores.cols() < 1) {
        throw ValidationError("patch score grid must be at least 1 x 1");
    }
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        const double s = scores.data()[i];
        if (!(s >= 0.0 && s <= 1.0)) {
            throw ValidationError("patch score " + format_double(s) + " outside [0, 1]");
        }
    }
}

double l1_mean(const ReconPair &pair) {
    if (pair.original.size() != pair.reconstruction.size()) {
        throw ValidationError("l1_mean: length mismatch (" + std::to_string(pair.original.size()) + " vs " +
                              std::to_string(pair.reconstruction.size()) + ")");
    }
    if (pair.original.empty()) {
        throw ValidationError("l1_mean of empty arrays");
    }
    const auto &a = pair.original;
    const auto &b = pair.reconstruction;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!std::isfinite(a[i]) || !std::isfinite(b[i])) {
            throw ValidationError("l1_mean: non-finite entry at index " + std::to_string(i));
        }
    }
    return pairwise_sum_of(a.size(), [&](std::size_t i) { return std::abs(a[i] - b[i]); }) /
           static_cast<double>(a.size());
}

double cycle_loss(std::span<const ReconPair> painting_pairs, std::span<const ReconPair> poem_pairs,
                  Diagnostics *diag) {
    if (painting_pairs.empty() && poem_pairs.empty()) {
        throw ValidationError("cycle_loss needs at least one reconstruction pair");
    }
    double total = 0.0;
    if (painting_pairs.empty()) {
        warn(diag, "cycle_loss: no painting pairs; painting term is 0");
    } else {
        total += mean_l1(painting_pairs);
    }
    if (poem_pairs.empty()) {
        warn(diag, "cycle_loss: no poem pairs; poem term is 0");
    } else {
        total += mean_l1(poem_pairs);
    }
    return total;
}

double supervised_loss(std::span<const ReconPair> pred_poem_vs_true, std::span<const ReconPair> pred_painting_vs_true) {
    if (pred_poem_vs_true.size() != pred_painting_vs_true.size()) {
        throw ValidationError("supervised_loss: " + std::to_string(pred_poem_vs_true.size()) + " poem terms vs " +
                              std::to_string(pred_painting_vs_true.size()) + " painting terms");
    }
    if (pred_poem_vs_true.empty()) {
        throw ValidationError("supervised_loss is undefined without paired data");
    }
    const auto per_example = kernels::omp::map_items(pred_poem_vs_true.size(), [&](std::size_t i) {
        return l1_mean(pred_poem_vs_true[i]) + l1_mean(pred_painting_vs_true[i]);
    });
    return pairwise_sum(per_example) / static_cast<double>(per_example.size());
}

double adv_generator_seq(std::span<const double> fake_scores, GeneratorForm form, Diagnostics *diag) {
    check_scores(fake_scores, "adv_generator_seq");
    ClampCounter clamp;
    const double value = form == GeneratorForm::minimax
                             ? mean_of(fake_scores, [&](double s) { return std::log1p(-clamp(s)); })
                             : -mean_of(fake_scores, [&](double s) { return std::log(clamp(s)); });
    clamp.report(diag, "adv_generator_seq");
    return value;
}

double adv_discriminator_seq(std::span<const double> real_scores, std::span<const double> fake_scores,
                             Diagnostics *diag) {
    check_scores(real_scores, "adv_discriminator_seq (real)");
    check_scores(fake_scores, "adv_discriminator_seq (fake)");
    ClampCounter clamp;
    const double real_term = mean_of(real_scores, [&](double s) { return std::log(clamp(s)); });
    const double fake_term = mean_of(fake_scores, [&](double s) { return std::log1p(-clamp(s)); });
    clamp.report(diag, "adv_discriminator_seq");
    return real_term + fake_term;
}

double patch_generator_loss(std::span<const PatchScoreGrid> grids, Diagnostics *diag) {
    return mean_grid_bce(grids, Target::one, "patch_generator_loss", diag);
}

double patch_discriminator_loss(std::span<const PatchScoreGrid> real_grids, std::span<const PatchScoreGrid> fake_grids,
                                Diagnostics *diag) {
    return mean_grid_bce(real_grids, Target::one, "patch_discriminator_loss (real)", diag) +
           mean_grid_bce(fake_grids, Target::zero, "patch_discriminator_loss (fake)", diag);
}

double full_objective(double cyc, double sup, double adv_seq, double adv_patch, const LossWeights &w) {
    for (const double v : {cyc, sup, adv_seq, adv_patch, w.lambda_sup, w.lambda_adv}) {
        if (!std::isfinite(v)) {
            throw ValidationError("full_objective: non-finite input");
        }
    }
    if (w.lambda_sup < 0.0 || w.lambda_adv < 0.0) {
        throw ValidationError("full_objective: loss weights must be non-negative");
    }
    return cyc + w.lambda_sup * sup + w.lambda_adv * (adv_seq + adv_patch);
}

} // namespace inkbridge
