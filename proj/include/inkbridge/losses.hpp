#pragma once

// Forward evaluation of the translation objective: L1 cycle and supervised
// terms, sequence adversarial terms, patch-discriminator BCE terms, and the
// weighted combination. Expectations are batch means.

#include "inkbridge/error.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace inkbridge {

/// Scores are clamped to [score_epsilon, 1 - score_epsilon] before any log.
inline constexpr double score_epsilon = 1e-7;

struct ReconPair {
    std::vector<double> original;
    std::vector<double> reconstruction;
};

/// W x H discriminator probabilities, one per patch.
struct PatchScoreGrid {
    Eigen::MatrixXd scores;

    void validate() const;
};

struct LossWeights {
    double lambda_sup = 1.0;
    double lambda_adv = 1.0;
};

/// Mean absolute elementwise difference.
double l1_mean(const ReconPair &pair);

/// Mean L1 over painting pairs plus mean L1 over poem pairs. A side without
/// pairs contributes 0 and is reported through diag.
double cycle_loss(std::span<const ReconPair> painting_pairs, std::span<const ReconPair> poem_pairs,
                  Diagnostics *diag = nullptr);

/// Mean over paired examples of l1(poem prediction) + l1(painting prediction);
/// element i of both lists belongs to the same example.
double supervised_loss(std::span<const ReconPair> pred_poem_vs_true,
                       std::span<const ReconPair> pred_painting_vs_true);

enum class GeneratorForm {
    /// mean log(1 - D(G(x))), as written in the minimax objective.
    minimax,
    /// -mean log D(G(x)), the non-saturating variant.
    non_saturating,
};

double adv_generator_seq(std::span<const double> fake_scores, GeneratorForm form = GeneratorForm::minimax,
                         Diagnostics *diag = nullptr);

/// mean log(real) + mean log(1 - fake); the value the discriminator maximizes.
double adv_discriminator_seq(std::span<const double> real_scores, std::span<const double> fake_scores,
                             Diagnostics *diag = nullptr);

/// Batch mean over grids of the per-grid mean BCE(s, 1) = -ln s.
double patch_generator_loss(std::span<const PatchScoreGrid> grids, Diagnostics *diag = nullptr);

/// Mean per-grid BCE(s, 1) over real grids plus mean per-grid BCE(s, 0) = -ln(1 - s) over fake grids.
double patch_discriminator_loss(std::span<const PatchScoreGrid> real_grids, std::span<const PatchScoreGrid> fake_grids,
                                Diagnostics *diag = nullptr);

/// cyc + lambda_sup * sup + lambda_adv * (adv_seq + adv_patch).
double full_objective(double cyc, double sup, double adv_seq, double adv_patch, const LossWeights &w);

} // namespace inkbridge
