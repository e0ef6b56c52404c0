#pragma once

#include "homoseg/grid.hpp"

namespace homoseg {

/// Weights and numerical guards for the segmentation objectives.
struct LossConfig {
    double beta = 0.5;           ///< Dice weight in DiceCE; CE gets 1 - beta.
    double lambda_smooth = 1.0;  ///< Scale of the total-variation term.
    double epsilon = 1e-6;       ///< Dice numerator/denominator offset.
    double clamp = 1e-7;         ///< CE log arguments are clamped to [clamp, 1 - clamp].
    /// Divide the smoothness sum by the number of 4-neighbour pairs.
    bool normalize_smooth = false;

    /// Throws ConfigError on out-of-range fields.
    void validate() const;
};

/// 1 - (2 sum(p g) + eps) / (sum(p) + sum(g) + eps).
double dice_loss(const ProbMap& pred, const LabelMask& gt, double epsilon);

/// Mean binary cross-entropy on clamped probabilities.
double ce_loss(const ProbMap& pred, const LabelMask& gt, double clamp);

/// beta * Dice + (1 - beta) * CE.
double dice_ce_loss(const ProbMap& pred, const LabelMask& gt, const LossConfig& cfg);

/// lambda * sum of |p_a - p_b| over vertically and horizontally adjacent
/// pixel pairs. With `normalize` the sum is divided by the pair count.
double smoothness_loss(const ProbMap& pred, double lambda_smooth, bool normalize = false);

/// Number of 4-neighbour pairs in a width x height grid.
std::size_t adjacent_pair_count(int width, int height) noexcept;

/// (1 - t) * DiceCE + t * smooth. Throws ConfigError when t is outside [0,1].
double combined_loss(const ProbMap& pred, const LabelMask& gt, double t, const LossConfig& cfg);

/// d(combined_loss)/d(pred) at every pixel.
GradMap loss_gradients(const ProbMap& pred, const LabelMask& gt, double t, const LossConfig& cfg);

/// All loss components and the gradient from a single pass; used by the trainer.
struct LossEvaluation {
    double dice = 0.0;
    double ce = 0.0;
    double dice_ce = 0.0;
    double smooth = 0.0;
    double combined = 0.0;
    GradMap grad;
};

LossEvaluation evaluate_losses(const ProbMap& pred, const LabelMask& gt, double t,
                               const LossConfig& cfg);

}  // namespace homoseg
