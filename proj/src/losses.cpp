#include "homoseg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace homoseg {

namespace {

void check_inputs(const ProbMap& pred, const LabelMask& gt) {
    if (!pred.same_shape(gt)) {
        throw ShapeError("prediction is " + std::to_string(pred.width()) + "x" +
                         std::to_string(pred.height()) + " but mask is " +
                         std::to_string(gt.width()) + "x" + std::to_string(gt.height()));
    }
    validate_prob_map(pred);
    validate_label_mask(gt);
}

void check_t(double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw ConfigError("homotopy parameter t must lie in [0,1], got " + std::to_string(t));
    }
}

double sign(double x) noexcept { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double dice_unchecked(const ProbMap& pred, const LabelMask& gt, double epsilon) {
    double overlap = 0.0, pred_sum = 0.0, gt_sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        overlap += pred[i] * gt[i];
        pred_sum += pred[i];
        gt_sum += gt[i];
    }
    return 1.0 - (2.0 * overlap + epsilon) / (pred_sum + gt_sum + epsilon);
}

double ce_unchecked(const ProbMap& pred, const LabelMask& gt, double clamp) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = std::clamp(pred[i], clamp, 1.0 - clamp);
        sum += gt[i] ? std::log(p) : std::log(1.0 - p);
    }
    return -sum / static_cast<double>(pred.size());
}

double smooth_unchecked(const ProbMap& pred, double lambda_smooth, bool normalize) {
    const int rows = pred.height();
    const int cols = pred.width();
    double total = 0.0;
    for (int i = 0; i + 1 < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            total += std::abs(pred.at(i, j) - pred.at(i + 1, j));
        }
    }
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j + 1 < cols; ++j) {
            total += std::abs(pred.at(i, j) - pred.at(i, j + 1));
        }
    }
    if (normalize) {
        const std::size_t pairs = adjacent_pair_count(cols, rows);
        if (pairs == 0) return 0.0;
        total /= static_cast<double>(pairs);
    }
    return lambda_smooth * total;
}

double blend(double dice_ce, double smooth, double t) noexcept {
    return (1.0 - t) * dice_ce + t * smooth;
}

}  // namespace

void LossConfig::validate() const {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw ConfigError("beta must lie in [0,1], got " + std::to_string(beta));
    }
    if (!(lambda_smooth >= 0.0) || !std::isfinite(lambda_smooth)) {
        throw ConfigError("lambda_smooth must be finite and >= 0, got " + std::to_string(lambda_smooth));
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw ConfigError("epsilon must be finite and > 0, got " + std::to_string(epsilon));
    }
    if (!(clamp > 0.0 && clamp < 0.5)) {
        throw ConfigError("clamp must lie in (0, 0.5), got " + std::to_string(clamp));
    }
}

std::size_t adjacent_pair_count(int width, int height) noexcept {
    if (width < 1 || height < 1) return 0;
    const auto w = static_cast<std::size_t>(width);
    const auto h = static_cast<std::size_t>(height);
    return (h - 1) * w + h * (w - 1);
}

double dice_loss(const ProbMap& pred, const LabelMask& gt, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw ConfigError("dice epsilon must be > 0, got " + std::to_string(epsilon));
    }
    check_inputs(pred, gt);
    return dice_unchecked(pred, gt, epsilon);
}

double ce_loss(const ProbMap& pred, const LabelMask& gt, double clamp) {
    if (!(clamp > 0.0 && clamp < 0.5)) {
        throw ConfigError("clamp must lie in (0, 0.5), got " + std::to_string(clamp));
    }
    check_inputs(pred, gt);
    return ce_unchecked(pred, gt, clamp);
}

double dice_ce_loss(const ProbMap& pred, const LabelMask& gt, const LossConfig& cfg) {
    cfg.validate();
    check_inputs(pred, gt);
    return cfg.beta * dice_unchecked(pred, gt, cfg.epsilon) +
           (1.0 - cfg.beta) * ce_unchecked(pred, gt, cfg.clamp);
}

double smoothness_loss(const ProbMap& pred, double lambda_smooth, bool normalize) {
    if (!(lambda_smooth >= 0.0)) {
        throw ConfigError("lambda_smooth must be >= 0, got " + std::to_string(lambda_smooth));
    }
    if (pred.empty()) throw ShapeError("empty prediction map");
    validate_prob_map(pred);
    return smooth_unchecked(pred, lambda_smooth, normalize);
}

double combined_loss(const ProbMap& pred, const LabelMask& gt, double t, const LossConfig& cfg) {
    check_t(t);
    return blend(dice_ce_loss(pred, gt, cfg),
                 smoothness_loss(pred, cfg.lambda_smooth, cfg.normalize_smooth), t);
}

LossEvaluation evaluate_losses(const ProbMap& pred, const LabelMask& gt, double t,
                               const LossConfig& cfg) {
    check_t(t);
    cfg.validate();
    check_inputs(pred, gt);

    LossEvaluation out;
    out.dice = dice_unchecked(pred, gt, cfg.epsilon);
    out.ce = ce_unchecked(pred, gt, cfg.clamp);
    out.dice_ce = cfg.beta * out.dice + (1.0 - cfg.beta) * out.ce;
    out.smooth = smooth_unchecked(pred, cfg.lambda_smooth, cfg.normalize_smooth);
    out.combined = blend(out.dice_ce, out.smooth, t);

    const std::size_t n = pred.size();
    const int rows = pred.height();
    const int cols = pred.width();

    double overlap = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        overlap += pred[i] * gt[i];
        mass += pred[i] + gt[i];
    }
    const double numer = 2.0 * overlap + cfg.epsilon;
    const double denom = mass + cfg.epsilon;
    const double inv_n = 1.0 / static_cast<double>(n);

    // Pixel-wise terms first; smoothness pairs are scattered afterwards.
    GradMap grad(cols, rows, 0.0);
    const double w_dice = (1.0 - t) * cfg.beta;
    const double w_ce = (1.0 - t) * (1.0 - cfg.beta);
    for (std::size_t i = 0; i < n; ++i) {
        const double g = gt[i];
        const double d_dice = -(2.0 * g * denom - numer) / (denom * denom);
        const double p = pred[i];
        double d_ce = 0.0;
        if (p >= cfg.clamp && p <= 1.0 - cfg.clamp) {
            d_ce = -inv_n * (g / p - (1.0 - g) / (1.0 - p));
        }
        grad[i] = w_dice * d_dice + w_ce * d_ce;
    }

    double pair_weight = t * cfg.lambda_smooth;
    if (cfg.normalize_smooth) {
        const std::size_t pairs = adjacent_pair_count(cols, rows);
        pair_weight = pairs == 0 ? 0.0 : pair_weight / static_cast<double>(pairs);
    }
    if (pair_weight != 0.0) {
        for (int i = 0; i + 1 < rows; ++i) {
            for (int j = 0; j < cols; ++j) {
                const double s = pair_weight * sign(pred.at(i, j) - pred.at(i + 1, j));
                grad.at(i, j) += s;
                grad.at(i + 1, j) -= s;
            }
        }
        for (int i = 0; i < rows; ++i) {
            for (int j = 0; j + 1 < cols; ++j) {
                const double s = pair_weight * sign(pred.at(i, j) - pred.at(i, j + 1));
                grad.at(i, j) += s;
                grad.at(i, j + 1) -= s;
            }
        }
    }
    out.grad = std::move(grad);
    return out;
}

GradMap loss_gradients(const ProbMap& pred, const LabelMask& gt, double t, const LossConfig& cfg) {
    return evaluate_losses(pred, gt, t, cfg).grad;
}

}  // namespace homoseg
