#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "homoseg/grid.hpp"

namespace homoseg {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
    /// Neither the prediction nor the ground truth contains a positive pixel.
    bool no_positives() const noexcept { return tp + fp + fn == 0; }

    ConfusionCounts& operator+=(const ConfusionCounts& other) noexcept {
        tp += other.tp;
        tn += other.tn;
        fp += other.fp;
        fn += other.fn;
        return *this;
    }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const LabelMask& pred, const LabelMask& gt);
ConfusionCounts confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt);

/// (tp + tn) / total. Throws UsageError on zero pixels.
double accuracy(const ConfusionCounts& c);
/// tp / (tp + fp + fn); 1.0 when no_positives().
double jaccard(const ConfusionCounts& c);
/// 2 tp / (2 tp + fp + fn); 1.0 when no_positives().
double dice_score(const ConfusionCounts& c);

/// Min-max normalisation fitted on reference scores, clipped on apply.
struct ScoreScaler {
    double min_score = 0.0;
    double max_score = 1.0;

    /// Throws ConfigError unless `scores` holds at least two distinct finite values.
    static ScoreScaler fit(std::span<const double> scores);
    double apply(double score) const noexcept;
    std::vector<double> apply(std::span<const double> scores) const;
};

struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

/// Points ordered by decreasing threshold. The first point uses a sentinel
/// threshold just above the largest score and sits at (0,0); one point
/// follows per distinct score, the last at (1,1). A point predicts
/// positive iff score >= threshold.
struct RocCurve {
    std::vector<RocPoint> points;
};

/// Throws UsageError when labels hold a single class or sizes differ.
RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

struct EerResult {
    double eer = 0.0;
    double threshold = 0.0;
};

/// Equal error rate: the point where fpr equals fnr = 1 - tpr, linearly
/// interpolated (rate and threshold) between the bracketing curve points.
EerResult eer(const RocCurve& curve);

/// The metric row of the evaluation table plus raw pixel counts.
struct MetricsReport {
    double accuracy = 0.0;
    double jaccard = 0.0;
    double dice = 0.0;
    double roc_auc = 0.0;
    double eer = 0.0;
    double eer_threshold = 0.0;
    ConfusionCounts counts;
    /// jaccard/dice fell back to 1.0 because no positives exist.
    bool empty_positive_class = false;
    /// False when the labels hold one class; roc_auc and eer are then NaN.
    bool roc_defined = true;
};

/// Thresholds `scores` at `threshold` (positive iff score >= threshold)
/// and fills every field; eer/roc_auc come from the ROC over `scores`,
/// eer_threshold records `threshold` itself.
MetricsReport compute_report(std::span<const double> scores, std::span<const std::uint8_t> labels,
                             double threshold);

}  // namespace homoseg
