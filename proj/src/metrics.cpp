#include "homoseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace homoseg {

ConfusionCounts confusion(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> gt) {
    if (pred.size() != gt.size()) {
        throw ShapeError("confusion: prediction has " + std::to_string(pred.size()) +
                         " pixels, ground truth " + std::to_string(gt.size()));
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] != 0;
        const bool g = gt[i] != 0;
        if (p && g) ++c.tp;
        else if (!p && !g) ++c.tn;
        else if (p) ++c.fp;
        else ++c.fn;
    }
    return c;
}

ConfusionCounts confusion(const LabelMask& pred, const LabelMask& gt) {
    if (!pred.same_shape(gt)) throw ShapeError("confusion: mask dimensions differ");
    return confusion(pred.values(), gt.values());
}

double accuracy(const ConfusionCounts& c) {
    if (c.total() == 0) throw UsageError("accuracy of an empty pixel set");
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

double jaccard(const ConfusionCounts& c) {
    if (c.no_positives()) return 1.0;
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp + c.fn);
}

double dice_score(const ConfusionCounts& c) {
    if (c.no_positives()) return 1.0;
    return 2.0 * static_cast<double>(c.tp) / static_cast<double>(2 * c.tp + c.fp + c.fn);
}

ScoreScaler ScoreScaler::fit(std::span<const double> scores) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double s : scores) {
        if (!std::isfinite(s)) throw ConfigError("cannot fit scaler on nonfinite scores");
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    if (!(hi > lo)) throw ConfigError("cannot fit scaler: fewer than two distinct scores");
    return ScoreScaler{lo, hi};
}

double ScoreScaler::apply(double score) const noexcept {
    return std::clamp((score - min_score) / (max_score - min_score), 0.0, 1.0);
}

std::vector<double> ScoreScaler::apply(std::span<const double> scores) const {
    std::vector<double> out(scores.size());
    std::transform(scores.begin(), scores.end(), out.begin(),
                   [this](double s) { return apply(s); });
    return out;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
    if (scores.size() != labels.size()) throw UsageError("roc: scores and labels differ in length");
    std::uint64_t positives = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw UsageError("roc: nonfinite score");
        if (labels[i]) ++positives;
    }
    const std::uint64_t negatives = scores.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw UsageError("roc: labels must contain both classes");
    }

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    const double top = scores[order.front()];
    curve.points.push_back({std::nextafter(top, std::numeric_limits<double>::infinity()), 0.0, 0.0});
    const auto pos = static_cast<double>(positives);
    const auto neg = static_cast<double>(negatives);
    std::uint64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            if (labels[order[i]]) ++tp;
            else ++fp;
            ++i;
        }
        curve.points.push_back({s, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos});
    }
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        const auto& a = curve.points[k - 1];
        const auto& b = curve.points[k];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr);
    }
    return 0.5 * area;
}

EerResult eer(const RocCurve& curve) {
    if (curve.points.size() < 2) throw UsageError("eer: curve needs at least two points");
    // fpr - fnr is nondecreasing along the curve, from -1 to +1.
    auto gap = [](const RocPoint& p) { return p.fpr - (1.0 - p.tpr); };
    for (std::size_t k = 0; k < curve.points.size(); ++k) {
        const auto& b = curve.points[k];
        const double gb = gap(b);
        if (gb < 0.0) continue;
        if (gb == 0.0 || k == 0) return {b.fpr, b.threshold};
        const auto& a = curve.points[k - 1];
        const double ga = gap(a);
        const double w = -ga / (gb - ga);
        const double rate = a.fpr + w * (b.fpr - a.fpr);
        return {std::clamp(rate, 0.0, 1.0), a.threshold + w * (b.threshold - a.threshold)};
    }
    const auto& last = curve.points.back();
    return {last.fpr, last.threshold};
}

MetricsReport compute_report(std::span<const double> scores, std::span<const std::uint8_t> labels,
                             double threshold) {
    if (scores.size() != labels.size()) throw ShapeError("report: scores and labels differ in length");
    if (scores.empty()) throw UsageError("report: no pixels to evaluate");
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ConfigError("threshold must lie in [0,1], got " + std::to_string(threshold));
    }
    std::vector<std::uint8_t> predicted(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) predicted[i] = scores[i] >= threshold ? 1 : 0;

    MetricsReport report;
    report.counts = confusion(predicted, labels);
    report.accuracy = accuracy(report.counts);
    report.jaccard = jaccard(report.counts);
    report.dice = dice_score(report.counts);
    report.empty_positive_class = report.counts.no_positives();
    report.eer_threshold = threshold;

    const std::uint64_t positives = report.counts.tp + report.counts.fn;
    if (positives == 0 || positives == report.counts.total()) {
        report.roc_defined = false;
        report.roc_auc = std::numeric_limits<double>::quiet_NaN();
        report.eer = std::numeric_limits<double>::quiet_NaN();
    } else {
        const RocCurve curve = roc_curve(scores, labels);
        report.roc_auc = auc(curve);
        report.eer = eer(curve).eer;
    }
    return report;
}

}  // namespace homoseg
