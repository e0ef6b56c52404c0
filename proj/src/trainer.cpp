#include "homoseg/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "homoseg/report.hpp"
#include "homoseg/rng.hpp"
#include "homoseg/schedule.hpp"
#include "homoseg/synthdata.hpp"

namespace homoseg {

namespace {

constexpr std::uint64_t kShuffleStream = 0x5348554646ULL;
constexpr std::uint64_t kAugmentStream = 0x4155474dULL;

void check_dataset(const std::vector<Sample>& set, const char* what) {
    if (set.empty()) throw UsageError(std::string(what) + " is empty");
    const auto& first = set.front();
    for (const auto& s : set) {
        if (s.image.width() != first.image.width() || s.image.height() != first.image.height() ||
            s.image.channels() != first.image.channels()) {
            throw UsageError(std::string(what) + ": patches differ in dimensions");
        }
        if (s.mask.width() != s.image.width() || s.mask.height() != s.image.height()) {
            throw ShapeError(std::string(what) + ": mask and image dimensions differ");
        }
    }
}

}  // namespace

void TrainConfig::validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1, got " + std::to_string(epochs));
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(alpha_start > 0.0) || !(alpha_end > 0.0)) throw ConfigError("learning rates must be > 0");
    if (!(t_max >= 0.0 && t_max <= 1.0)) throw ConfigError("t_max must lie in [0,1]");
    loss.validate();
}

std::int64_t total_steps(const TrainConfig& config, std::size_t dataset_size) {
    const auto per_epoch = static_cast<std::int64_t>(
        (dataset_size + static_cast<std::size_t>(config.batch_size) - 1) / config.batch_size);
    return static_cast<std::int64_t>(config.epochs) * per_epoch;
}

TrainResult train(const TrainConfig& config, const std::vector<Sample>& train_set, SegModel model,
                  const EpochCallback& on_epoch) {
    config.validate();
    check_dataset(train_set, "training set");
    if (train_set.front().image.channels() != model.c_in) {
        throw ShapeError("training patches do not match the model's input channels");
    }

    const std::size_t n = train_set.size();
    const std::int64_t steps_per_epoch =
        static_cast<std::int64_t>((n + config.batch_size - 1) / config.batch_size);
    const std::int64_t total = total_steps(config, n);
    const bool single = config.mode == TrainMode::single_objective;
    const double t_max = single ? 0.0 : config.t_max;

    HomotopyState schedule = HomotopyState::start(total, config.alpha_start, config.alpha_end, t_max);
    AdamState adam = make_adam_state(model);
    TrainHistory history;
    history.records.reserve(static_cast<std::size_t>(total));
    double t_current = 0.0;
    std::int64_t global_step = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto epoch_start = std::chrono::steady_clock::now();
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle_rng(derive_seed(config.seed ^ kShuffleStream, static_cast<std::uint64_t>(epoch)));
        shuffle(std::span<std::size_t>(order), shuffle_rng);

        for (std::int64_t b = 0; b < steps_per_epoch; ++b) {
            ++global_step;
            const std::size_t begin = static_cast<std::size_t>(b) * config.batch_size;
            const std::size_t end = std::min(n, begin + static_cast<std::size_t>(config.batch_size));
            const double t_used = t_current;
            const double alpha_used = schedule.alpha;

            ModelParams grads = ModelParams::zeros(model.c_in, model.c_hidden);
            double sum_dice_ce = 0.0, sum_smooth = 0.0, sum_combined = 0.0;
            for (std::size_t k = begin; k < end; ++k) {
                const Sample* sample = &train_set[order[k]];
                Sample augmented;
                if (config.augment) {
                    const std::uint64_t tag = (static_cast<std::uint64_t>(global_step) << 20) ^ (k - begin);
                    augmented = augment(*sample, derive_seed(config.seed ^ kAugmentStream, tag));
                    sample = &augmented;
                }
                const ForwardCache cache = forward(model, sample->image);
                for (double v : cache.prob.values()) {
                    if (!std::isfinite(v)) {
                        throw NumericalError("nonfinite prediction at step " + std::to_string(global_step));
                    }
                }
                const LossEvaluation ev = evaluate_losses(cache.prob, sample->mask, t_used, config.loss);
                sum_dice_ce += ev.dice_ce;
                sum_smooth += ev.smooth;
                sum_combined += ev.combined;
                grads.accumulate(backward(model, cache, ev.grad));
            }
            const double batch = static_cast<double>(end - begin);
            HistoryRecord rec{global_step, epoch,          t_used,           alpha_used,
                              sum_dice_ce / batch, sum_smooth / batch, sum_combined / batch};
            if (!std::isfinite(rec.combined) || !std::isfinite(rec.dice_ce) || !std::isfinite(rec.smooth)) {
                throw NumericalError("nonfinite loss at step " + std::to_string(global_step) +
                                     ": dicece=" + std::to_string(rec.dice_ce) +
                                     " smooth=" + std::to_string(rec.smooth) +
                                     " combined=" + std::to_string(rec.combined));
            }
            grads.scale(1.0 / batch);
            adam_step(model, grads, adam, alpha_used);
            history.records.push_back(rec);

            schedule.advance_to(global_step);
            if (config.t_granularity == TGranularity::step) t_current = schedule.t;
        }
        if (config.t_granularity == TGranularity::epoch) {
            t_current = homotopy_t(epoch, config.epochs, t_max);
        }
        history.epoch_seconds.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count());
        if (on_epoch) on_epoch(epoch, model, adam);
    }

    TrainResult result{std::move(model), std::move(adam), std::move(history), t_current,
                       schedule.alpha};
    return result;
}

void write_history_csv(const std::filesystem::path& path, const TrainHistory& history) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write history CSV: " + path.string());
    out << "step,epoch,t,alpha,dicece,smooth,combined\n";
    for (const auto& r : history.records) {
        out << r.step << ',' << r.epoch << ',' << format_double(r.t) << ',' << format_double(r.alpha)
            << ',' << format_double(r.dice_ce) << ',' << format_double(r.smooth) << ','
            << format_double(r.combined) << '\n';
    }
    if (!out) throw IoError("failed writing history CSV: " + path.string());
}

ScoredPixels score_samples(const SegModel& model, const std::vector<Sample>& samples) {
    ScoredPixels out;
    std::size_t total = 0;
    for (const auto& s : samples) total += s.mask.size();
    out.scores.reserve(total);
    out.labels.reserve(total);
    out.maps.reserve(samples.size());
    for (const auto& s : samples) {
        ProbMap p = predict(model, s.image);
        if (!p.same_shape(s.mask)) throw ShapeError("prediction and mask dimensions differ");
        out.scores.insert(out.scores.end(), p.values().begin(), p.values().end());
        out.labels.insert(out.labels.end(), s.mask.values().begin(), s.mask.values().end());
        out.maps.push_back(std::move(p));
    }
    return out;
}

MetricsReport evaluate(const SegModel& model, const std::vector<Sample>& eval_set, double threshold,
                       const std::optional<ScoreScaler>& scaler) {
    check_dataset(eval_set, "evaluation set");
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ConfigError("threshold must lie in [0,1], got " + std::to_string(threshold));
    }
    ScoredPixels scored = score_samples(model, eval_set);
    if (scaler) scored.scores = scaler->apply(scored.scores);
    return compute_report(scored.scores, scored.labels, threshold);
}

ProtocolResult run_evaluation_protocol(const SegModel& model, const std::vector<Sample>& train_set,
                                       const std::vector<Sample>& eval_set,
                                       std::optional<double> threshold_override) {
    check_dataset(train_set, "training set");
    check_dataset(eval_set, "evaluation set");
    ProtocolResult out;

    ScoredPixels train_scored = score_samples(model, train_set);
    try {
        out.scaler = ScoreScaler::fit(train_scored.scores);
    } catch (const ConfigError&) {
        out.scaler.reset();  // constant predictor: scores already lie in [0,1]
    }
    std::vector<double> train_scores =
        out.scaler ? out.scaler->apply(train_scored.scores) : std::move(train_scored.scores);

    try {
        const EerResult cal = eer(roc_curve(train_scores, train_scored.labels));
        out.calibration_eer = cal.eer;
        out.threshold = std::clamp(cal.threshold, 0.0, 1.0);
    } catch (const UsageError&) {
        out.calibration_eer = std::numeric_limits<double>::quiet_NaN();
        out.threshold = 0.5;
    }
    if (threshold_override) {
        out.threshold = *threshold_override;
        out.threshold_overridden = true;
    }

    ScoredPixels eval_scored = score_samples(model, eval_set);
    double smooth_sum = 0.0;
    for (const auto& map : eval_scored.maps) smooth_sum += smoothness_loss(map, 1.0, true);
    out.mean_smoothness = smooth_sum / static_cast<double>(eval_scored.maps.size());

    std::vector<double> eval_scores =
        out.scaler ? out.scaler->apply(eval_scored.scores) : std::move(eval_scored.scores);
    out.report = compute_report(eval_scores, eval_scored.labels, out.threshold);
    if (out.report.roc_defined) out.eval_roc = roc_curve(eval_scores, eval_scored.labels);
    return out;
}

}  // namespace homoseg
