#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "homoseg/losses.hpp"
#include "homoseg/metrics.hpp"
#include "homoseg/model.hpp"

namespace homoseg {

enum class TGranularity { step, epoch };
enum class TrainMode { multi_objective, single_objective };

struct TrainConfig {
    int epochs = 100;
    int batch_size = 8;
    std::uint64_t seed = 0;
    LossConfig loss;
    double alpha_start = 1e-5;
    double alpha_end = 1e-5;
    TGranularity t_granularity = TGranularity::step;
    double t_max = 1.0;
    TrainMode mode = TrainMode::multi_objective;
    bool augment = false;

    void validate() const;
};

/// One optimisation step. `t` and `alpha` are the values that step used.
struct HistoryRecord {
    std::int64_t step = 0;
    int epoch = 0;
    double t = 0.0;
    double alpha = 0.0;
    double dice_ce = 0.0;
    double smooth = 0.0;
    double combined = 0.0;
};

struct TrainHistory {
    std::vector<HistoryRecord> records;
    std::vector<double> epoch_seconds;
};

struct TrainResult {
    SegModel model;
    AdamState adam;
    TrainHistory history;
    double final_t = 0.0;      ///< homotopy parameter after the last update
    double final_alpha = 0.0;  ///< learning rate after the last update
};

/// Called after every epoch (1-based) with the current model and optimiser state.
using EpochCallback = std::function<void(int epoch, const SegModel&, const AdamState&)>;

/// epochs * ceil(dataset_size / batch_size)
std::int64_t total_steps(const TrainConfig& config, std::size_t dataset_size);

/// Homotopy training loop. Each step: forward every patch of the batch,
/// evaluate DiceCE and smoothness at the current t, back-propagate the
/// batch-mean combined loss, take an Adam step at the current alpha, then
/// advance alpha and t. The first step runs at t = 0. Batches come from a
/// seeded reshuffle per epoch; the run is a pure function of its inputs.
TrainResult train(const TrainConfig& config, const std::vector<Sample>& train_set, SegModel model,
                  const EpochCallback& on_epoch = {});

/// `step,epoch,t,alpha,dicece,smooth,combined`
void write_history_csv(const std::filesystem::path& path, const TrainHistory& history);

/// Raw sigmoid scores of every pixel of every sample, concatenated, with labels.
struct ScoredPixels {
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
    std::vector<ProbMap> maps;
};

ScoredPixels score_samples(const SegModel& model, const std::vector<Sample>& samples);

/// Forward on every sample, optional min-max normalisation, threshold, and
/// the full metric set aggregated over all pixels.
MetricsReport evaluate(const SegModel& model, const std::vector<Sample>& eval_set, double threshold,
                       const std::optional<ScoreScaler>& scaler = std::nullopt);

/// Full evaluation flow: fit the score scaler on training predictions,
/// pick the EER threshold on the normalised training ROC (unless
/// overridden), then score the held-out set.
struct ProtocolResult {
    MetricsReport report;
    RocCurve eval_roc;
    std::optional<ScoreScaler> scaler;  ///< empty when training scores were constant
    double calibration_eer = 0.0;
    double threshold = 0.5;
    bool threshold_overridden = false;
    /// Mean per-pair smoothness (lambda 1) of the held-out probability maps.
    double mean_smoothness = 0.0;
};

ProtocolResult run_evaluation_protocol(const SegModel& model, const std::vector<Sample>& train_set,
                                       const std::vector<Sample>& eval_set,
                                       std::optional<double> threshold_override = std::nullopt);

}  // namespace homoseg
