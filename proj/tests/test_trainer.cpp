#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "homoseg/errors.hpp"
#include "homoseg/metrics.hpp"
#include "homoseg/rng.hpp"
#include "homoseg/schedule.hpp"
#include "homoseg/synthdata.hpp"
#include "homoseg/trainer.hpp"

using namespace homoseg;

namespace {

std::vector<Sample> random_samples(std::uint64_t seed, int n, int size = 8) {
    Rng rng(seed);
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
        Sample s{ImagePatch(size, size, 3), LabelMask(size, size)};
        for (auto& v : s.image.values()) v = uniform01(rng);
        for (auto& v : s.mask.values()) v = uniform01(rng) < 0.5 ? 1 : 0;
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<Sample> scene_samples(std::uint64_t seed, int patch = 16) {
    SceneSpec spec;
    spec.width = 96;
    spec.height = 96;
    spec.texture_seed = seed;
    spec.fence_lines = 1;
    const Scene scene = generate_scene(spec);
    return tile_patches(scene.image, scene.mask, patch);
}

TrainConfig small_config() {
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.batch_size = 3;
    cfg.seed = 17;
    cfg.alpha_start = 1e-2;
    cfg.alpha_end = 1e-3;
    cfg.loss.normalize_smooth = true;
    cfg.t_max = 0.5;
    return cfg;
}

}  // namespace

TEST(TrainConfig, RejectsZeroEpochs) {
    TrainConfig cfg;
    cfg.epochs = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_THROW(train(cfg, random_samples(1, 2), init_model(0)), ConfigError);
}

TEST(Train, SingleFullBatchEpochIsOneStep) {
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.batch_size = 5;
    cfg.t_max = 0.8;
    const auto res = train(cfg, random_samples(2, 5), init_model(0));
    ASSERT_EQ(res.history.records.size(), 1u);
    EXPECT_EQ(res.history.records[0].t, 0.0);
    EXPECT_EQ(res.final_t, 0.8);
    EXPECT_EQ(res.adam.step_count, 1u);
    EXPECT_EQ(res.history.epoch_seconds.size(), 1u);
}

TEST(Train, StepCountAndScheduleColumns) {
    const TrainConfig cfg = small_config();
    const auto data = random_samples(3, 7);
    const auto res = train(cfg, data, init_model(1));
    const std::int64_t T = total_steps(cfg, data.size());
    EXPECT_EQ(T, 2 * 3);
    ASSERT_EQ(res.history.records.size(), static_cast<std::size_t>(T));
    double prev = -1.0;
    for (std::size_t i = 0; i < res.history.records.size(); ++i) {
        const auto& r = res.history.records[i];
        EXPECT_EQ(r.step, static_cast<std::int64_t>(i) + 1);
        EXPECT_EQ(r.epoch, static_cast<int>(i) / 3 + 1);
        EXPECT_EQ(r.t, homotopy_t(r.step - 1, T, cfg.t_max));
        EXPECT_EQ(r.alpha, linear_lr(cfg.alpha_start, cfg.alpha_end, T, r.step - 1));
        EXPECT_GE(r.t, prev);
        prev = r.t;
    }
    EXPECT_EQ(res.final_t, cfg.t_max);
    EXPECT_EQ(res.final_alpha, cfg.alpha_end);
}

TEST(Train, FirstRecordIsPureDiceCe) {
    const auto res = train(small_config(), random_samples(4, 6), init_model(2));
    EXPECT_EQ(res.history.records.front().combined, res.history.records.front().dice_ce);
}

TEST(Train, AffineBlendAuditEveryStep) {
    TrainConfig cfg = small_config();
    cfg.t_max = 1.0;
    const auto res = train(cfg, random_samples(5, 9), init_model(3));
    for (const auto& r : res.history.records) {
        EXPECT_LE(std::abs(r.combined - ((1 - r.t) * r.dice_ce + r.t * r.smooth)), 1e-10) << "step " << r.step;
    }
}

TEST(Train, SingleObjectiveKeepsTZero) {
    TrainConfig cfg = small_config();
    cfg.mode = TrainMode::single_objective;
    const auto res = train(cfg, random_samples(6, 7), init_model(4));
    for (const auto& r : res.history.records) {
        EXPECT_EQ(r.t, 0.0);
        EXPECT_EQ(r.combined, r.dice_ce);
    }
    EXPECT_EQ(res.final_t, 0.0);
}

TEST(Train, SingleObjectiveEqualsZeroTMax) {
    TrainConfig single = small_config();
    single.mode = TrainMode::single_objective;
    TrainConfig multi = small_config();
    multi.t_max = 0.0;
    const auto data = random_samples(7, 8);
    const auto a = train(single, data, init_model(5));
    const auto b = train(multi, data, init_model(5));
    EXPECT_EQ(a.model.params, b.model.params);
    EXPECT_EQ(a.adam.first_moment, b.adam.first_moment);
}

TEST(Train, SeededRunIsBitReproducible) {
    TrainConfig cfg = small_config();
    cfg.augment = true;
    const auto data = scene_samples(8);
    const auto a = train(cfg, data, init_model(6));
    const auto b = train(cfg, data, init_model(6));
    EXPECT_EQ(a.model.params, b.model.params);
    ASSERT_EQ(a.history.records.size(), b.history.records.size());
    for (std::size_t i = 0; i < a.history.records.size(); ++i) {
        EXPECT_EQ(a.history.records[i].combined, b.history.records[i].combined);
        EXPECT_EQ(a.history.records[i].smooth, b.history.records[i].smooth);
    }
}

TEST(Train, DifferentSeedsShuffleDifferently) {
    TrainConfig cfg = small_config();
    const auto data = random_samples(9, 9);
    const auto a = train(cfg, data, init_model(7));
    cfg.seed = 18;
    const auto b = train(cfg, data, init_model(7));
    EXPECT_NE(a.model.params, b.model.params);
}

TEST(Train, EpochGranularityHoldsTWithinEpoch) {
    TrainConfig cfg = small_config();
    cfg.epochs = 4;
    cfg.t_granularity = TGranularity::epoch;
    const auto res = train(cfg, random_samples(10, 6), init_model(8));
    for (const auto& r : res.history.records) EXPECT_EQ(r.t, homotopy_t(r.epoch - 1, 4, cfg.t_max));
    EXPECT_EQ(res.final_t, cfg.t_max);
}

TEST(Train, EpochCallbackFiresOncePerEpoch) {
    TrainConfig cfg = small_config();
    cfg.epochs = 3;
    std::vector<int> seen;
    std::vector<std::uint64_t> steps;
    train(cfg, random_samples(11, 4), init_model(9), [&](int e, const SegModel&, const AdamState& a) {
        seen.push_back(e);
        steps.push_back(a.step_count);
    });
    EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(steps, (std::vector<std::uint64_t>{2, 4, 6}));
}

TEST(Train, EmptyDatasetIsUsageError) {
    EXPECT_THROW(train(small_config(), {}, init_model(0)), UsageError);
}

TEST(Train, MixedPatchSizesRejected) {
    auto data = random_samples(12, 2, 8);
    auto more = random_samples(13, 1, 6);
    data.push_back(more.front());
    EXPECT_THROW(train(small_config(), data, init_model(0)), UsageError);
}

TEST(Train, NonfiniteLossAborts) {
    SegModel m = init_model(0);
    m.params.conv2_bias[0] = std::nan("");
    m.touch();
    try {
        train(small_config(), random_samples(14, 3), m);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos);
    }
}

TEST(Train, LearningImprovesDiceOnTrainingPatches) {
    const auto data = scene_samples(20);
    TrainConfig cfg;
    cfg.epochs = 25;
    cfg.batch_size = 6;
    cfg.seed = 3;
    cfg.alpha_start = 2e-2;
    cfg.alpha_end = 2e-3;
    cfg.mode = TrainMode::single_objective;
    const SegModel untrained = init_model(11);
    const auto res = train(cfg, data, untrained);
    const double before = evaluate(untrained, data, 0.5).dice;
    const double after = evaluate(res.model, data, 0.5).dice;
    EXPECT_GT(after, before);
    EXPECT_GT(after, 0.8);
}

TEST(Evaluate, ConstantHalfModelPredictsAllGrass) {
    SegModel m = init_model(0);
    for (auto block : m.params.blocks()) std::fill(block.begin(), block.end(), 0.0);
    m.touch();
    const auto data = random_samples(15, 4);
    std::size_t grass = 0, total = 0;
    for (const auto& s : data) {
        for (auto v : s.mask.values()) grass += v;
        total += s.mask.size();
    }
    const MetricsReport r = evaluate(m, data, 0.4);
    EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(grass) / static_cast<double>(total));
    EXPECT_EQ(r.counts.tn + r.counts.fn, 0u);
    EXPECT_DOUBLE_EQ(r.roc_auc, 0.5);
    EXPECT_DOUBLE_EQ(r.eer, 0.5);
}

TEST(Evaluate, RejectsEmptySetAndBadThreshold) {
    EXPECT_THROW(evaluate(init_model(0), {}, 0.5), UsageError);
    EXPECT_THROW(evaluate(init_model(0), random_samples(1, 1), 1.5), ConfigError);
}

TEST(EvaluationProtocol, ThresholdOverrideIsUsed) {
    const auto data = scene_samples(21);
    const SegModel m = init_model(4);
    const auto res = run_evaluation_protocol(m, data, data, 0.74);
    EXPECT_TRUE(res.threshold_overridden);
    EXPECT_EQ(res.threshold, 0.74);
    EXPECT_EQ(res.report.eer_threshold, 0.74);
}

TEST(EvaluationProtocol, CalibratedThresholdComesFromTrainingRoc) {
    const auto train_set = scene_samples(22);
    const auto eval_set = scene_samples(23);
    const SegModel m = init_model(5);
    const auto res = run_evaluation_protocol(m, train_set, eval_set);
    ASSERT_TRUE(res.scaler.has_value());
    const ScoredPixels scored = score_samples(m, train_set);
    const auto curve = roc_curve(res.scaler->apply(scored.scores), scored.labels);
    const EerResult e = eer(curve);
    EXPECT_FALSE(res.threshold_overridden);
    EXPECT_EQ(res.threshold, e.threshold);
    EXPECT_EQ(res.calibration_eer, e.eer);
    EXPECT_GE(res.mean_smoothness, 0.0);
}

TEST(EvaluationProtocol, ConstantModelFallsBackToIdentityScaling) {
    SegModel m = init_model(0);
    for (auto block : m.params.blocks()) std::fill(block.begin(), block.end(), 0.0);
    m.touch();
    const auto data = scene_samples(24);
    const auto res = run_evaluation_protocol(m, data, data);
    EXPECT_FALSE(res.scaler.has_value());
    EXPECT_DOUBLE_EQ(res.report.roc_auc, 0.5);
    EXPECT_DOUBLE_EQ(res.report.eer, 0.5);
    EXPECT_EQ(res.mean_smoothness, 0.0);
}

TEST(HistoryCsv, HeaderAndRowCount) {
    const auto res = train(small_config(), random_samples(16, 5), init_model(0));
    const auto path = std::filesystem::temp_directory_path() / "homoseg_history_test.csv";
    write_history_csv(path, res.history);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "step,epoch,t,alpha,dicece,smooth,combined");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, res.history.records.size());
    std::filesystem::remove(path);
}
