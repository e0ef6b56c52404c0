#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "homoseg/grid.hpp"

namespace homoseg {

/// Trainable tensors of the segmentation network, flattened.
///
/// conv1_weights is laid out [hidden][in][3][3], conv2_weights is
/// [hidden][3][3]. Gradients and Adam moments reuse this type.
struct ModelParams {
    std::vector<double> conv1_weights;
    std::vector<double> conv1_bias;
    std::vector<double> conv2_weights;
    std::vector<double> conv2_bias;

    static constexpr std::array<std::string_view, 4> kBlockNames = {
        "conv1_weights", "conv1_bias", "conv2_weights", "conv2_bias"};

    static ModelParams zeros(int c_in, int c_hidden);

    std::array<std::span<double>, 4> blocks() {
        return {conv1_weights, conv1_bias, conv2_weights, conv2_bias};
    }
    std::array<std::span<const double>, 4> blocks() const {
        return {conv1_weights, conv1_bias, conv2_weights, conv2_bias};
    }
    std::size_t count() const noexcept {
        return conv1_weights.size() + conv1_bias.size() + conv2_weights.size() + conv2_bias.size();
    }
    bool same_shape(const ModelParams& other) const noexcept;

    /// this += other
    void accumulate(const ModelParams& other);
    void scale(double factor);

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// sigmoid(conv3x3(relu(conv3x3(x)))) with zero "same" padding, so the
/// probability map has the input's spatial size.
struct SegModel {
    int c_in = 3;
    int c_hidden = 8;
    std::uint64_t seed = 0;
    ModelParams params;
    /// Identifies the current parameter values; refreshed by every
    /// update so forward caches can detect staleness. Code that edits
    /// `params` directly must call touch().
    std::uint64_t version = 0;

    void touch();
};

/// Glorot-uniform kernels (bound sqrt(6 / (fan_in + fan_out))), zero biases.
SegModel init_model(std::uint64_t seed, int c_in = 3, int c_hidden = 8);

/// Kernel init bound for a 3x3 convolution with the given channel counts.
double init_bound(int in_channels, int out_channels);

/// Intermediates of one forward pass, consumed by backward().
struct ForwardCache {
    std::uint64_t model_version = 0;
    int c_hidden = 0;
    ImagePatch input;
    std::vector<double> hidden_pre;  ///< conv1 output before ReLU, [hidden][H][W]
    std::vector<double> hidden_act;  ///< after ReLU
    ProbMap prob;
};

ForwardCache forward(const SegModel& model, const ImagePatch& patch);

/// Probability map only.
ProbMap predict(const SegModel& model, const ImagePatch& patch);

/// Parameter gradients given dL/dp for the cached forward pass.
ModelParams backward(const SegModel& model, const ForwardCache& cache, const GradMap& upstream);

struct AdamState {
    ModelParams first_moment;
    ModelParams second_moment;
    std::uint64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

AdamState make_adam_state(const SegModel& model);

/// One bias-corrected Adam update of a flat parameter block. `step` is the
/// 1-based update index used for bias correction.
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> first_moment, std::span<double> second_moment,
                 std::uint64_t step, double alpha, double beta1, double beta2, double epsilon);

/// Applies one Adam update to every block. Throws NumericalError (naming
/// the block) before touching anything if a gradient is nonfinite.
void adam_step(SegModel& model, const ModelParams& grads, AdamState& state, double alpha);

/// Binary checkpoint: header (format version, c_in, c_hidden, seed, Adam
/// step count and hyper-parameters) followed by parameters and both Adam
/// moments as raw little-endian doubles.
void save_checkpoint(const std::filesystem::path& path, const SegModel& model,
                     const AdamState& state);

struct Checkpoint {
    SegModel model;
    AdamState adam;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace homoseg
