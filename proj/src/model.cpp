#include "homoseg/model.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "homoseg/rng.hpp"

namespace homoseg {

namespace {

std::uint64_t next_version() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

constexpr int kKernel = 3;
constexpr int kTaps = kKernel * kKernel;

// out[r][c] += w * in[r + dy][c + dx] over the valid (zero-padded) region.
void add_shifted(std::span<double> out, std::span<const double> in, int width, int height,
                 int dy, int dx, double w) {
    const int r0 = std::max(0, -dy), r1 = std::min(height, height - dy);
    const int c0 = std::max(0, -dx), c1 = std::min(width, width - dx);
    for (int r = r0; r < r1; ++r) {
        double* dst = out.data() + static_cast<std::size_t>(r) * width;
        const double* src = in.data() + static_cast<std::size_t>(r + dy) * width + dx;
        for (int c = c0; c < c1; ++c) dst[c] += w * src[c];
    }
}

// sum over r, c of a[r][c] * b[r + dy][c + dx]
double shifted_dot(std::span<const double> a, std::span<const double> b, int width, int height,
                   int dy, int dx) {
    const int r0 = std::max(0, -dy), r1 = std::min(height, height - dy);
    const int c0 = std::max(0, -dx), c1 = std::min(width, width - dx);
    double sum = 0.0;
    for (int r = r0; r < r1; ++r) {
        const double* pa = a.data() + static_cast<std::size_t>(r) * width;
        const double* pb = b.data() + static_cast<std::size_t>(r + dy) * width + dx;
        for (int c = c0; c < c1; ++c) sum += pa[c] * pb[c];
    }
    return sum;
}

// out[r + dy][c + dx] += w * in[r][c]
void scatter_shifted(std::span<double> out, std::span<const double> in, int width, int height,
                     int dy, int dx, double w) {
    const int r0 = std::max(0, -dy), r1 = std::min(height, height - dy);
    const int c0 = std::max(0, -dx), c1 = std::min(width, width - dx);
    for (int r = r0; r < r1; ++r) {
        const double* src = in.data() + static_cast<std::size_t>(r) * width;
        double* dst = out.data() + static_cast<std::size_t>(r + dy) * width + dx;
        for (int c = c0; c < c1; ++c) dst[c] += w * src[c];
    }
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

ModelParams ModelParams::zeros(int c_in, int c_hidden) {
    ModelParams p;
    p.conv1_weights.assign(static_cast<std::size_t>(c_hidden) * c_in * kTaps, 0.0);
    p.conv1_bias.assign(c_hidden, 0.0);
    p.conv2_weights.assign(static_cast<std::size_t>(c_hidden) * kTaps, 0.0);
    p.conv2_bias.assign(1, 0.0);
    return p;
}

bool ModelParams::same_shape(const ModelParams& other) const noexcept {
    return conv1_weights.size() == other.conv1_weights.size() &&
           conv1_bias.size() == other.conv1_bias.size() &&
           conv2_weights.size() == other.conv2_weights.size() &&
           conv2_bias.size() == other.conv2_bias.size();
}

void ModelParams::accumulate(const ModelParams& other) {
    if (!same_shape(other)) throw ShapeError("parameter blocks differ in shape");
    auto dst = blocks();
    auto src = other.blocks();
    for (std::size_t b = 0; b < dst.size(); ++b) {
        for (std::size_t i = 0; i < dst[b].size(); ++i) dst[b][i] += src[b][i];
    }
}

void ModelParams::scale(double factor) {
    for (auto block : blocks()) {
        for (double& v : block) v *= factor;
    }
}

void SegModel::touch() { version = next_version(); }

double init_bound(int in_channels, int out_channels) {
    const double fan_in = static_cast<double>(in_channels) * kTaps;
    const double fan_out = static_cast<double>(out_channels) * kTaps;
    return std::sqrt(6.0 / (fan_in + fan_out));
}

SegModel init_model(std::uint64_t seed, int c_in, int c_hidden) {
    if (c_in < 1 || c_hidden < 1) throw ConfigError("channel counts must be >= 1");
    SegModel model;
    model.c_in = c_in;
    model.c_hidden = c_hidden;
    model.seed = seed;
    model.params = ModelParams::zeros(c_in, c_hidden);

    Rng rng(seed);
    const double a1 = init_bound(c_in, c_hidden);
    for (double& w : model.params.conv1_weights) w = a1 * (2.0 * uniform01(rng) - 1.0);
    const double a2 = init_bound(c_hidden, 1);
    for (double& w : model.params.conv2_weights) w = a2 * (2.0 * uniform01(rng) - 1.0);
    model.touch();
    return model;
}

ForwardCache forward(const SegModel& model, const ImagePatch& patch) {
    if (patch.channels() != model.c_in) {
        throw ShapeError("patch has " + std::to_string(patch.channels()) +
                         " channels but the model expects " + std::to_string(model.c_in));
    }
    const int width = patch.width();
    const int height = patch.height();
    const std::size_t plane = patch.plane_size();

    ForwardCache cache;
    cache.model_version = model.version;
    cache.c_hidden = model.c_hidden;
    cache.input = patch;
    cache.hidden_pre.assign(plane * model.c_hidden, 0.0);

    const auto& w1 = model.params.conv1_weights;
    for (int o = 0; o < model.c_hidden; ++o) {
        std::span<double> out(cache.hidden_pre.data() + o * plane, plane);
        std::fill(out.begin(), out.end(), model.params.conv1_bias[o]);
        for (int c = 0; c < model.c_in; ++c) {
            const double* k = w1.data() + (static_cast<std::size_t>(o) * model.c_in + c) * kTaps;
            for (int t = 0; t < kTaps; ++t) {
                add_shifted(out, patch.plane(c), width, height, t / kKernel - 1, t % kKernel - 1, k[t]);
            }
        }
    }
    cache.hidden_act.resize(cache.hidden_pre.size());
    std::transform(cache.hidden_pre.begin(), cache.hidden_pre.end(), cache.hidden_act.begin(),
                   [](double v) { return v > 0.0 ? v : 0.0; });

    std::vector<double> logits(plane, model.params.conv2_bias[0]);
    const auto& w2 = model.params.conv2_weights;
    for (int c = 0; c < model.c_hidden; ++c) {
        std::span<const double> act(cache.hidden_act.data() + c * plane, plane);
        for (int t = 0; t < kTaps; ++t) {
            add_shifted(logits, act, width, height, t / kKernel - 1, t % kKernel - 1,
                        w2[static_cast<std::size_t>(c) * kTaps + t]);
        }
    }
    cache.prob = ProbMap(width, height, 0.0);
    for (std::size_t i = 0; i < plane; ++i) cache.prob[i] = sigmoid(logits[i]);
    return cache;
}

ProbMap predict(const SegModel& model, const ImagePatch& patch) {
    return forward(model, patch).prob;
}

ModelParams backward(const SegModel& model, const ForwardCache& cache, const GradMap& upstream) {
    if (cache.model_version != model.version || cache.c_hidden != model.c_hidden ||
        cache.input.channels() != model.c_in) {
        throw UsageError("forward cache does not belong to the current model parameters");
    }
    if (!upstream.same_shape(cache.prob)) {
        throw ShapeError("upstream gradient shape does not match the cached prediction");
    }
    const int width = cache.prob.width();
    const int height = cache.prob.height();
    const std::size_t plane = cache.prob.size();

    ModelParams grads = ModelParams::zeros(model.c_in, model.c_hidden);

    std::vector<double> d_logit(plane);
    for (std::size_t i = 0; i < plane; ++i) {
        const double p = cache.prob[i];
        d_logit[i] = upstream[i] * p * (1.0 - p);
    }
    double bias2 = 0.0;
    for (double v : d_logit) bias2 += v;
    grads.conv2_bias[0] = bias2;

    std::vector<double> d_hidden(plane * model.c_hidden, 0.0);
    const auto& w2 = model.params.conv2_weights;
    for (int c = 0; c < model.c_hidden; ++c) {
        std::span<const double> act(cache.hidden_act.data() + c * plane, plane);
        std::span<double> d_act(d_hidden.data() + c * plane, plane);
        for (int t = 0; t < kTaps; ++t) {
            const int dy = t / kKernel - 1, dx = t % kKernel - 1;
            const std::size_t idx = static_cast<std::size_t>(c) * kTaps + t;
            grads.conv2_weights[idx] = shifted_dot(d_logit, act, width, height, dy, dx);
            scatter_shifted(d_act, d_logit, width, height, dy, dx, w2[idx]);
        }
    }
    for (std::size_t i = 0; i < d_hidden.size(); ++i) {
        if (!(cache.hidden_pre[i] > 0.0)) d_hidden[i] = 0.0;
    }

    for (int o = 0; o < model.c_hidden; ++o) {
        std::span<const double> d_out(d_hidden.data() + o * plane, plane);
        double bias = 0.0;
        for (double v : d_out) bias += v;
        grads.conv1_bias[o] = bias;
        for (int c = 0; c < model.c_in; ++c) {
            const std::size_t base = (static_cast<std::size_t>(o) * model.c_in + c) * kTaps;
            for (int t = 0; t < kTaps; ++t) {
                grads.conv1_weights[base + t] = shifted_dot(d_out, cache.input.plane(c), width,
                                                            height, t / kKernel - 1, t % kKernel - 1);
            }
        }
    }
    return grads;
}

AdamState make_adam_state(const SegModel& model) {
    AdamState state;
    state.first_moment = ModelParams::zeros(model.c_in, model.c_hidden);
    state.second_moment = ModelParams::zeros(model.c_in, model.c_hidden);
    return state;
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> first_moment, std::span<double> second_moment,
                 std::uint64_t step, double alpha, double beta1, double beta2, double epsilon) {
    if (grads.size() != params.size() || first_moment.size() != params.size() ||
        second_moment.size() != params.size()) {
        throw ShapeError("adam: parameter, gradient and moment sizes differ");
    }
    if (step == 0) throw UsageError("adam: step index is 1-based");
    const double correction1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double correction2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        first_moment[i] = beta1 * first_moment[i] + (1.0 - beta1) * g;
        second_moment[i] = beta2 * second_moment[i] + (1.0 - beta2) * g * g;
        const double m_hat = first_moment[i] / correction1;
        const double v_hat = second_moment[i] / correction2;
        params[i] -= alpha * m_hat / (std::sqrt(v_hat) + epsilon);
    }
}

void adam_step(SegModel& model, const ModelParams& grads, AdamState& state, double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw ConfigError("learning rate must be finite and > 0, got " + std::to_string(alpha));
    }
    if (!grads.same_shape(model.params) || !state.first_moment.same_shape(model.params) ||
        !state.second_moment.same_shape(model.params)) {
        throw ShapeError("adam: gradient or moment shapes do not match the model");
    }
    const auto grad_blocks = grads.blocks();
    for (std::size_t b = 0; b < grad_blocks.size(); ++b) {
        for (std::size_t i = 0; i < grad_blocks[b].size(); ++i) {
            if (!std::isfinite(grad_blocks[b][i])) {
                throw NumericalError("nonfinite gradient in parameter block " +
                                     std::string(ModelParams::kBlockNames[b]) + " at index " +
                                     std::to_string(i));
            }
        }
    }
    ++state.step_count;
    auto param_blocks = model.params.blocks();
    auto m_blocks = state.first_moment.blocks();
    auto v_blocks = state.second_moment.blocks();
    for (std::size_t b = 0; b < param_blocks.size(); ++b) {
        adam_update(param_blocks[b], grad_blocks[b], m_blocks[b], v_blocks[b], state.step_count,
                    alpha, state.beta1, state.beta2, state.epsilon);
    }
    model.touch();
}

}  // namespace homoseg
