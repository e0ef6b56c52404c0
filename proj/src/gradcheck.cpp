#include "homoseg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "homoseg/losses.hpp"
#include "homoseg/model.hpp"
#include "homoseg/rng.hpp"

namespace homoseg {

namespace {

struct Instance {
    ProbMap pred;
    LabelMask gt;
    double t = 0.0;
    LossConfig cfg;
};

Instance random_instance(Rng& rng, int width, int height) {
    Instance in{ProbMap(width, height), LabelMask(width, height), 0.0, {}};
    for (auto& v : in.pred.values()) v = uniform(rng, 0.02, 0.98);
    for (auto& g : in.gt.values()) g = uniform01(rng) < 0.5 ? 1 : 0;
    in.t = uniform01(rng);
    in.cfg.beta = uniform01(rng);
    in.cfg.lambda_smooth = uniform(rng, 0.1, 2.0);
    in.cfg.normalize_smooth = uniform01(rng) < 0.5;
    return in;
}

std::string size_tag(int width, int height) {
    return "@" + std::to_string(width) + "x" + std::to_string(height);
}

struct Difference {
    double value;
    double floor;
};

Difference central_difference(const std::function<double(const ProbMap&)>& f, ProbMap& p, std::size_t i,
                              double h) {
    const double orig = p[i];
    p[i] = orig + h;
    const double up = f(p);
    p[i] = orig - h;
    const double down = f(p);
    p[i] = orig;
    return {(up - down) / (2.0 * h), difference_noise_floor(std::max(std::abs(up), std::abs(down)), h)};
}

// A pixel whose stencil could cross |.| or clamp kinks is not differentiable
// over [p - h, p + h] and is excluded from the comparison.
bool near_kink(const ProbMap& p, std::size_t i, double h, double clamp, bool smooth_active) {
    if (p[i] - h < clamp || p[i] + h > 1.0 - clamp) return true;
    if (!smooth_active) return false;
    const double gap = std::max(1e-6, 2.0 * h);
    const int w = p.width(), hgt = p.height();
    const int r = static_cast<int>(i) / w, c = static_cast<int>(i) % w;
    const int nbr[4][2] = {{r - 1, c}, {r + 1, c}, {r, c - 1}, {r, c + 1}};
    for (const auto& nb : nbr) {
        if (nb[0] < 0 || nb[0] >= hgt || nb[1] < 0 || nb[1] >= w) continue;
        if (std::abs(p[i] - p.at(nb[0], nb[1])) < gap) return true;
    }
    return false;
}

void record(GradcheckBlock& block, double analytic, Difference numeric) {
    block.max_rel_error = std::max(block.max_rel_error, relative_error(analytic, numeric.value, numeric.floor));
    ++block.checked;
}

// Activation pattern of everything non-smooth in the model + loss pipeline.
std::vector<std::int8_t> kink_signature(const ForwardCache& cache, const Instance& in) {
    std::vector<std::int8_t> sig;
    sig.reserve(cache.hidden_pre.size() + 3 * cache.prob.size());
    for (double v : cache.hidden_pre) sig.push_back(v > 0.0 ? 1 : 0);
    const ProbMap& p = cache.prob;
    for (double v : p.values()) sig.push_back(v < in.cfg.clamp ? -1 : (v > 1.0 - in.cfg.clamp ? 1 : 0));
    if (in.t > 0.0 && in.cfg.lambda_smooth > 0.0) {
        auto sgn = [](double d) -> std::int8_t { return d > 0.0 ? 1 : (d < 0.0 ? -1 : 0); };
        for (int r = 0; r < p.height(); ++r) {
            for (int c = 0; c < p.width(); ++c) {
                if (r + 1 < p.height()) sig.push_back(sgn(p.at(r, c) - p.at(r + 1, c)));
                if (c + 1 < p.width()) sig.push_back(sgn(p.at(r, c) - p.at(r, c + 1)));
            }
        }
    }
    return sig;
}

void check_losses(const GradcheckOptions& opt, int width, int height, std::vector<GradcheckBlock>& out) {
    const std::string tag = size_tag(width, height);
    GradcheckBlock dice{"dice" + tag}, ce{"ce" + tag}, dice_ce{"dice_ce" + tag},
        smooth{"smooth" + tag}, combined{"combined" + tag};
    Rng rng(derive_seed(opt.seed, 0x4c4f5353ULL ^ (static_cast<std::uint64_t>(width) << 16) ^ height));
    const double h = opt.loss_step;

    for (int k = 0; k < opt.instances; ++k) {
        Instance in = random_instance(rng, width, height);
        ProbMap p = in.pred;

        LossConfig dice_cfg = in.cfg;
        dice_cfg.beta = 1.0;
        const GradMap g_dice = loss_gradients(p, in.gt, 0.0, dice_cfg);
        LossConfig ce_cfg = in.cfg;
        ce_cfg.beta = 0.0;
        const GradMap g_ce = loss_gradients(p, in.gt, 0.0, ce_cfg);
        const GradMap g_dice_ce = loss_gradients(p, in.gt, 0.0, in.cfg);
        const GradMap g_smooth = loss_gradients(p, in.gt, 1.0, in.cfg);
        const GradMap g_combined = loss_gradients(p, in.gt, in.t, in.cfg);

        auto f_dice = [&](const ProbMap& m) { return dice_loss(m, in.gt, in.cfg.epsilon); };
        auto f_ce = [&](const ProbMap& m) { return ce_loss(m, in.gt, in.cfg.clamp); };
        auto f_dice_ce = [&](const ProbMap& m) { return dice_ce_loss(m, in.gt, in.cfg); };
        auto f_smooth = [&](const ProbMap& m) {
            return smoothness_loss(m, in.cfg.lambda_smooth, in.cfg.normalize_smooth);
        };
        auto f_combined = [&](const ProbMap& m) { return combined_loss(m, in.gt, in.t, in.cfg); };

        for (std::size_t i = 0; i < p.size(); ++i) {
            if (near_kink(p, i, h, in.cfg.clamp, false)) {
                dice.skipped++, ce.skipped++, dice_ce.skipped++;
            } else {
                record(dice, g_dice[i], central_difference(f_dice, p, i, h));
                record(ce, g_ce[i], central_difference(f_ce, p, i, h));
                record(dice_ce, g_dice_ce[i], central_difference(f_dice_ce, p, i, h));
            }
            if (near_kink(p, i, h, in.cfg.clamp, true)) {
                smooth.skipped++, combined.skipped++;
            } else {
                record(smooth, g_smooth[i], central_difference(f_smooth, p, i, h));
                record(combined, g_combined[i], central_difference(f_combined, p, i, h));
            }
        }
    }
    for (auto* b : {&dice, &ce, &dice_ce, &smooth, &combined}) {
        b->passed = b->checked > 0 && b->max_rel_error <= opt.tolerance;
        out.push_back(*b);
    }
}

void check_model(const GradcheckOptions& opt, int width, int height, std::vector<GradcheckBlock>& out) {
    const std::string tag = size_tag(width, height);
    std::array<GradcheckBlock, 4> blocks;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        blocks[b].name = std::string(ModelParams::kBlockNames[b]) + tag;
    }
    Rng rng(derive_seed(opt.seed, 0x4d4f44454cULL ^ (static_cast<std::uint64_t>(width) << 16) ^ height));
    const double h = opt.model_step;

    for (int k = 0; k < opt.instances; ++k) {
        SegModel model = init_model(derive_seed(opt.seed, 1000 + k), 3, opt.c_hidden);
        for (double& b : model.params.conv1_bias) b = uniform(rng, -0.2, 0.2);
        model.params.conv2_bias[0] = uniform(rng, -0.5, 0.5);
        model.touch();

        ImagePatch patch(width, height, 3);
        for (double& v : patch.values()) v = uniform01(rng);
        Instance in = random_instance(rng, width, height);

        const ForwardCache cache = forward(model, patch);
        const auto base_sig = kink_signature(cache, in);
        ModelParams analytic = backward(model, cache, loss_gradients(cache.prob, in.gt, in.t, in.cfg));
        if (opt.perturb_weights) {
            for (auto block : analytic.blocks()) {
                for (double& g : block) g = 1.1 * g + 1e-3;
            }
        }

        auto param_blocks = model.params.blocks();
        const auto grad_blocks = analytic.blocks();
        for (std::size_t b = 0; b < param_blocks.size(); ++b) {
            for (std::size_t i = 0; i < param_blocks[b].size(); ++i) {
                const double orig = param_blocks[b][i];
                param_blocks[b][i] = orig + h;
                model.touch();
                const ForwardCache up = forward(model, patch);
                param_blocks[b][i] = orig - h;
                model.touch();
                const ForwardCache down = forward(model, patch);
                param_blocks[b][i] = orig;
                model.touch();
                if (kink_signature(up, in) != base_sig || kink_signature(down, in) != base_sig) {
                    ++blocks[b].skipped;
                    continue;
                }
                const double f_up = combined_loss(up.prob, in.gt, in.t, in.cfg);
                const double f_down = combined_loss(down.prob, in.gt, in.t, in.cfg);
                record(blocks[b], grad_blocks[b][i],
                       {(f_up - f_down) / (2.0 * h),
                        difference_noise_floor(std::max(std::abs(f_up), std::abs(f_down)), h)});
            }
        }
    }
    for (auto& b : blocks) {
        b.passed = b.checked > 0 && b.max_rel_error <= opt.tolerance;
        out.push_back(b);
    }
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
    const double scale = std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / scale;
}

double difference_noise_floor(double loss_magnitude, double step) {
    return std::max(1e-6, 1e5 * std::numeric_limits<double>::epsilon() * loss_magnitude / step);
}

bool GradcheckReport::passed() const {
    return !blocks.empty() &&
           std::all_of(blocks.begin(), blocks.end(), [](const GradcheckBlock& b) { return b.passed; });
}

GradcheckReport run_gradcheck(const GradcheckOptions& options) {
    if (options.instances < 1) throw ConfigError("gradcheck needs at least one instance");
    if (options.sizes.empty()) throw ConfigError("gradcheck needs at least one size");
    GradcheckReport report;
    for (const auto& [w, h] : options.sizes) {
        if (w < 1 || h < 1) throw ConfigError("gradcheck sizes must be positive");
        check_losses(options, w, h, report.blocks);
        check_model(options, w, h, report.blocks);
    }
    return report;
}

}  // namespace homoseg
