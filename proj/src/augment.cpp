#include <algorithm>

#include "homoseg/rng.hpp"
#include "homoseg/synthdata.hpp"

namespace homoseg {

namespace {

// Clockwise quarter turn of a square grid: out[r][c] = in[n-1-c][r].
template <class Get, class Set>
void rotate_square(int n, Get get, Set set) {
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) set(r, c, get(n - 1 - c, r));
    }
}

void require_square(int width, int height) {
    if (width != height) throw UsageError("quarter-turn rotation requires a square patch");
}

}  // namespace

Image rotate90(const Image& image) {
    require_square(image.width(), image.height());
    Image out(image.width(), image.height(), image.channels());
    for (int ch = 0; ch < image.channels(); ++ch) {
        rotate_square(
            image.width(), [&](int r, int c) { return image.at(ch, r, c); },
            [&](int r, int c, double v) { out.at(ch, r, c) = v; });
    }
    return out;
}

LabelMask rotate90(const LabelMask& mask) {
    require_square(mask.width(), mask.height());
    LabelMask out(mask.width(), mask.height());
    rotate_square(
        mask.width(), [&](int r, int c) { return mask.at(r, c); },
        [&](int r, int c, std::uint8_t v) { out.at(r, c) = v; });
    return out;
}

AugmentParams draw_augment_params(std::uint64_t seed) {
    Rng rng(seed);
    AugmentParams p;
    p.quarter_turns = static_cast<int>(uniform_index(rng, 4));
    p.flip_horizontal = uniform01(rng) < 0.5;
    p.flip_vertical = uniform01(rng) < 0.5;
    for (double& g : p.jitter) g = uniform(rng, 0.9, 1.1);
    return p;
}

Sample apply_augment(const Sample& sample, const AugmentParams& params) {
    if (sample.image.width() != sample.mask.width() || sample.image.height() != sample.mask.height()) {
        throw ShapeError("image and mask dimensions differ");
    }
    if (params.quarter_turns < 0 || params.quarter_turns > 3) {
        throw ConfigError("quarter_turns must lie in 0..3");
    }
    if (params.quarter_turns % 2 == 1) require_square(sample.image.width(), sample.image.height());

    // a half turn is both flips, which also works on rectangles
    int turns = params.quarter_turns;
    bool flip_h = params.flip_horizontal, flip_v = params.flip_vertical;
    if (turns >= 2) {
        turns -= 2;
        flip_h = !flip_h;
        flip_v = !flip_v;
    }

    Sample out = sample;
    for (int k = 0; k < turns; ++k) {
        out.image = rotate90(out.image);
        out.mask = rotate90(out.mask);
    }
    const int w = out.image.width(), h = out.image.height();
    if (flip_h) {
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w / 2; ++c) {
                for (int ch = 0; ch < out.image.channels(); ++ch) {
                    std::swap(out.image.at(ch, r, c), out.image.at(ch, r, w - 1 - c));
                }
                std::swap(out.mask.at(r, c), out.mask.at(r, w - 1 - c));
            }
        }
    }
    if (flip_v) {
        for (int r = 0; r < h / 2; ++r) {
            for (int c = 0; c < w; ++c) {
                for (int ch = 0; ch < out.image.channels(); ++ch) {
                    std::swap(out.image.at(ch, r, c), out.image.at(ch, h - 1 - r, c));
                }
                std::swap(out.mask.at(r, c), out.mask.at(h - 1 - r, c));
            }
        }
    }
    for (int ch = 0; ch < out.image.channels() && ch < 3; ++ch) {
        const double gain = params.jitter[ch];
        if (gain == 1.0) continue;
        for (double& v : out.image.plane(ch)) v = std::clamp(v * gain, 0.0, 1.0);
    }
    return out;
}

Sample augment(const Sample& sample, std::uint64_t seed) {
    return apply_augment(sample, draw_augment_params(seed));
}

}  // namespace homoseg
