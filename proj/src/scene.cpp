#include <algorithm>
#include <cmath>
#include <string>

#include "homoseg/rng.hpp"
#include "homoseg/synthdata.hpp"

namespace homoseg {

namespace {

constexpr int kMinSceneSide = 16;

double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
    const std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(ix) * 0x9e3779b1ULL ^
                                                         splitmix64(static_cast<std::uint64_t>(iy))));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double smoothstep(double x) { return x * x * (3.0 - 2.0 * x); }

/// Value noise in [0,1) with lattice spacing `cell` pixels.
class ValueNoise {
public:
    ValueNoise(std::uint64_t seed, double cell) : seed_(seed), cell_(cell) {}

    double operator()(int row, int col) const {
        const double fy = row / cell_, fx = col / cell_;
        const auto iy = static_cast<std::int64_t>(std::floor(fy));
        const auto ix = static_cast<std::int64_t>(std::floor(fx));
        const double ty = smoothstep(fy - iy), tx = smoothstep(fx - ix);
        const double v00 = lattice_value(seed_, ix, iy), v01 = lattice_value(seed_, ix + 1, iy);
        const double v10 = lattice_value(seed_, ix, iy + 1), v11 = lattice_value(seed_, ix + 1, iy + 1);
        const double top = v00 + tx * (v01 - v00);
        const double bottom = v10 + tx * (v11 - v10);
        return top + ty * (bottom - top);
    }

private:
    std::uint64_t seed_;
    double cell_;
};

struct Fence {
    double y0, x0, y1, x1;
};

double distance_to_segment(double y, double x, const Fence& f) {
    const double dy = f.y1 - f.y0, dx = f.x1 - f.x0;
    const double len2 = dy * dy + dx * dx;
    double u = len2 > 0.0 ? ((y - f.y0) * dy + (x - f.x0) * dx) / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    const double py = f.y0 + u * dy - y, px = f.x0 + u * dx - x;
    return std::sqrt(py * py + px * px);
}

}  // namespace

void SceneSpec::validate() const {
    if (width < kMinSceneSide || height < kMinSceneSide) {
        throw UsageError("scene must be at least " + std::to_string(kMinSceneSide) + "x" +
                         std::to_string(kMinSceneSide) + " pixels, got " + std::to_string(width) +
                         "x" + std::to_string(height));
    }
    if (!(grass_fraction > 0.0 && grass_fraction <= 1.0)) {
        throw ConfigError("grass_fraction must lie in (0,1], got " + std::to_string(grass_fraction));
    }
    if (fence_lines < 0) throw ConfigError("fence_lines must be >= 0");
    if (!(elevation_m > 0.0)) throw ConfigError("elevation must be > 0");
}

Scene generate_scene(const SceneSpec& spec) {
    spec.validate();
    const int w = spec.width, h = spec.height;
    const std::size_t n = static_cast<std::size_t>(w) * h;

    // Region features shrink (in pixels) as the drone climbs.
    const double region_cell = std::max(8.0, 160.0 * 10.0 / spec.elevation_m);
    const ValueNoise coarse(derive_seed(spec.texture_seed, 1), region_cell);
    const ValueNoise medium(derive_seed(spec.texture_seed, 2), region_cell / 3.0);
    const ValueNoise fine(derive_seed(spec.texture_seed, 3), std::max(2.0, region_cell / 10.0));

    Scene scene{Image(w, h, 3), LabelMask(w, h, 0)};

    if (spec.grass_fraction >= 1.0) {
        std::fill(scene.mask.values().begin(), scene.mask.values().end(), std::uint8_t{1});
    } else {
        std::vector<double> field(n);
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                field[static_cast<std::size_t>(r) * w + c] =
                    coarse(r, c) + 0.45 * medium(r, c) + 0.2 * fine(r, c);
            }
        }
        std::vector<double> sorted = field;
        const auto cut = static_cast<std::size_t>(
            std::floor((1.0 - spec.grass_fraction) * static_cast<double>(n)));
        std::nth_element(sorted.begin(), sorted.begin() + std::min(cut, n - 1), sorted.end());
        const double threshold = sorted[std::min(cut, n - 1)];
        for (std::size_t i = 0; i < n; ++i) scene.mask[i] = field[i] >= threshold ? 1 : 0;

        Rng rng(derive_seed(spec.texture_seed, 4));
        for (int k = 0; k < spec.fence_lines; ++k) {
            // Endpoints on opposite borders so every fence crosses the scene.
            Fence f{};
            if (uniform01(rng) < 0.5) {
                f = {0.0, uniform(rng, 0.0, w - 1.0), h - 1.0, uniform(rng, 0.0, w - 1.0)};
            } else {
                f = {uniform(rng, 0.0, h - 1.0), 0.0, uniform(rng, 0.0, h - 1.0), w - 1.0};
            }
            for (int r = 0; r < h; ++r) {
                for (int c = 0; c < w; ++c) {
                    if (distance_to_segment(r, c, f) <= 1.0) {
                        scene.mask.at(r, c) = 0;
                        scene.image.at(0, r, c) = -1.0;  // marker, painted below
                    }
                }
            }
        }
    }

    const ValueNoise blades(derive_seed(spec.texture_seed, 5), 2.0);
    const ValueNoise soil(derive_seed(spec.texture_seed, 6), 48.0);
    Rng grain(derive_seed(spec.texture_seed, 7));
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double jitter = 0.06 * (uniform01(grain) - 0.5);
            double rgb[3];
            if (scene.image.at(0, r, c) < 0.0) {
                rgb[0] = 0.86 + jitter;
                rgb[1] = 0.85 + jitter;
                rgb[2] = 0.82 + jitter;
            } else if (scene.mask.at(r, c)) {
                const double b = blades(r, c);
                rgb[0] = 0.20 + 0.16 * b + jitter;
                rgb[1] = 0.40 + 0.28 * b + jitter;
                rgb[2] = 0.14 + 0.10 * b + jitter;
            } else {
                const double s = soil(r, c);
                rgb[0] = 0.42 + 0.18 * s + jitter;
                rgb[1] = 0.34 + 0.14 * s + jitter;
                rgb[2] = 0.24 + 0.10 * s + jitter;
            }
            for (int ch = 0; ch < 3; ++ch) scene.image.at(ch, r, c) = std::clamp(rgb[ch], 0.0, 1.0);
        }
    }
    return scene;
}

double gsd_at_elevation(double elevation_m) {
    if (!(elevation_m > 0.0)) {
        throw UsageError("elevation must be > 0, got " + std::to_string(elevation_m));
    }
    return 0.2 * elevation_m / 10.0;
}

AnnotatableArea min_annotatable_area(const BrushSpec& brush, double gsd_cm_per_px) {
    const double radius = brush.diameter_px / 2.0;
    return {M_PI * radius * radius * gsd_cm_per_px * gsd_cm_per_px,
            brush.diameter_px * gsd_cm_per_px};
}

}  // namespace homoseg
