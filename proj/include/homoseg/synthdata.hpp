#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "homoseg/grid.hpp"

namespace homoseg {

// ---------------------------------------------------------------------------
// Synthetic scenes

/// Parameters of a synthetic aerial grass/soil scene. The texture model is
/// a non-physical stand-in: only its determinism and label correctness
/// matter downstream.
struct SceneSpec {
    int width = 5280;
    int height = 3956;
    double grass_fraction = 0.5;  ///< in (0, 1]
    std::uint64_t texture_seed = 0;
    int fence_lines = 0;
    double elevation_m = 10.0;

    void validate() const;
};

struct Scene {
    Image image;     ///< RGB, values in [0,1]
    LabelMask mask;  ///< true grass mask
};

/// Deterministic per texture_seed. Grass regions carry high-frequency
/// green texture, soil low-frequency brown; fence lines are drawn as thin
/// bright strokes labelled non-grass. A grass_fraction of 1 yields a pure
/// grass scene without fences.
Scene generate_scene(const SceneSpec& spec);

// ---------------------------------------------------------------------------
// Brush annotation model

struct BrushSpec {
    int diameter_px = 64;
};

/// Offsets (dy, dx) of the disk structuring element. Pixel (i, j) of the
/// d x d box is a member iff (i - c)^2 + (j - c)^2 <= (d/2)^2 with
/// c = d/2 - 0.5; offsets are taken relative to box index (d - 1) / 2.
std::vector<std::array<int, 2>> disk_offsets(int diameter);

/// Morphological closing of `true_mask` by the brush disk. Pixels outside
/// the image count as non-grass, so the result is a superset of the input
/// and never removes true grass.
LabelMask brush_annotate(const LabelMask& true_mask, const BrushSpec& brush);

/// Ground sample distance in cm per pixel (0.2 cm/px at 10 m, linear).
double gsd_at_elevation(double elevation_m);

struct AnnotatableArea {
    double area_cm2 = 0.0;   ///< disk area on the ground
    double extent_cm = 0.0;  ///< brush diameter on the ground
};

AnnotatableArea min_annotatable_area(const BrushSpec& brush, double gsd_cm_per_px);

// ---------------------------------------------------------------------------
// Tiling, splitting, augmentation

struct TileGrid {
    int rows = 0;
    int cols = 0;
    int patch_size = 0;

    int count() const noexcept { return rows * cols; }
};

/// Non-overlapping grid; right and bottom remainders are dropped.
TileGrid tile_grid(int width, int height, int patch_size);

/// Patches in row-major order.
std::vector<Sample> tile_patches(const Image& image, const LabelMask& mask, int patch_size = 224);

/// Inverse of tile_patches over the cropped region.
Sample reassemble(const std::vector<Sample>& patches, const TileGrid& grid);

Image crop(const Image& image, int row, int col, int height, int width);
LabelMask crop(const LabelMask& mask, int row, int col, int height, int width);

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> eval;
};

/// Seeded shuffle of [0, n) then split at floor(ratio * n).
SplitIndices split(std::size_t n, double ratio, std::uint64_t seed);

struct AugmentParams {
    int quarter_turns = 0;  ///< clockwise 90-degree rotations, 0..3
    bool flip_horizontal = false;
    bool flip_vertical = false;
    std::array<double, 3> jitter = {1.0, 1.0, 1.0};  ///< per-channel gain

    static AugmentParams identity() { return {}; }
};

/// Rotation uniform over {0, 90, 180, 270}, each flip with probability 0.5,
/// per-channel gain uniform in [0.9, 1.1].
AugmentParams draw_augment_params(std::uint64_t seed);

/// Geometry goes to image and mask alike; gain to the image only, clipped to [0,1].
Sample apply_augment(const Sample& sample, const AugmentParams& params);

Sample augment(const Sample& sample, std::uint64_t seed);

Image rotate90(const Image& image);
LabelMask rotate90(const LabelMask& mask);

}  // namespace homoseg
