#include <cmath>
#include <numeric>
#include <string>

#include "homoseg/rng.hpp"
#include "homoseg/synthdata.hpp"

namespace homoseg {

TileGrid tile_grid(int width, int height, int patch_size) {
    if (patch_size < 1) throw ConfigError("patch size must be >= 1");
    if (width < patch_size || height < patch_size) {
        throw UsageError("image " + std::to_string(width) + "x" + std::to_string(height) +
                         " is smaller than the " + std::to_string(patch_size) + "px patch");
    }
    return {height / patch_size, width / patch_size, patch_size};
}

Image crop(const Image& image, int row, int col, int height, int width) {
    if (row < 0 || col < 0 || row + height > image.height() || col + width > image.width()) {
        throw UsageError("crop window outside the image");
    }
    Image out(width, height, image.channels());
    for (int ch = 0; ch < image.channels(); ++ch) {
        for (int r = 0; r < height; ++r) {
            for (int c = 0; c < width; ++c) out.at(ch, r, c) = image.at(ch, row + r, col + c);
        }
    }
    return out;
}

LabelMask crop(const LabelMask& mask, int row, int col, int height, int width) {
    if (row < 0 || col < 0 || row + height > mask.height() || col + width > mask.width()) {
        throw UsageError("crop window outside the mask");
    }
    LabelMask out(width, height);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) out.at(r, c) = mask.at(row + r, col + c);
    }
    return out;
}

std::vector<Sample> tile_patches(const Image& image, const LabelMask& mask, int patch_size) {
    if (image.width() != mask.width() || image.height() != mask.height()) {
        throw ShapeError("image and mask dimensions differ");
    }
    const TileGrid grid = tile_grid(image.width(), image.height(), patch_size);
    std::vector<Sample> out;
    out.reserve(grid.count());
    for (int gr = 0; gr < grid.rows; ++gr) {
        for (int gc = 0; gc < grid.cols; ++gc) {
            const int r = gr * patch_size, c = gc * patch_size;
            out.push_back({crop(image, r, c, patch_size, patch_size),
                           crop(mask, r, c, patch_size, patch_size)});
        }
    }
    return out;
}

Sample reassemble(const std::vector<Sample>& patches, const TileGrid& grid) {
    if (patches.size() != static_cast<std::size_t>(grid.count()) || patches.empty()) {
        throw UsageError("patch count does not match the tile grid");
    }
    const int p = grid.patch_size;
    const int channels = patches.front().image.channels();
    Sample out{Image(grid.cols * p, grid.rows * p, channels), LabelMask(grid.cols * p, grid.rows * p)};
    for (int gr = 0; gr < grid.rows; ++gr) {
        for (int gc = 0; gc < grid.cols; ++gc) {
            const Sample& s = patches[static_cast<std::size_t>(gr) * grid.cols + gc];
            for (int r = 0; r < p; ++r) {
                for (int c = 0; c < p; ++c) {
                    for (int ch = 0; ch < channels; ++ch) {
                        out.image.at(ch, gr * p + r, gc * p + c) = s.image.at(ch, r, c);
                    }
                    out.mask.at(gr * p + r, gc * p + c) = s.mask.at(r, c);
                }
            }
        }
    }
    return out;
}

SplitIndices split(std::size_t n, double ratio, std::uint64_t seed) {
    if (n == 0) throw UsageError("cannot split an empty collection");
    if (!(ratio > 0.0 && ratio < 1.0)) {
        throw ConfigError("split ratio must lie in (0,1), got " + std::to_string(ratio));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    shuffle(std::span<std::size_t>(order), rng);
    // Guard against products like 0.9 * 10 landing a hair below an integer.
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 1e-9));
    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + n_train);
    out.eval.assign(order.begin() + n_train, order.end());
    return out;
}

}  // namespace homoseg
