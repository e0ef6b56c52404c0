#include "homoseg/grid.hpp"

#include <cmath>
#include <string>

namespace homoseg {

void validate_prob_map(const ProbMap& map) {
    for (std::size_t i = 0; i < map.size(); ++i) {
        const double v = map[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError("probability map value at index " + std::to_string(i) +
                              " outside [0,1]: " + std::to_string(v));
        }
    }
}

void validate_label_mask(const LabelMask& mask) {
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i] > 1) {
            throw ConfigError("label mask value at index " + std::to_string(i) +
                              " is not binary");
        }
    }
}

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
    if (width < 1 || height < 1 || channels < 1) {
        throw ShapeError("image dimensions and channel count must be at least 1");
    }
    data_.assign(plane_size() * channels, fill);
}

}  // namespace homoseg
