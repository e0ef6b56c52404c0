#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "homoseg/errors.hpp"

namespace homoseg {

/// Dense row-major 2-D array. `at(row, col)`; row index runs over height.
template <class T>
class Grid {
public:
    Grid() = default;
    Grid(int width, int height, T fill = T{})
        : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw ShapeError("grid dimensions must be at least 1x1");
        }
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }
    Grid(int width, int height, std::vector<T> values)
        : width_(width), height_(height), data_(std::move(values)) {
        if (width < 1 || height < 1) {
            throw ShapeError("grid dimensions must be at least 1x1");
        }
        if (data_.size() != static_cast<std::size_t>(width) * height) {
            throw ShapeError("grid value count does not match width*height");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& at(int row, int col) { return data_[index(row, col)]; }
    const T& at(int row, int col) const { return data_[index(row, col)]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    bool same_shape(const Grid& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }
    template <class U>
    bool same_shape(const Grid<U>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int row, int col) const noexcept {
        return static_cast<std::size_t>(row) * width_ + col;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Per-pixel probability map p in [0,1].
using ProbMap = Grid<double>;
/// Unconstrained per-pixel map (gradients, raw scores).
using GradMap = Grid<double>;
/// Binary mask, every value 0 or 1.
using LabelMask = Grid<std::uint8_t>;

/// Throws ConfigError unless every value lies in [0,1].
void validate_prob_map(const ProbMap& map);
/// Throws ConfigError unless every value is exactly 0 or 1.
void validate_label_mask(const LabelMask& mask);

/// Planar (channel-major) multi-channel image, values in [0,1].
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, double fill = 0.0);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t plane_size() const noexcept {
        return static_cast<std::size_t>(width_) * height_;
    }

    double& at(int channel, int row, int col) {
        return data_[channel * plane_size() + static_cast<std::size_t>(row) * width_ + col];
    }
    double at(int channel, int row, int col) const {
        return data_[channel * plane_size() + static_cast<std::size_t>(row) * width_ + col];
    }

    std::span<double> plane(int channel) {
        return std::span<double>(data_).subspan(channel * plane_size(), plane_size());
    }
    std::span<const double> plane(int channel) const {
        return std::span<const double>(data_).subspan(channel * plane_size(), plane_size());
    }
    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// An RGB training patch.
using ImagePatch = Image;

/// Image patch paired with its label mask.
struct Sample {
    ImagePatch image;
    LabelMask mask;
};

}  // namespace homoseg
