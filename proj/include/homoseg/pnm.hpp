#pragma once

#include <filesystem>

#include "homoseg/grid.hpp"

namespace homoseg {

/// Binary PPM (P6, maxval 255). Values are rounded from [0,1].
void write_ppm(const std::filesystem::path& path, const Image& image);
Image read_ppm(const std::filesystem::path& path);

/// Binary PGM (P5, maxval 255); mask value 1 is stored as 255.
void write_pgm(const std::filesystem::path& path, const LabelMask& mask);
/// Pixels >= 128 read as 1.
LabelMask read_pgm(const std::filesystem::path& path);

}  // namespace homoseg
