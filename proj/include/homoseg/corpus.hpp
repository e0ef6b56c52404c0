#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "homoseg/grid.hpp"

namespace homoseg {

/// One line of `manifest.csv`: `path,mask_path,split,seed,elevation_m`.
/// Paths are relative to the manifest's directory.
struct ManifestRow {
    std::string path;
    std::string mask_path;
    std::string split;  ///< "train" or "eval"
    std::uint64_t seed = 0;
    double elevation_m = 0.0;
};

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows);
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

/// Patches of one split, in manifest order.
struct CorpusSplit {
    std::vector<Sample> samples;
    std::vector<std::string> paths;
};

/// Loads every row of `split` from `<corpus_dir>/manifest.csv`.
CorpusSplit load_split(const std::filesystem::path& corpus_dir, const std::string& split);

/// FNV-1a digest over patch paths and mask pixels, as 16 hex digits.
std::string fingerprint(const CorpusSplit& split);

}  // namespace homoseg
