#include "homoseg/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "homoseg/pnm.hpp"
#include "homoseg/report.hpp"

namespace homoseg {

namespace {

constexpr const char* kHeader = "path,mask_path,split,seed,elevation_m";

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    out << kHeader << '\n';
    for (const auto& r : rows) {
        out << r.path << ',' << r.mask_path << ',' << r.split << ',' << r.seed << ','
            << format_double(r.elevation_m) << '\n';
    }
    if (!out) throw IoError("failed writing manifest: " + path.string());
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw IoError("manifest header must be '" + std::string(kHeader) + "': " + path.string());
    }
    std::vector<ManifestRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 5) {
            throw IoError("manifest line " + std::to_string(line_no) + " needs 5 fields: " + path.string());
        }
        try {
            rows.push_back({f[0], f[1], f[2], std::stoull(f[3]), std::stod(f[4])});
        } catch (const std::logic_error&) {
            throw IoError("manifest line " + std::to_string(line_no) + " is malformed: " + path.string());
        }
    }
    return rows;
}

CorpusSplit load_split(const std::filesystem::path& corpus_dir, const std::string& split) {
    const auto rows = read_manifest(corpus_dir / "manifest.csv");
    CorpusSplit out;
    for (const auto& r : rows) {
        if (r.split != split) continue;
        Sample s{read_ppm(corpus_dir / r.path), read_pgm(corpus_dir / r.mask_path)};
        if (s.image.width() != s.mask.width() || s.image.height() != s.mask.height()) {
            throw IoError("image and mask sizes differ for " + r.path);
        }
        out.samples.push_back(std::move(s));
        out.paths.push_back(r.path);
    }
    return out;
}

std::string fingerprint(const CorpusSplit& split) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](unsigned char byte) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    };
    for (std::size_t i = 0; i < split.samples.size(); ++i) {
        for (char c : split.paths[i]) mix(static_cast<unsigned char>(c));
        mix(0);
        for (auto v : split.samples[i].mask.values()) mix(v);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace homoseg
