#include "homoseg/pnm.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace homoseg {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

unsigned char quantize(double v) {
    const double clipped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    return static_cast<unsigned char>(std::lround(clipped * 255.0));
}

struct PnmHeader {
    int width = 0;
    int height = 0;
};

// Reads "<magic> <width> <height> <maxval>" with optional '#' comments.
PnmHeader read_header(std::istream& in, const char* magic, const std::filesystem::path& path) {
    auto next_token = [&]() {
        std::string tok;
        while (in) {
            int ch = in.peek();
            if (ch == '#') {
                std::string skip;
                std::getline(in, skip);
            } else if (std::isspace(ch)) {
                in.get();
            } else {
                break;
            }
        }
        in >> tok;
        return tok;
    };
    if (next_token() != magic) throw IoError("expected " + std::string(magic) + " file: " + path.string());
    PnmHeader h;
    try {
        h.width = std::stoi(next_token());
        h.height = std::stoi(next_token());
        if (std::stoi(next_token()) != 255) {
            throw IoError("only maxval 255 is supported: " + path.string());
        }
    } catch (const std::logic_error&) {
        throw IoError("malformed header: " + path.string());
    }
    if (h.width < 1 || h.height < 1) throw IoError("invalid dimensions: " + path.string());
    in.get();  // single whitespace before the raster
    return h;
}

std::vector<unsigned char> read_raster(std::istream& in, std::size_t n, const std::filesystem::path& path) {
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw IoError("truncated raster: " + path.string());
    return buf;
}

}  // namespace

void write_ppm(const std::filesystem::path& path, const Image& image) {
    if (image.channels() != 3) throw ShapeError("PPM output requires a 3-channel image");
    auto out = open_out(path);
    out << "P6\n" << image.width() << ' ' << image.height() << "\n255\n";
    std::vector<unsigned char> buf(image.plane_size() * 3);
    for (int r = 0; r < image.height(); ++r) {
        for (int c = 0; c < image.width(); ++c) {
            const std::size_t px = static_cast<std::size_t>(r) * image.width() + c;
            for (int ch = 0; ch < 3; ++ch) buf[px * 3 + ch] = quantize(image.at(ch, r, c));
        }
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing: " + path.string());
}

Image read_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    const auto h = read_header(in, "P6", path);
    const auto buf = read_raster(in, static_cast<std::size_t>(h.width) * h.height * 3, path);
    Image image(h.width, h.height, 3);
    for (int r = 0; r < h.height; ++r) {
        for (int c = 0; c < h.width; ++c) {
            const std::size_t px = static_cast<std::size_t>(r) * h.width + c;
            for (int ch = 0; ch < 3; ++ch) image.at(ch, r, c) = buf[px * 3 + ch] / 255.0;
        }
    }
    return image;
}

void write_pgm(const std::filesystem::path& path, const LabelMask& mask) {
    auto out = open_out(path);
    out << "P5\n" << mask.width() << ' ' << mask.height() << "\n255\n";
    std::vector<unsigned char> buf(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) buf[i] = mask[i] ? 255 : 0;
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("failed writing: " + path.string());
}

LabelMask read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    const auto h = read_header(in, "P5", path);
    const auto buf = read_raster(in, static_cast<std::size_t>(h.width) * h.height, path);
    LabelMask mask(h.width, h.height);
    for (std::size_t i = 0; i < buf.size(); ++i) mask[i] = buf[i] >= 128 ? 1 : 0;
    return mask;
}

}  // namespace homoseg
