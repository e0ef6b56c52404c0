#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "homoseg/model.hpp"

namespace homoseg {

namespace {

constexpr std::array<char, 8> kMagic = {'H', 'S', 'E', 'G', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
public:
    explicit Writer(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open checkpoint for writing: " + path.string());
    }
    void bytes(const char* data, std::size_t n) { out_.write(data, static_cast<std::streamsize>(n)); }
    void u64(std::uint64_t v) {
        char buf[8];
        for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        bytes(buf, 8);
    }
    void u32(std::uint32_t v) {
        char buf[4];
        for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        bytes(buf, 4);
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void block(std::span<const double> values) {
        u64(values.size());
        for (double v : values) f64(v);
    }
    void finish() {
        out_.flush();
        if (!out_) throw IoError("failed writing checkpoint: " + path_.string());
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

class Reader {
public:
    explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw IoError("cannot open checkpoint: " + path.string());
    }
    void bytes(char* data, std::size_t n) {
        in_.read(data, static_cast<std::streamsize>(n));
        if (!in_) throw IoError("truncated checkpoint: " + path_.string());
    }
    std::uint64_t u64() {
        unsigned char buf[8];
        bytes(reinterpret_cast<char*>(buf), 8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
        return v;
    }
    std::uint32_t u32() {
        unsigned char buf[4];
        bytes(reinterpret_cast<char*>(buf), 4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    void block(std::span<double> values, std::string_view name) {
        const std::uint64_t n = u64();
        if (n != values.size()) {
            throw IoError("checkpoint block " + std::string(name) + " has " + std::to_string(n) +
                          " values, expected " + std::to_string(values.size()) + ": " +
                          path_.string());
        }
        for (double& v : values) v = f64();
    }
    void expect_end() {
        if (in_.peek() != std::char_traits<char>::eof()) {
            throw IoError("trailing bytes in checkpoint: " + path_.string());
        }
    }

private:
    std::filesystem::path path_;
    std::ifstream in_;
};

void write_params(Writer& w, const ModelParams& p) {
    for (auto block : p.blocks()) w.block(block);
}

void read_params(Reader& r, ModelParams& p) {
    auto blocks = p.blocks();
    for (std::size_t b = 0; b < blocks.size(); ++b) r.block(blocks[b], ModelParams::kBlockNames[b]);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const SegModel& model,
                     const AdamState& state) {
    Writer w(path);
    w.bytes(kMagic.data(), kMagic.size());
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(model.c_in));
    w.u32(static_cast<std::uint32_t>(model.c_hidden));
    w.u32(0);
    w.u64(model.seed);
    w.u64(state.step_count);
    w.f64(state.beta1);
    w.f64(state.beta2);
    w.f64(state.epsilon);
    write_params(w, model.params);
    write_params(w, state.first_moment);
    write_params(w, state.second_moment);
    w.finish();
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    Reader r(path);
    std::array<char, 8> magic{};
    r.bytes(magic.data(), magic.size());
    if (magic != kMagic) throw IoError("not a model checkpoint: " + path.string());
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion) {
        throw IoError("unsupported checkpoint format version " + std::to_string(version) + ": " +
                      path.string());
    }
    const std::uint32_t c_in = r.u32();
    const std::uint32_t c_hidden = r.u32();
    r.u32();
    if (c_in < 1 || c_hidden < 1 || c_in > 4096 || c_hidden > 4096) {
        throw IoError("implausible channel counts in checkpoint: " + path.string());
    }

    Checkpoint ck;
    ck.model.c_in = static_cast<int>(c_in);
    ck.model.c_hidden = static_cast<int>(c_hidden);
    ck.model.seed = r.u64();
    ck.adam.step_count = r.u64();
    ck.adam.beta1 = r.f64();
    ck.adam.beta2 = r.f64();
    ck.adam.epsilon = r.f64();
    ck.model.params = ModelParams::zeros(ck.model.c_in, ck.model.c_hidden);
    ck.adam.first_moment = ModelParams::zeros(ck.model.c_in, ck.model.c_hidden);
    ck.adam.second_moment = ModelParams::zeros(ck.model.c_in, ck.model.c_hidden);
    read_params(r, ck.model.params);
    read_params(r, ck.adam.first_moment);
    read_params(r, ck.adam.second_moment);
    r.expect_end();
    ck.model.touch();
    return ck;
}

}  // namespace homoseg
