#include <string>

#include "homoseg/synthdata.hpp"

namespace homoseg {

namespace {

/// Horizontal extent [lo, hi] of the disk on each row offset dy.
struct DiskRow {
    int dy;
    int lo;
    int hi;
};

std::vector<DiskRow> disk_rows(int diameter) {
    std::vector<DiskRow> rows;
    const double c = diameter / 2.0 - 0.5;
    const double r2 = (diameter / 2.0) * (diameter / 2.0);
    const int origin = (diameter - 1) / 2;
    for (int i = 0; i < diameter; ++i) {
        int lo = diameter, hi = -1;
        for (int j = 0; j < diameter; ++j) {
            if ((i - c) * (i - c) + (j - c) * (j - c) <= r2) {
                lo = std::min(lo, j);
                hi = std::max(hi, j);
            }
        }
        if (hi >= 0) rows.push_back({i - origin, lo - origin, hi - origin});
    }
    return rows;
}

/// Row-wise inclusive prefix sums with a leading zero column.
std::vector<int> row_prefix(const std::vector<std::uint8_t>& img, int width, int height) {
    std::vector<int> pre(static_cast<std::size_t>(width + 1) * height, 0);
    for (int r = 0; r < height; ++r) {
        int* p = pre.data() + static_cast<std::size_t>(r) * (width + 1);
        const std::uint8_t* src = img.data() + static_cast<std::size_t>(r) * width;
        for (int c = 0; c < width; ++c) p[c + 1] = p[c] + src[c];
    }
    return pre;
}

/// Count of set pixels in row r over columns [c0, c1], clipped to the grid.
int row_count(const std::vector<int>& pre, int width, int r, int c0, int c1) {
    c0 = std::max(c0, 0);
    c1 = std::min(c1, width - 1);
    if (c0 > c1) return 0;
    const int* p = pre.data() + static_cast<std::size_t>(r) * (width + 1);
    return p[c1 + 1] - p[c0];
}

}  // namespace

std::vector<std::array<int, 2>> disk_offsets(int diameter) {
    if (diameter < 1) throw ConfigError("brush diameter must be >= 1");
    std::vector<std::array<int, 2>> out;
    for (const auto& row : disk_rows(diameter)) {
        for (int dx = row.lo; dx <= row.hi; ++dx) out.push_back({row.dy, dx});
    }
    return out;
}

LabelMask brush_annotate(const LabelMask& true_mask, const BrushSpec& brush) {
    const int d = brush.diameter_px;
    if (d < 1) throw ConfigError("brush diameter must be >= 1");
    if (d > true_mask.width() || d > true_mask.height()) {
        throw UsageError("brush diameter " + std::to_string(d) + " exceeds mask size " +
                         std::to_string(true_mask.width()) + "x" +
                         std::to_string(true_mask.height()));
    }
    validate_label_mask(true_mask);
    if (d == 1) return true_mask;

    const auto rows = disk_rows(d);
    // Pad so the dilation can spill past the border and the erosion sees it.
    const int pad = d;
    const int pw = true_mask.width() + 2 * pad;
    const int ph = true_mask.height() + 2 * pad;
    std::vector<std::uint8_t> padded(static_cast<std::size_t>(pw) * ph, 0);
    for (int r = 0; r < true_mask.height(); ++r) {
        for (int c = 0; c < true_mask.width(); ++c) {
            padded[static_cast<std::size_t>(r + pad) * pw + c + pad] = true_mask.at(r, c);
        }
    }

    // dilation: D(y,x) = 1 iff A(y - dy, x - dx) for some disk offset
    const auto pre_a = row_prefix(padded, pw, ph);
    std::vector<std::uint8_t> dilated(padded.size(), 0);
    for (int y = 0; y < ph; ++y) {
        for (int x = 0; x < pw; ++x) {
            for (const auto& row : rows) {
                const int src = y - row.dy;
                if (src < 0 || src >= ph) continue;
                if (row_count(pre_a, pw, src, x - row.hi, x - row.lo) > 0) {
                    dilated[static_cast<std::size_t>(y) * pw + x] = 1;
                    break;
                }
            }
        }
    }

    // erosion: E(y,x) = 1 iff D(y + dy, x + dx) for every disk offset
    const auto pre_d = row_prefix(dilated, pw, ph);
    LabelMask out(true_mask.width(), true_mask.height(), 0);
    for (int r = 0; r < true_mask.height(); ++r) {
        for (int c = 0; c < true_mask.width(); ++c) {
            const int y = r + pad, x = c + pad;
            bool inside = true;
            for (const auto& row : rows) {
                const int len = row.hi - row.lo + 1;
                if (row_count(pre_d, pw, y + row.dy, x + row.lo, x + row.hi) != len) {
                    inside = false;
                    break;
                }
            }
            out.at(r, c) = inside ? 1 : 0;
        }
    }
    return out;
}

}  // namespace homoseg
