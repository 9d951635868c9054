#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "texbank/error.hpp"
#include "texbank/image.hpp"

namespace texbank {

/// Integer grey levels in [0, levels - 1], row-major.
struct QuantizedImage {
    std::size_t width = 0;
    std::size_t height = 0;
    int levels = 0;
    std::vector<int> values;

    int at(std::size_t x, std::size_t y) const { return values[y * width + x]; }
    std::size_t size() const noexcept { return values.size(); }
};

/// Linear min-max binning into `levels` bins. A constant image maps to 0.
inline QuantizedImage quantize(const GrayImage& img, int levels) {
    if (levels < 2) throw DomainError("quantize: at least 2 levels required");
    const auto vals = img.values();
    const auto [lo_it, hi_it] = std::minmax_element(vals.begin(), vals.end());
    const double lo = *lo_it;
    const double range = *hi_it - lo;

    QuantizedImage out{img.width(), img.height(), levels, std::vector<int>(vals.size(), 0)};
    if (!(range > 0.0)) return out;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double t = (vals[i] - lo) / range * levels;
        out.values[i] = std::clamp(static_cast<int>(std::floor(t)), 0, levels - 1);
    }
    return out;
}

/// The four standard displacement directions shared by the co-occurrence
/// and run-length extractors. Row index grows downwards, so 45 degrees
/// points up and to the right.
enum class Direction { deg0, deg45, deg90, deg135 };

inline constexpr Direction kAllDirections[] = {Direction::deg0, Direction::deg45, Direction::deg90,
                                               Direction::deg135};

struct Step {
    int dx;
    int dy;
};

inline constexpr Step unit_step(Direction d) noexcept {
    switch (d) {
        case Direction::deg0: return {1, 0};
        case Direction::deg45: return {1, -1};
        case Direction::deg90: return {0, -1};
        case Direction::deg135: return {-1, -1};
    }
    return {1, 0};
}

}  // namespace texbank
