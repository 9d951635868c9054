#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "texbank/error.hpp"
#include "texbank/feature_vector.hpp"
#include "texbank/quantize.hpp"

namespace texbank {

inline constexpr int kDefaultRlmLevels = 16;

/// Run counts indexed by (grey level, run length - 1).
struct RunLengthMatrix {
    int levels = 0;
    std::size_t max_length = 0;
    std::vector<std::uint64_t> counts;

    std::uint64_t at(int level, std::size_t length) const { return counts[level * max_length + (length - 1)]; }
    std::uint64_t& at(int level, std::size_t length) { return counts[level * max_length + (length - 1)]; }

    /// Sum of length * count, i.e. the number of pixels covered by runs.
    std::uint64_t covered_pixels() const {
        std::uint64_t n = 0;
        for (int g = 0; g < levels; ++g)
            for (std::size_t l = 1; l <= max_length; ++l) n += l * at(g, l);
        return n;
    }

    std::uint64_t run_count() const {
        std::uint64_t n = 0;
        for (auto c : counts) n += c;
        return n;
    }
};

inline RunLengthMatrix run_length_matrix(const QuantizedImage& img, Direction direction) {
    if (img.values.empty()) throw SizeError("run_length_matrix: empty image");
    const auto w = static_cast<long>(img.width);
    const auto h = static_cast<long>(img.height);
    RunLengthMatrix m{img.levels, static_cast<std::size_t>(std::max(w, h)), {}};
    m.counts.assign(static_cast<std::size_t>(img.levels) * m.max_length, 0);

    const Step s = unit_step(direction);
    auto inside = [&](long x, long y) { return x >= 0 && x < w && y >= 0 && y < h; };

    // A line starts at every pixel whose predecessor along the step is
    // outside the image; walk each line and close runs on level changes.
    for (long y0 = 0; y0 < h; ++y0) {
        for (long x0 = 0; x0 < w; ++x0) {
            if (inside(x0 - s.dx, y0 - s.dy)) continue;
            long x = x0, y = y0;
            int level = img.values[y * w + x];
            std::size_t run = 0;
            while (inside(x, y)) {
                const int v = img.values[y * w + x];
                if (v == level) {
                    ++run;
                } else {
                    ++m.at(level, run);
                    level = v;
                    run = 1;
                }
                x += s.dx;
                y += s.dy;
            }
            ++m.at(level, run);
        }
    }
    return m;
}

/// Short-run emphasis, long-run emphasis, grey-level nonuniformity,
/// run-length nonuniformity and run percentage of the run-length matrices
/// summed over `directions`.
inline FeatureVector rlm_features(const QuantizedImage& img, std::span<const Direction> directions = kAllDirections) {
    if (directions.empty()) throw DomainError("rlm_features: at least one direction required");
    const std::size_t max_len = std::max(img.width, img.height);
    std::vector<double> sum(static_cast<std::size_t>(img.levels) * max_len, 0.0);
    for (Direction d : directions) {
        const auto m = run_length_matrix(img, d);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += static_cast<double>(m.counts[i]);
    }

    double runs = 0.0, sre = 0.0, lre = 0.0, rln = 0.0, gln = 0.0;
    for (int g = 0; g < img.levels; ++g) {
        double level_total = 0.0;
        for (std::size_t l = 1; l <= max_len; ++l) {
            const double c = sum[g * max_len + (l - 1)];
            const auto len = static_cast<double>(l);
            runs += c;
            sre += c / (len * len);
            lre += c * len * len;
            level_total += c;
        }
        gln += level_total * level_total;
    }
    for (std::size_t l = 1; l <= max_len; ++l) {
        double length_total = 0.0;
        for (int g = 0; g < img.levels; ++g) length_total += sum[g * max_len + (l - 1)];
        rln += length_total * length_total;
    }
    const double pixels = static_cast<double>(img.size()) * static_cast<double>(directions.size());
    return FeatureVector({"rlm_sre", "rlm_lre", "rlm_gln", "rlm_rln", "rlm_rp"},
                         {sre / runs, lre / runs, gln / runs, rln / runs, runs / pixels});
}

}  // namespace texbank
