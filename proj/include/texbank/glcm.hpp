#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "texbank/error.hpp"
#include "texbank/feature_vector.hpp"
#include "texbank/quantize.hpp"

namespace texbank {

inline constexpr int kDefaultGlcmLevels = 64;
inline constexpr int kDefaultGlcmDistance = 1;

/// Normalised, symmetric grey-level co-occurrence matrix (levels x levels).
struct Cooccurrence {
    int levels = 0;
    std::vector<double> p;
    std::uint64_t pair_count = 0;  // ordered pairs counted, both orders

    double at(int i, int j) const { return p[static_cast<std::size_t>(i) * levels + j]; }
};

/// Accumulates every direction in `directions` into one matrix. Each pixel
/// pair is counted in both orders, so the result is symmetric exactly.
inline Cooccurrence cooccurrence_matrix(const QuantizedImage& img, int distance,
                                        std::span<const Direction> directions = kAllDirections) {
    if (distance < 1) throw DomainError("cooccurrence_matrix: distance must be >= 1");
    const std::size_t g = static_cast<std::size_t>(img.levels);
    std::vector<std::uint64_t> counts(g * g, 0);
    std::uint64_t total = 0;

    const auto w = static_cast<long>(img.width);
    const auto h = static_cast<long>(img.height);
    for (Direction d : directions) {
        const Step s = unit_step(d);
        const long dx = s.dx * distance;
        const long dy = s.dy * distance;
        for (long y = 0; y < h; ++y) {
            const long y2 = y + dy;
            if (y2 < 0 || y2 >= h) continue;
            for (long x = 0; x < w; ++x) {
                const long x2 = x + dx;
                if (x2 < 0 || x2 >= w) continue;
                const auto a = static_cast<std::size_t>(img.values[y * w + x]);
                const auto b = static_cast<std::size_t>(img.values[y2 * w + x2]);
                ++counts[a * g + b];
                ++counts[b * g + a];
                total += 2;
            }
        }
    }
    if (total == 0) throw SizeError("cooccurrence_matrix: no valid pixel pairs at this displacement");

    Cooccurrence out{img.levels, std::vector<double>(g * g), total};
    const auto denom = static_cast<double>(total);
    for (std::size_t i = 0; i < counts.size(); ++i) out.p[i] = static_cast<double>(counts[i]) / denom;
    return out;
}

/// Contrast, correlation, angular second moment, homogeneity, entropy
/// (natural log) and dissimilarity of a co-occurrence matrix.
/// Correlation is reported as 1 when the marginal variance is zero.
inline FeatureVector glcm_statistics(const Cooccurrence& m) {
    const int g = m.levels;
    double mu = 0.0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) mu += i * m.at(i, j);
    double var = 0.0;
    for (int i = 0; i < g; ++i)
        for (int j = 0; j < g; ++j) var += (i - mu) * (i - mu) * m.at(i, j);

    double contrast = 0.0, cov = 0.0, asm_ = 0.0, homogeneity = 0.0, entropy = 0.0, dissimilarity = 0.0;
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j < g; ++j) {
            const double p = m.at(i, j);
            if (p == 0.0) continue;
            const double d = i - j;
            contrast += d * d * p;
            cov += (i - mu) * (j - mu) * p;
            asm_ += p * p;
            homogeneity += p / (1.0 + d * d);
            entropy -= p * std::log(p);
            dissimilarity += std::abs(d) * p;
        }
    }
    const double correlation = var > 0.0 ? cov / var : 1.0;
    return FeatureVector({"glcm_contrast", "glcm_correlation", "glcm_asm", "glcm_homogeneity", "glcm_entropy",
                          "glcm_dissimilarity"},
                         {contrast, correlation, asm_, homogeneity, entropy, dissimilarity});
}

inline FeatureVector glcm_features(const QuantizedImage& img, int distance = kDefaultGlcmDistance,
                                   std::span<const Direction> directions = kAllDirections) {
    return glcm_statistics(cooccurrence_matrix(img, distance, directions));
}

}  // namespace texbank
