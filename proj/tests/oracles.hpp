#pragma once

// Test-only reference computations. Nothing here calls into the FFT or
// filtering paths of the library; they are brute-force restatements of the
// definitions, used to check the fast implementations.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace oracle {

// Frozen from a 40-digit evaluation (mpmath) of the -6 dB envelope widths at
// f0 = 0.1 cycles/pixel, 1 octave, 45 degrees, computed before the library
// was written.
inline constexpr double kSigmaX = 5.621718753878327412677924;
inline constexpr double kSigmaY = 4.524009886486744523463673;

// Same evaluation of the cosine impulse response with (kSigmaX, kSigmaY).
struct ImpulseSample {
    double theta, x, y, value;
};
inline constexpr ImpulseSample kImpulseSamples[] = {
    {0.0, 2.0, 0.0, 0.001815206675856053647160768},
    {0.0, 2.0, 1.5, 0.001718122117542134204566312},
    {0.0, -3.0, 2.0, -0.001521010397727552230057822},
    {std::numbers::pi / 4.0, 2.0, 1.0, 0.001356905993689742085213634},
};

/// Direct O(n^4) 2-D DFT, X[v][u] = sum_y sum_x x[y][x] e^{-2 pi i (ux + vy)/n}.
inline std::vector<std::complex<double>> naive_dft2(const std::vector<double>& img, std::size_t n) {
    std::vector<std::complex<double>> out(n * n);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t u = 0; u < n; ++u) {
            std::complex<double> acc = 0.0;
            for (std::size_t y = 0; y < n; ++y)
                for (std::size_t x = 0; x < n; ++x) {
                    const double ang = -2.0 * std::numbers::pi * static_cast<double>(u * x + v * y) / n;
                    acc += img[y * n + x] * std::polar(1.0, ang);
                }
            out[v * n + u] = acc;
        }
    return out;
}

/// Signed offset of index i on an n-periodic grid, in [-n/2, n/2).
inline double wrap(std::size_t i, std::size_t n) {
    return i < n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n);
}

/// Circular convolution of img with kernel k (both n x n, kernel origin at
/// index 0), evaluated directly.
inline std::vector<double> circular_convolve(const std::vector<double>& img, const std::vector<double>& k,
                                             std::size_t n) {
    std::vector<double> out(n * n, 0.0);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i)
                    acc += img[j * n + i] * k[((y + n - j) % n) * n + ((x + n - i) % n)];
            out[y * n + x] = acc;
        }
    return out;
}

/// Bisection for a sign change of f on [lo, hi].
template <typename F>
double bisect(F f, double lo, double hi, int iterations = 200) {
    double flo = f(lo);
    for (int i = 0; i < iterations; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace oracle
