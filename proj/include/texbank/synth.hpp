#pragma once

// Seeded synthetic textures with known structure: sinusoidal gratings,
// fractional Brownian surfaces (FD = 3 - H), Gaussian Markov random fields
// with prescribed interaction parameters, and white noise.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "texbank/error.hpp"
#include "texbank/fft.hpp"
#include "texbank/gabor.hpp"
#include "texbank/image.hpp"

namespace texbank::synth {

/// SplitMix64 finaliser; derives independent per-item seeds from one root.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace detail {

inline void require_pow2_side(std::size_t side, const char* who) {
    if (!is_pow2(side)) throw DomainError(fmt::format("{}: side {} is not a power of two", who, side));
}

/// Affine map of the values onto [0, 255]; a constant field maps to 127.5.
inline GrayImage normalise_to_8bit_range(std::size_t side, const std::vector<double>& values) {
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double range = *hi - *lo;
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        out[i] = range > 0.0 ? (values[i] - *lo) / range * 255.0 : 127.5;
    return GrayImage(side, side, std::move(out));
}

}  // namespace detail

struct GratingParams {
    std::size_t side = 512;
    double frequency = 32.0;  // cycles/image-width
    double theta = 0.0;       // radians
    double phase = 0.0;       // radians
    bool snap_to_bin = true;  // round the wave vector to the nearest integer DFT bin
};

/// I(x, y) = 127.5 * (1 + cos(2*pi*(kx*x + ky*y)/side + phase)) with
/// (kx, ky) = frequency * (cos theta, sin theta).
inline GrayImage grating(const GratingParams& p) {
    if (p.side == 0) throw DomainError("grating: side must be positive");
    if (!(p.frequency >= 0.0) || p.frequency >= static_cast<double>(p.side) / 2.0)
        throw DomainError(fmt::format("grating: frequency {} must lie in [0, side/2)", p.frequency));
    double kx = p.frequency * std::cos(p.theta);
    double ky = p.frequency * std::sin(p.theta);
    if (p.snap_to_bin) {
        kx = std::round(kx);
        ky = std::round(ky);
    }
    const auto n = static_cast<double>(p.side);
    GrayImage img(p.side, p.side);
    for (std::size_t y = 0; y < p.side; ++y)
        for (std::size_t x = 0; x < p.side; ++x)
            img.at(x, y) = 127.5 * (1.0 + std::cos(2.0 * std::numbers::pi * (kx * x + ky * y) / n + p.phase));
    return img;
}

struct FbmParams {
    std::size_t side = 512;
    double hurst = 0.5;
    std::uint64_t seed = 0;
};

/// Complex field before normalisation: IDFT of an i.i.d. complex Gaussian
/// spectrum with amplitude |f|^-(H+1), Hermitian-symmetrised. The imaginary
/// part is rounding residue only.
inline ComplexGrid fbm_field(const FbmParams& p) {
    detail::require_pow2_side(p.side, "fbm_surface");
    if (!(p.hurst > 0.0 && p.hurst < 1.0)) throw DomainError("fbm_surface: Hurst exponent must lie in (0, 1)");

    const std::size_t n = p.side;
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::complex<double>> z(n * n);
    for (auto& c : z) {
        const double re = normal(rng);
        const double im = normal(rng);
        c = {re, im};
    }

    ComplexGrid spectrum{n, std::vector<std::complex<double>>(n * n)};
    for (std::size_t r = 0; r < n; ++r) {
        const double v = dft_frequency(r, n);
        const std::size_t rm = (n - r) % n;
        for (std::size_t c = 0; c < n; ++c) {
            if (r == 0 && c == 0) continue;
            const double u = dft_frequency(c, n);
            const double amp = std::pow(std::hypot(u, v), -(p.hurst + 1.0));
            const std::size_t cm = (n - c) % n;
            spectrum.at(c, r) = 0.5 * (z[r * n + c] + std::conj(z[rm * n + cm])) * amp;
        }
    }
    return inverse_dft(std::move(spectrum));
}

/// Fractional Brownian surface, min-max normalised to [0, 255].
inline GrayImage fbm_surface(const FbmParams& p) {
    const ComplexGrid field = fbm_field(p);
    std::vector<double> re(field.data.size());
    for (std::size_t i = 0; i < re.size(); ++i) re[i] = field.data[i].real();
    return detail::normalise_to_8bit_range(p.side, re);
}

struct GmrfParams {
    std::size_t side = 512;
    std::array<double, 4> beta{};  // horizontal, vertical, diagonal, anti-diagonal
    std::uint64_t seed = 0;
};

/// Stationary periodic GMRF sample: white noise shaped in the frequency
/// domain by sqrt(S), S(u, v) = 1 / (1 - 2 * sum_r beta_r cos(2*pi*(u, v).r)).
/// Normalised to [0, 255], which leaves the interaction parameters unchanged.
inline GrayImage gmrf_texture(const GmrfParams& p) {
    detail::require_pow2_side(p.side, "gmrf_texture");
    double sum_abs = 0.0;
    for (double b : p.beta) sum_abs += std::abs(b);
    if (!(2.0 * sum_abs < 1.0)) throw DomainError("gmrf_texture: need 2 * sum |beta| < 1 for a valid field");

    const std::size_t n = p.side;
    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    GrayImage noise(n, n);
    for (double& v : noise.values()) v = normal(rng);

    ComplexGrid spec = forward_dft(noise);
    constexpr std::array<std::array<int, 2>, 4> offsets{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}};
    for (std::size_t r = 0; r < n; ++r) {
        const double v = dft_frequency(r, n);
        for (std::size_t c = 0; c < n; ++c) {
            const double u = dft_frequency(c, n);
            double denom = 1.0;
            for (std::size_t k = 0; k < 4; ++k)
                denom -= 2.0 * p.beta[k] * std::cos(2.0 * std::numbers::pi * (u * offsets[k][0] + v * offsets[k][1]));
            spec.at(c, r) *= std::sqrt(1.0 / denom);
        }
    }
    const ComplexGrid field = inverse_dft(std::move(spec));
    std::vector<double> re(field.data.size());
    for (std::size_t i = 0; i < re.size(); ++i) re[i] = field.data[i].real();
    return detail::normalise_to_8bit_range(n, re);
}

/// i.i.d. Gaussian noise with the given mean and standard deviation.
inline GrayImage white_noise(std::size_t side, std::uint64_t seed, double mean = 127.5, double stddev = 32.0) {
    if (side == 0) throw DomainError("white_noise: side must be positive");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(mean, stddev);
    GrayImage img(side, side);
    for (double& v : img.values()) v = normal(rng);
    return img;
}

struct CorpusSample {
    std::string id;
    std::string label;
    std::string case_id;
    GrayImage image;
};

inline constexpr double kCorpusNoiseSigma = 20.0;
inline constexpr int kCorpusCasesPerClass = 5;

/// Centre frequency (cycles/image-width) of the middle band of the default
/// bank for this side; 32*sqrt(2) at 512.
inline double corpus_frequency(std::size_t side) {
    const auto bank = plan_bank(side);
    return bank.radial_frequencies[bank.radial_frequencies.size() / 2];
}

/// Four classes of gratings at 0, 45, 90 and 135 degrees, each sample with
/// a random phase and additive N(0, 20^2) noise. Every sample draws from its
/// own stream, so the corpus does not depend on generation order.
inline std::vector<CorpusSample> four_class_corpus(std::uint64_t seed, int per_class, std::size_t side = 512) {
    if (per_class < 4) throw DomainError("four_class_corpus: per_class must be at least 4");
    detail::require_pow2_side(side, "four_class_corpus");
    const double freq = corpus_frequency(side);

    std::vector<CorpusSample> out;
    out.reserve(static_cast<std::size_t>(per_class) * 4);
    constexpr std::array<int, 4> degrees{0, 45, 90, 135};
    for (std::size_t k = 0; k < degrees.size(); ++k) {
        const std::string label = fmt::format("deg{}", degrees[k]);
        for (int i = 0; i < per_class; ++i) {
            const std::uint64_t stream = k * 1'000'000ULL + static_cast<std::uint64_t>(i);
            std::mt19937_64 rng(mix_seed(seed, stream));
            std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
            std::normal_distribution<double> noise(0.0, kCorpusNoiseSigma);

            GratingParams g;
            g.side = side;
            g.frequency = freq;
            g.theta = degrees[k] * std::numbers::pi / 180.0;
            g.phase = phase(rng);
            GrayImage img = grating(g);
            for (double& v : img.values()) v += noise(rng);

            out.push_back({fmt::format("{}_{:03d}", label, i), label,
                           fmt::format("{}_case{}", label, i % kCorpusCasesPerClass), std::move(img)});
        }
    }
    return out;
}

}  // namespace texbank::synth
