#pragma once

// Dyadic bank of real Gabor filters applied in the frequency domain, plus
// the l1/l2 energy signatures of their magnitude responses.
//
// Units: radial frequencies in a BankConfig are quoted in cycles per image
// width (the way bank layouts are usually written down); every
// GaborFilterSpec carries f0 in cycles per pixel. Orientations are radians
// in [0, pi), measured from the +x (column) axis towards +y (row).

#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "texbank/error.hpp"
#include "texbank/feature_vector.hpp"
#include "texbank/fft.hpp"
#include "texbank/image.hpp"

namespace texbank {

inline constexpr double kDefaultFrequencyBandwidth = 1.0;                       // octaves
inline constexpr double kDefaultOrientationBandwidth = std::numbers::pi / 4.0;  // 45 degrees
inline constexpr int kDefaultOrientationCount = 4;

struct EnvelopeSigmas {
    double sigma_x;
    double sigma_y;
};

/// Gaussian envelope widths (pixels) that put the -6 dB contour of the
/// frequency response at the requested bandwidths.
inline EnvelopeSigmas compute_envelope_sigmas(double f0, double bandwidth_octaves, double orientation_bandwidth) {
    if (!(f0 > 0.0)) throw DomainError("compute_envelope_sigmas: f0 must be positive");
    if (!(bandwidth_octaves > 0.0)) throw DomainError("compute_envelope_sigmas: frequency bandwidth must be positive");
    if (!(orientation_bandwidth > 0.0 && orientation_bandwidth < std::numbers::pi))
        throw DomainError("compute_envelope_sigmas: orientation bandwidth must lie in (0, pi)");

    using std::numbers::ln2;
    using std::numbers::pi;
    using std::numbers::sqrt2;
    const double two_b = std::exp2(bandwidth_octaves);
    const double sigma_x = std::sqrt(ln2) * (two_b + 1.0) / (sqrt2 * pi * f0 * (two_b - 1.0));
    const double sigma_y = std::sqrt(ln2) / (sqrt2 * pi * f0 * std::tan(orientation_bandwidth / 2.0));
    return {sigma_x, sigma_y};
}

struct GaborFilterSpec {
    double f0;                     // cycles/pixel
    double theta;                  // radians
    double sigma_x;                // pixels
    double sigma_y;                // pixels
    double bandwidth_octaves;
    double orientation_bandwidth;  // radians

    void validate() const {
        if (!(f0 > 0.0 && f0 < 0.5)) throw DomainError("GaborFilterSpec: f0 must lie in (0, 0.5) cycles/pixel");
        if (!(sigma_x > 0.0 && sigma_y > 0.0)) throw DomainError("GaborFilterSpec: sigmas must be positive");
        if (!(theta >= 0.0 && theta < std::numbers::pi)) throw DomainError("GaborFilterSpec: theta must lie in [0, pi)");
    }
};

/// Real (cosine) impulse response at pixel offset (x, y).
inline double spatial_impulse_response(const GaborFilterSpec& spec, double x, double y) {
    const double c = std::cos(spec.theta);
    const double s = std::sin(spec.theta);
    const double xr = x * c + y * s;
    const double yr = -x * s + y * c;
    const double norm = 1.0 / (2.0 * std::numbers::pi * spec.sigma_x * spec.sigma_y);
    const double envelope =
        std::exp(-0.5 * (xr * xr / (spec.sigma_x * spec.sigma_x) + yr * yr / (spec.sigma_y * spec.sigma_y)));
    return norm * envelope * std::cos(2.0 * std::numbers::pi * spec.f0 * xr);
}

/// Two-lobe frequency response at (u, v) cycles/pixel. The frequency plane
/// is rotated by theta before the lobes are evaluated.
inline double frequency_response(const GaborFilterSpec& spec, double u, double v) {
    const double c = std::cos(spec.theta);
    const double s = std::sin(spec.theta);
    const double ur = u * c + v * s;
    const double vr = -u * s + v * c;
    constexpr double k = 2.0 * std::numbers::pi * std::numbers::pi;
    const double sx2 = spec.sigma_x * spec.sigma_x;
    const double vy = vr * vr * spec.sigma_y * spec.sigma_y;
    const double dm = ur - spec.f0;
    const double dp = ur + spec.f0;
    return std::exp(-k * (dm * dm * sx2 + vy)) + std::exp(-k * (dp * dp * sx2 + vy));
}

/// Which envelope width both axes take when the envelope is circular.
enum class CircularSigma {
    frequency_bandwidth,    // sigma_x of the pair (keeps the octave spacing)
    orientation_bandwidth,  // sigma_y of the pair
};

struct BankConfig {
    std::size_t image_width = 0;
    int orientation_count = 0;
    std::vector<double> orientations;        // radians
    std::vector<double> radial_frequencies;  // cycles/image-width
    std::vector<GaborFilterSpec> filters;    // frequency-major
    bool circular = true;
    CircularSigma circular_sigma = CircularSigma::frequency_bandwidth;

    std::size_t frequency_index(std::size_t filter) const { return filter / orientations.size(); }
    std::size_t orientation_index(std::size_t filter) const { return filter % orientations.size(); }
};

/// Number of dyadic centre frequencies 2^k*sqrt(2), k = 0 .. log2(width/2)-1,
/// times the orientation count, before any exclusion.
inline std::size_t candidate_filter_count(std::size_t image_width, int orientation_count) {
    if (!is_pow2(image_width) || image_width < 2) throw ConfigError("image width must be a power of two");
    return static_cast<std::size_t>(orientation_count) * static_cast<std::size_t>(std::countr_zero(image_width / 2));
}

/// Lays out the dyadic bank for a square image of side `image_width`.
///
/// Candidates are 2^k*sqrt(2) cycles/image-width for k = 0 .. log2(N/2)-1.
/// The two lowest (k = 0, 1) are dropped as too coarse to carry texture and
/// anything above (N/4)*sqrt(2) is dropped so the passband stays inside the
/// image. Orientations are j*pi/A, j = 0 .. A-1.
inline BankConfig plan_bank(std::size_t image_width,
                            int orientation_count = kDefaultOrientationCount,
                            double bandwidth_octaves = kDefaultFrequencyBandwidth,
                            double orientation_bandwidth = kDefaultOrientationBandwidth,
                            bool circular = true,
                            CircularSigma circular_sigma = CircularSigma::frequency_bandwidth) {
    if (!is_pow2(image_width)) throw ConfigError(fmt::format("image width {} is not a power of two", image_width));
    if (image_width < 16) throw ConfigError(fmt::format("image width {} is below the minimum of 16", image_width));
    if (orientation_count < 1) throw ConfigError("orientation count must be at least 1");

    BankConfig bank;
    bank.image_width = image_width;
    bank.orientation_count = orientation_count;
    bank.circular = circular;
    bank.circular_sigma = circular_sigma;

    for (int j = 0; j < orientation_count; ++j)
        bank.orientations.push_back(j * std::numbers::pi / orientation_count);

    const int candidates = std::countr_zero(image_width / 2);
    const double ceiling = static_cast<double>(image_width) / 4.0 * std::numbers::sqrt2;
    for (int k = 2; k < candidates; ++k) {
        const double f = std::ldexp(std::numbers::sqrt2, k);
        if (f <= ceiling * (1.0 + 1e-12)) bank.radial_frequencies.push_back(f);
    }
    if (bank.radial_frequencies.empty())
        throw ConfigError(fmt::format("image width {} retains no radial frequencies", image_width));

    for (double f : bank.radial_frequencies) {
        const double f0 = f / static_cast<double>(image_width);
        auto sig = compute_envelope_sigmas(f0, bandwidth_octaves, orientation_bandwidth);
        if (circular) {
            const double s = circular_sigma == CircularSigma::frequency_bandwidth ? sig.sigma_x : sig.sigma_y;
            sig = {s, s};
        }
        for (double theta : bank.orientations) {
            GaborFilterSpec spec{f0, theta, sig.sigma_x, sig.sigma_y, bandwidth_octaves, orientation_bandwidth};
            spec.validate();
            bank.filters.push_back(spec);
        }
    }
    return bank;
}

inline std::string orientation_label(double theta) {
    const double deg = theta * 180.0 / std::numbers::pi;
    const double rounded = std::round(deg);
    if (std::abs(deg - rounded) < 1e-9) return fmt::format("{}", static_cast<long>(rounded));
    return fmt::format("{:.3f}", deg);
}

/// Feature name for filter `i` of `bank`, e.g. "gabor_f3_o45".
inline std::string gabor_feature_name(const BankConfig& bank, std::size_t i) {
    return fmt::format("gabor_f{}_o{}", bank.frequency_index(i), orientation_label(bank.filters[i].theta));
}

inline nlohmann::json to_json(const BankConfig& bank) {
    nlohmann::json filters = nlohmann::json::array();
    for (std::size_t i = 0; i < bank.filters.size(); ++i) {
        const auto& f = bank.filters[i];
        filters.push_back({
            {"index", i},
            {"name", gabor_feature_name(bank, i)},
            {"f0_cycles_per_image_width", bank.radial_frequencies[bank.frequency_index(i)]},
            {"f0_cycles_per_pixel", f.f0},
            {"theta_rad", f.theta},
            {"theta_deg", f.theta * 180.0 / std::numbers::pi},
            {"sigma_x", f.sigma_x},
            {"sigma_y", f.sigma_y},
            {"bandwidth_octaves", f.bandwidth_octaves},
            {"orientation_bandwidth_rad", f.orientation_bandwidth},
        });
    }
    return {
        {"image_width", bank.image_width},
        {"orientation_count", bank.orientation_count},
        {"orientations_rad", bank.orientations},
        {"radial_frequencies_cycles_per_image_width", bank.radial_frequencies},
        {"circular", bank.circular},
        {"circular_sigma",
         bank.circular_sigma == CircularSigma::frequency_bandwidth ? "frequency_bandwidth" : "orientation_bandwidth"},
        {"filters", std::move(filters)},
    };
}

/// Frequency response sampled on an n x n DFT grid (row = v, column = u),
/// symmetrised so that H[k] == H[-k] holds exactly. That keeps the filtered
/// output of a real image real; it only alters the Nyquist row and column.
inline std::vector<double> sample_frequency_response(const GaborFilterSpec& spec, std::size_t n) {
    std::vector<double> raw(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        const double v = dft_frequency(r, n);
        for (std::size_t c = 0; c < n; ++c) raw[r * n + c] = frequency_response(spec, dft_frequency(c, n), v);
    }
    std::vector<double> out(n * n);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t rm = (n - r) % n;
        for (std::size_t c = 0; c < n; ++c) {
            const std::size_t cm = (n - c) % n;
            out[r * n + c] = 0.5 * (raw[r * n + c] + raw[rm * n + cm]);
        }
    }
    return out;
}

/// |I_f(x, y)| of one filter over an M x N image.
struct MagnitudeResponse {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> values;
    std::size_t source_filter = 0;
};

namespace detail {

inline MagnitudeResponse filter_spectrum(const ComplexGrid& spectrum, std::span<const double> response,
                                         std::size_t source_filter) {
    ComplexGrid product = spectrum;
    for (std::size_t i = 0; i < product.data.size(); ++i) product.data[i] *= response[i];
    const ComplexGrid spatial = inverse_dft(std::move(product));

    MagnitudeResponse out{spatial.side, spatial.side, std::vector<double>(spatial.data.size()), source_filter};
    for (std::size_t i = 0; i < spatial.data.size(); ++i) out.values[i] = std::abs(spatial.data[i].real());
    return out;
}

inline void require_pow2_square(const ZeroMeanImage& img, const char* who) {
    if (img.width() != img.height() || !is_pow2(img.width()))
        throw SizeError(fmt::format("{}: image must be square with power-of-two side (got {}x{}); use pad_to_pow2",
                                    who, img.width(), img.height()));
}

}  // namespace detail

/// Filters `img` by multiplying its DFT with the sampled frequency response,
/// then takes the magnitude of the real inverse transform.
inline MagnitudeResponse apply_filter(const ZeroMeanImage& img, const GaborFilterSpec& spec,
                                      std::size_t source_filter = 0) {
    detail::require_pow2_square(img, "apply_filter");
    const auto response = sample_frequency_response(spec, img.width());
    return detail::filter_spectrum(forward_dft(img.image()), response, source_filter);
}

/// E_k = mean of |I_f|^k, k in {1, 2}.
inline double energy_signature(const MagnitudeResponse& resp, int k) {
    if (k != 1 && k != 2) throw DomainError(fmt::format("energy_signature: norm order {} is not 1 or 2", k));
    if (resp.values.empty()) throw SizeError("energy_signature: empty response");
    long double sum = 0.0L;
    for (double v : resp.values) {
        const double a = std::abs(v);
        sum += k == 1 ? a : a * a;
    }
    return static_cast<double>(sum / static_cast<long double>(resp.values.size()));
}

/// A bank with every frequency response pre-sampled on its DFT grid.
/// Immutable after construction, so one instance can serve many threads.
class SampledBank {
public:
    explicit SampledBank(BankConfig bank) : bank_(std::move(bank)) {
        responses_.reserve(bank_.filters.size());
        for (const auto& f : bank_.filters) responses_.push_back(sample_frequency_response(f, bank_.image_width));
    }

    const BankConfig& config() const noexcept { return bank_; }
    std::span<const double> response(std::size_t i) const { return responses_[i]; }

    std::vector<MagnitudeResponse> apply(const ZeroMeanImage& img) const {
        detail::require_pow2_square(img, "SampledBank::apply");
        if (img.width() != bank_.image_width)
            throw SizeError(fmt::format("image side {} does not match bank width {}", img.width(), bank_.image_width));
        const ComplexGrid spectrum = forward_dft(img.image());
        std::vector<MagnitudeResponse> out;
        out.reserve(responses_.size());
        for (std::size_t i = 0; i < responses_.size(); ++i)
            out.push_back(detail::filter_spectrum(spectrum, responses_[i], i));
        return out;
    }

    FeatureVector features(const ZeroMeanImage& img, int k = 1) const {
        if (k != 1 && k != 2) throw DomainError(fmt::format("gabor_features: norm order {} is not 1 or 2", k));
        detail::require_pow2_square(img, "gabor_features");
        if (img.width() != bank_.image_width)
            throw SizeError(fmt::format("image side {} does not match bank width {}", img.width(), bank_.image_width));
        const ComplexGrid spectrum = forward_dft(img.image());
        std::vector<std::string> names;
        std::vector<double> values;
        for (std::size_t i = 0; i < responses_.size(); ++i) {
            names.push_back(gabor_feature_name(bank_, i));
            values.push_back(energy_signature(detail::filter_spectrum(spectrum, responses_[i], i), k));
        }
        return FeatureVector(std::move(names), std::move(values));
    }

private:
    BankConfig bank_;
    std::vector<std::vector<double>> responses_;
};

/// One energy per filter, frequency-major then orientation.
inline FeatureVector gabor_features(const ZeroMeanImage& img, const BankConfig& bank, int k = 1) {
    return SampledBank(bank).features(img, k);
}

}  // namespace texbank
