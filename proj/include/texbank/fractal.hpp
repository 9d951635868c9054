#pragma once

// Fractal dimension of a grey-level intensity surface, in [2, 3].
//
// Two estimators are provided. The default models the surface as
// fractional Brownian motion: E[(I(p + d) - I(p))^2] ~ |d|^(2H), so the
// log-log slope of the mean squared increment against lag gives H and
// FD = 3 - H. Differential box counting is kept as an alternative; it reads
// systematically low on rough surfaces (about 2.4 for an H = 0.2 fBm).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "texbank/error.hpp"
#include "texbank/image.hpp"

namespace texbank {

enum class FdMethod { variogram, box_counting };

inline FdMethod parse_fd_method(std::string_view name) {
    if (name == "variogram") return FdMethod::variogram;
    if (name == "box_counting") return FdMethod::box_counting;
    throw ConfigError("unknown fractal dimension method: " + std::string(name));
}

namespace detail {

/// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

inline void require_fd_input(const GrayImage& img) {
    if (img.width() != img.height()) throw SizeError("fractal_dimension: image must be square");
    if (img.width() < 8) throw SizeError("fractal_dimension: side must be at least 8");
}

/// Scales 2, 4, ... up to side/4 for box counting, or lags 1, 2, ... up to
/// side/8 for the variogram. Both give log2(side/4) points.
inline std::vector<std::size_t> dyadic_scales(std::size_t first, std::size_t last) {
    std::vector<std::size_t> out;
    for (std::size_t s = first; s <= last; s *= 2) out.push_back(s);
    return out;
}

inline bool is_constant(const GrayImage& img) {
    const auto v = img.values();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return !(*hi > *lo);
}

}  // namespace detail

/// Differential box counting over box sizes s = 2, 4, ..., side/4 with box
/// height h = s * (intensity range) / side.
inline double box_counting_dimension(const GrayImage& img) {
    detail::require_fd_input(img);
    const std::size_t side = img.width();
    const auto scales = detail::dyadic_scales(2, side / 4);
    if (scales.size() < 3) throw DegenerateError("box_counting_dimension: fewer than 3 box sizes available");
    if (detail::is_constant(img)) return 2.0;

    const auto v = img.values();
    const double lo = *std::min_element(v.begin(), v.end());
    const double range = *std::max_element(v.begin(), v.end()) - lo;

    std::vector<double> log_inv_s, log_n;
    for (std::size_t s : scales) {
        const double h = static_cast<double>(s) * range / static_cast<double>(side);
        const std::size_t boxes = side / s;
        double total = 0.0;
        for (std::size_t by = 0; by < boxes; ++by) {
            for (std::size_t bx = 0; bx < boxes; ++bx) {
                double mn = img.at(bx * s, by * s) - lo;
                double mx = mn;
                for (std::size_t y = by * s; y < (by + 1) * s; ++y) {
                    for (std::size_t x = bx * s; x < (bx + 1) * s; ++x) {
                        const double z = img.at(x, y) - lo;
                        mn = std::min(mn, z);
                        mx = std::max(mx, z);
                    }
                }
                total += std::ceil(mx / h) - std::ceil(mn / h) + 1.0;
            }
        }
        log_inv_s.push_back(-std::log(static_cast<double>(s)));
        log_n.push_back(std::log(total));
    }
    return std::clamp(detail::ls_slope(log_inv_s, log_n), 2.0, 3.0);
}

/// fBm increment estimator over lags 1, 2, 4, ..., side/8, pooling
/// horizontal and vertical pixel pairs.
inline double variogram_dimension(const GrayImage& img) {
    detail::require_fd_input(img);
    const std::size_t side = img.width();
    const auto lags = detail::dyadic_scales(1, side / 8);
    if (lags.size() < 3) throw DegenerateError("variogram_dimension: fewer than 3 lags available");
    if (detail::is_constant(img)) return 2.0;

    std::vector<double> log_lag, log_var;
    for (std::size_t d : lags) {
        long double sum = 0.0L;
        std::size_t n = 0;
        for (std::size_t y = 0; y < side; ++y) {
            for (std::size_t x = 0; x + d < side; ++x) {
                const double dh = img.at(x + d, y) - img.at(x, y);
                const double dv = img.at(y, x + d) - img.at(y, x);
                sum += dh * dh + dv * dv;
                n += 2;
            }
        }
        const double mean_sq = static_cast<double>(sum / static_cast<long double>(n));
        if (!(mean_sq > 0.0)) return 2.0;
        log_lag.push_back(std::log(static_cast<double>(d)));
        log_var.push_back(std::log(mean_sq));
    }
    const double hurst = detail::ls_slope(log_lag, log_var) / 2.0;
    return std::clamp(3.0 - hurst, 2.0, 3.0);
}

inline double fractal_dimension(const GrayImage& img, FdMethod method = FdMethod::variogram) {
    return method == FdMethod::variogram ? variogram_dimension(img) : box_counting_dimension(img);
}

}  // namespace texbank
