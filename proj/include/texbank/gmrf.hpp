#pragma once

#include <array>
#include <cmath>
#include <algorithm>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "texbank/error.hpp"
#include "texbank/feature_vector.hpp"
#include "texbank/image.hpp"

namespace texbank {

/// Least-squares fit of a second-order Gaussian Markov random field
///   x(s) = sum_r beta_r * (x(s + r) + x(s - r)) + e(s)
/// with r in {(1,0), (0,1), (1,1), (1,-1)}.
struct GmrfEstimate {
    std::array<double, 4> beta{};            // horizontal, vertical, diagonal, anti-diagonal
    std::array<double, 4> standard_error{};  // neighbourhood sandwich, see estimate_gmrf
    double residual_variance = 0.0;
    std::size_t sample_count = 0;
};

inline GmrfEstimate estimate_gmrf(const GrayImage& img) {
    if (img.width() < 5 || img.height() < 5) throw SizeError("gmrf: image must be at least 5x5");
    const double mean = img.mean();
    const auto at = [&](std::size_t x, std::size_t y) { return img.at(x, y) - mean; };

    const std::size_t w = img.width() - 2;
    const std::size_t h = img.height() - 2;
    std::vector<Eigen::Vector4d> regressors(w * h);
    std::vector<double> targets(w * h);
    Eigen::Matrix4d qtq = Eigen::Matrix4d::Zero();
    Eigen::Vector4d qty = Eigen::Vector4d::Zero();
    double yty = 0.0;
    for (std::size_t y = 1; y + 1 < img.height(); ++y) {
        for (std::size_t x = 1; x + 1 < img.width(); ++x) {
            const Eigen::Vector4d q(at(x + 1, y) + at(x - 1, y),
                                    at(x, y + 1) + at(x, y - 1),
                                    at(x + 1, y + 1) + at(x - 1, y - 1),
                                    at(x + 1, y - 1) + at(x - 1, y + 1));
            const double v = at(x, y);
            qtq.noalias() += q * q.transpose();
            qty += q * v;
            yty += v * v;
            regressors[(y - 1) * w + (x - 1)] = q;
            targets[(y - 1) * w + (x - 1)] = v;
        }
    }
    const std::size_t n = w * h;

    const Eigen::FullPivLU<Eigen::Matrix4d> lu(qtq);
    const double scale = qtq.cwiseAbs().maxCoeff();
    if (!(scale > 0.0) || lu.rank() < 4 || std::abs(lu.determinant()) <= 1e-12 * std::pow(scale, 4))
        throw SingularError("gmrf: normal equations are rank-deficient");

    const Eigen::Vector4d beta = lu.solve(qty);
    const double rss = std::max(0.0, yty - 2.0 * beta.dot(qty) + beta.dot(qtq * beta));
    const double sigma2 = rss / (static_cast<double>(n) - 4.0);
    const Eigen::Matrix4d inv = lu.inverse();

    // Every pixel is both a response and part of its neighbours' regressors,
    // so per-pixel scores q*e are correlated within the 3x3 window. Plain
    // sigma^2 (Q^T Q)^-1 ignores that and is ~sqrt(2) too small on white
    // noise; the sandwich below sums score cross-products over the window.
    std::vector<Eigen::Vector4d> score(n);
    for (std::size_t i = 0; i < n; ++i) score[i] = regressors[i] * (targets[i] - beta.dot(regressors[i]));
    Eigen::Matrix4d meat = Eigen::Matrix4d::Zero();
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            Eigen::Vector4d window = Eigen::Vector4d::Zero();
            for (std::size_t yy = y == 0 ? 0 : y - 1; yy <= std::min(y + 1, h - 1); ++yy)
                for (std::size_t xx = x == 0 ? 0 : x - 1; xx <= std::min(x + 1, w - 1); ++xx) window += score[yy * w + xx];
            meat.noalias() += score[y * w + x] * window.transpose();
        }
    }
    meat = 0.5 * (meat + meat.transpose());
    const Eigen::Matrix4d cov = inv * meat * inv;

    GmrfEstimate out;
    for (int i = 0; i < 4; ++i) {
        out.beta[i] = beta(i);
        // The windowed sum is not guaranteed positive; fall back to the plain
        // estimate in that (pathological) case.
        out.standard_error[i] = std::sqrt(cov(i, i) > 0.0 ? cov(i, i) : sigma2 * inv(i, i));
    }
    out.residual_variance = sigma2;
    out.sample_count = n;
    return out;
}

/// Four interaction parameters plus the residual variance.
inline FeatureVector gmrf_features(const GrayImage& img) {
    const auto e = estimate_gmrf(img);
    return FeatureVector({"gmrf_h", "gmrf_v", "gmrf_d1", "gmrf_d2", "gmrf_var"},
                         {e.beta[0], e.beta[1], e.beta[2], e.beta[3], e.residual_variance});
}

}  // namespace texbank
