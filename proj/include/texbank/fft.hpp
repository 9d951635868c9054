#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <opencv2/core.hpp>

#include "texbank/error.hpp"
#include "texbank/image.hpp"

namespace texbank {

/// Square grid of complex samples, row-major. Layout-compatible with CV_64FC2.
struct ComplexGrid {
    std::size_t side = 0;
    std::vector<std::complex<double>> data;

    std::complex<double>& at(std::size_t col, std::size_t row) { return data[row * side + col]; }
    const std::complex<double>& at(std::size_t col, std::size_t row) const { return data[row * side + col]; }
};

/// Signed frequency in cycles/sample of DFT bin `index` on an n-point grid.
inline double dft_frequency(std::size_t index, std::size_t n) noexcept {
    const auto i = static_cast<double>(index);
    const auto N = static_cast<double>(n);
    return index < n / 2 ? i / N : (i - N) / N;
}

namespace detail {

inline cv::Mat as_mat(ComplexGrid& g) {
    const int n = static_cast<int>(g.side);
    return cv::Mat(n, n, CV_64FC2, static_cast<void*>(g.data.data()));
}

}  // namespace detail

/// Unnormalised forward 2-D DFT of a real square image.
inline ComplexGrid forward_dft(const GrayImage& img) {
    if (img.width() != img.height()) throw SizeError("forward_dft: image must be square");
    ComplexGrid out{img.width(), std::vector<std::complex<double>>(img.size())};
    for (std::size_t i = 0; i < img.size(); ++i) out.data[i] = img.values()[i];
    cv::Mat m = detail::as_mat(out);
    cv::dft(m, m);
    return out;
}

inline ComplexGrid forward_dft(ComplexGrid grid) {
    cv::Mat m = detail::as_mat(grid);
    cv::dft(m, m);
    return grid;
}

/// Inverse 2-D DFT scaled by 1/(side*side).
inline ComplexGrid inverse_dft(ComplexGrid grid) {
    cv::Mat m = detail::as_mat(grid);
    cv::dft(m, m, cv::DFT_INVERSE | cv::DFT_SCALE);
    return grid;
}

}  // namespace texbank
