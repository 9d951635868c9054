#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "texbank/error.hpp"

namespace texbank {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class Channel { red, green, blue };

/// 8-bit true-colour raster, row-major.
class RgbImage {
public:
    RgbImage(std::size_t width, std::size_t height, Rgb fill = {})
        : width_(width), height_(height), pixels_(width * height, fill) {
        if (width == 0 || height == 0) throw SizeError("RgbImage: dimensions must be positive");
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }

    Rgb& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
    const Rgb& at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
    std::span<const Rgb> pixels() const noexcept { return pixels_; }

    friend bool operator==(const RgbImage&, const RgbImage&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<Rgb> pixels_;
};

/// Single-channel real-valued image, row-major (index = y * width + x).
class GrayImage {
public:
    GrayImage(std::size_t width, std::size_t height, double fill = 0.0)
        : width_(width), height_(height), values_(width * height, fill) {
        if (width == 0 || height == 0) throw SizeError("GrayImage: dimensions must be positive");
    }

    GrayImage(std::size_t width, std::size_t height, std::vector<double> values)
        : width_(width), height_(height), values_(std::move(values)) {
        if (width == 0 || height == 0) throw SizeError("GrayImage: dimensions must be positive");
        if (values_.size() != width * height) throw SizeError("GrayImage: value count does not match dimensions");
    }

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& at(std::size_t x, std::size_t y) { return values_[y * width_ + x]; }
    double at(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    double mean() const {
        long double sum = 0.0L;
        for (double v : values_) sum += v;
        return static_cast<double>(sum / static_cast<long double>(values_.size()));
    }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t width_;
    std::size_t height_;
    std::vector<double> values_;
};

class ZeroMeanImage;
inline ZeroMeanImage subtract_mean(GrayImage img);
inline ZeroMeanImage pad_to_pow2(const ZeroMeanImage& img);
inline ZeroMeanImage apply_mask(const GrayImage& img, const std::vector<bool>& keep);

/// A GrayImage whose arithmetic mean has been removed. Only constructed by
/// subtract_mean, pad_to_pow2 and apply_mask, so the zero-mean invariant holds.
class ZeroMeanImage {
public:
    const GrayImage& image() const noexcept { return image_; }
    double removed_mean() const noexcept { return removed_mean_; }
    std::size_t width() const noexcept { return image_.width(); }
    std::size_t height() const noexcept { return image_.height(); }

private:
    ZeroMeanImage(GrayImage img, double removed) : image_(std::move(img)), removed_mean_(removed) {}

    GrayImage image_;
    double removed_mean_;

    friend ZeroMeanImage subtract_mean(GrayImage img);
    friend ZeroMeanImage pad_to_pow2(const ZeroMeanImage& img);
    friend ZeroMeanImage apply_mask(const GrayImage& img, const std::vector<bool>& keep);
};

inline bool is_pow2(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) noexcept {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

inline RgbImage load_image(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) throw IoError("cannot open image: " + path.string());
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw IoError("cannot read image: " + path.string());
    }
    cv::Mat bgr;
    try {
        bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    } catch (const cv::Exception& e) {
        throw FormatError("cannot decode image " + path.string() + ": " + e.what());
    }
    if (bgr.empty()) throw FormatError("cannot decode image: " + path.string());

    RgbImage out(static_cast<std::size_t>(bgr.cols), static_cast<std::size_t>(bgr.rows));
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            out.at(x, y) = Rgb{row[x][2], row[x][1], row[x][0]};
        }
    }
    return out;
}

/// Binary mask, nonzero pixels are kept.
inline std::vector<bool> load_mask(const std::filesystem::path& path, std::size_t width, std::size_t height) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) throw IoError("cannot open mask: " + path.string());
    cv::Mat m = cv::imread(path.string(), cv::IMREAD_GRAYSCALE);
    if (m.empty()) throw FormatError("cannot decode mask: " + path.string());
    if (static_cast<std::size_t>(m.cols) != width || static_cast<std::size_t>(m.rows) != height)
        throw SizeError("mask " + path.string() + " does not match image dimensions");
    std::vector<bool> keep(width * height);
    for (int y = 0; y < m.rows; ++y) {
        const auto* row = m.ptr<std::uint8_t>(y);
        for (int x = 0; x < m.cols; ++x) keep[y * width + x] = row[x] != 0;
    }
    return keep;
}

inline void save_png(const RgbImage& img, const std::filesystem::path& path) {
    cv::Mat bgr(static_cast<int>(img.height()), static_cast<int>(img.width()), CV_8UC3);
    for (std::size_t y = 0; y < img.height(); ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(static_cast<int>(y));
        for (std::size_t x = 0; x < img.width(); ++x) {
            const Rgb& p = img.at(x, y);
            row[x] = cv::Vec3b(p.b, p.g, p.r);
        }
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), bgr);
    } catch (const cv::Exception&) {
        ok = false;
    }
    if (!ok) throw IoError("cannot write image: " + path.string());
}

/// Rounds and clamps to [0, 255] and writes an 8-bit grayscale PNG.
inline void save_png(const GrayImage& img, const std::filesystem::path& path) {
    cv::Mat m(static_cast<int>(img.height()), static_cast<int>(img.width()), CV_8UC1);
    for (std::size_t y = 0; y < img.height(); ++y) {
        auto* row = m.ptr<std::uint8_t>(static_cast<int>(y));
        for (std::size_t x = 0; x < img.width(); ++x)
            row[x] = static_cast<std::uint8_t>(std::clamp(std::lround(img.at(x, y)), 0L, 255L));
    }
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), m);
    } catch (const cv::Exception&) {
        ok = false;
    }
    if (!ok) throw IoError("cannot write image: " + path.string());
}

inline GrayImage extract_channel(const RgbImage& img, Channel channel) {
    GrayImage out(img.width(), img.height());
    auto src = img.pixels();
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        switch (channel) {
            case Channel::red: dst[i] = src[i].r; break;
            case Channel::green: dst[i] = src[i].g; break;
            case Channel::blue: dst[i] = src[i].b; break;
        }
    }
    return out;
}

inline ZeroMeanImage subtract_mean(GrayImage img) {
    const double m = img.mean();
    for (double& v : img.values()) v -= m;
    // One correction pass absorbs the rounding left by the first.
    const double residual = img.mean();
    for (double& v : img.values()) v -= residual;
    return ZeroMeanImage(std::move(img), m + residual);
}

/// Square zero-filled canvas with power-of-two side, content at top-left,
/// then re-centred so the zero-mean invariant holds exactly.
inline ZeroMeanImage pad_to_pow2(const ZeroMeanImage& img) {
    const std::size_t side = next_pow2(std::max(img.width(), img.height()));
    if (side == img.width() && side == img.height()) return img;

    GrayImage canvas(side, side, 0.0);
    for (std::size_t y = 0; y < img.height(); ++y)
        for (std::size_t x = 0; x < img.width(); ++x) canvas.at(x, y) = img.image().at(x, y);
    ZeroMeanImage centred = subtract_mean(std::move(canvas));
    return ZeroMeanImage(centred.image_, img.removed_mean() + centred.removed_mean());
}

/// Zeroes pixels outside the mask and removes the mean of the kept pixels
/// from the kept pixels only.
inline ZeroMeanImage apply_mask(const GrayImage& img, const std::vector<bool>& keep) {
    if (keep.size() != img.size()) throw SizeError("apply_mask: mask size does not match image");
    long double sum = 0.0L;
    std::size_t kept = 0;
    auto src = img.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (keep[i]) {
            sum += src[i];
            ++kept;
        }
    }
    if (kept == 0) throw DegenerateError("apply_mask: mask keeps no pixels");
    const double m = static_cast<double>(sum / static_cast<long double>(kept));

    GrayImage out(img.width(), img.height(), 0.0);
    auto dst = out.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = keep[i] ? src[i] - m : 0.0;
    return ZeroMeanImage(std::move(out), m);
}

}  // namespace texbank
