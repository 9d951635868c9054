#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "texbank/synth.hpp"

namespace texbank::synth {
namespace {

using std::numbers::pi;

double mean_abs_step(const GrayImage& g) {
    double s = 0.0;
    std::size_t n = 0;
    for (std::size_t y = 0; y < g.height(); ++y)
        for (std::size_t x = 0; x + 1 < g.width(); ++x, ++n) s += std::abs(g.at(x + 1, y) - g.at(x, y));
    return s / static_cast<double>(n);
}

TEST(Grating, ZeroFrequencyIsConstant) {
    const auto a = grating({32, 0.0, 0.7, 0.0});
    for (double v : a.values()) EXPECT_DOUBLE_EQ(v, 255.0);
    const auto b = grating({32, 0.0, 0.0, pi / 2});
    for (double v : b.values()) EXPECT_NEAR(v, 255.0 * std::pow(std::cos(pi / 4), 2), 1e-12);
}

TEST(Grating, ZeroOrientationIsConstantAlongY) {
    const auto g = grating({64, 5.0, 0.0, 0.3});
    for (std::size_t y = 1; y < 64; ++y)
        for (std::size_t x = 0; x < 64; ++x) EXPECT_EQ(g.at(x, y), g.at(x, 0));
    EXPECT_NEAR(g.at(0, 0), 127.5 * (1 + std::cos(0.3)), 1e-12);
}

TEST(Grating, SnapsToIntegerBins) {
    // 32*sqrt(2) at 45 degrees rounds to the (32, 32) bin.
    const auto g = grating({128, 32 * std::numbers::sqrt2, pi / 4, 0.0});
    EXPECT_NEAR(g.at(1, 1), 127.5 * (1 + std::cos(2 * pi * 64.0 / 128.0)), 1e-9);
    GratingParams exact{128, 10.3, 0.0, 0.0, false};
    EXPECT_NEAR(grating(exact).at(1, 0), 127.5 * (1 + std::cos(2 * pi * 10.3 / 128)), 1e-12);
}

TEST(Grating, FrequencyAtNyquistIsDomainError) {
    EXPECT_THROW(grating({64, 32.0, 0.0, 0.0}), DomainError);
    EXPECT_THROW(grating({64, -1.0, 0.0, 0.0}), DomainError);
}

TEST(Grating, ZeroMeanAfterCentringForAnyPhase) {
    for (double phase : {0.0, 0.4, 1.9, 3.1}) {
        const auto z = subtract_mean(grating({64, 8.0, pi / 4, phase}));
        EXPECT_LT(std::abs(z.image().mean()), 1e-9);
    }
}

TEST(Fbm, DeterministicAndSeedSensitive) {
    const auto a = fbm_surface({64, 0.5, 1});
    const auto b = fbm_surface({64, 0.5, 1});
    const auto c = fbm_surface({64, 0.5, 2});
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Fbm, FieldIsRealBeforeNormalisation) {
    for (double h : {0.2, 0.5, 0.8}) {
        const auto field = fbm_field({128, h, 9});
        double worst = 0.0, scale = 0.0;
        for (const auto& z : field.data) {
            worst = std::max(worst, std::abs(z.imag()));
            scale = std::max(scale, std::abs(z.real()));
        }
        EXPECT_LT(worst, 1e-9);
        EXPECT_GT(scale, 0.0);
    }
}

TEST(Fbm, NormalisedToByteRange) {
    const auto g = fbm_surface({64, 0.3, 4});
    const auto [lo, hi] = std::minmax_element(g.values().begin(), g.values().end());
    EXPECT_DOUBLE_EQ(*lo, 0.0);
    EXPECT_DOUBLE_EQ(*hi, 255.0);
}

TEST(Fbm, SmootherForLargerHurst) {
    for (std::uint64_t seed : {1u, 2u, 3u})
        EXPECT_LT(mean_abs_step(fbm_surface({256, 0.8, seed})), mean_abs_step(fbm_surface({256, 0.2, seed})));
}

TEST(Fbm, ParameterErrors) {
    EXPECT_THROW(fbm_surface({100, 0.5, 0}), DomainError);
    EXPECT_THROW(fbm_surface({64, 0.0, 0}), DomainError);
    EXPECT_THROW(fbm_surface({64, 1.0, 0}), DomainError);
}

TEST(GmrfTexture, DeterministicAndValidated) {
    const GmrfParams p{64, {0.2, 0.1, 0.0, 0.0}, 5};
    EXPECT_EQ(gmrf_texture(p), gmrf_texture(p));
    EXPECT_THROW(gmrf_texture({64, {0.25, 0.25, 0.0, 0.0}, 5}), DomainError);
}

TEST(Corpus, CountsLabelsAndIds) {
    const auto c = four_class_corpus(42, 5, 64);
    ASSERT_EQ(c.size(), 20u);
    std::map<std::string, int> per;
    for (const auto& s : c) {
        ++per[s.label];
        EXPECT_EQ(s.image.width(), 64u);
        EXPECT_TRUE(s.id.starts_with(s.label + "_"));
        EXPECT_TRUE(s.case_id.starts_with(s.label + "_case"));
    }
    EXPECT_EQ(per, (std::map<std::string, int>{{"deg0", 5}, {"deg135", 5}, {"deg45", 5}, {"deg90", 5}}));
    EXPECT_EQ(c.front().id, "deg0_000");
}

TEST(Corpus, DeterministicAndPrefixStable) {
    const auto a = four_class_corpus(7, 4, 32);
    const auto b = four_class_corpus(7, 4, 32);
    const auto longer = four_class_corpus(7, 6, 32);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].image, b[i].image);
    // Per-sample streams: sample i of a class does not depend on per_class.
    EXPECT_EQ(a[0].image, longer[0].image);
    EXPECT_EQ(a[4].image, longer[6].image);
    EXPECT_NE(four_class_corpus(8, 4, 32)[0].image, a[0].image);
}

TEST(Corpus, MidBankFrequency) {
    EXPECT_DOUBLE_EQ(corpus_frequency(512), 32 * std::numbers::sqrt2);
    EXPECT_THROW(four_class_corpus(1, 3, 64), DomainError);
}

TEST(WhiteNoise, MomentsMatch) {
    const auto g = white_noise(256, 3, 100.0, 10.0);
    double s = 0.0;
    for (double v : g.values()) s += (v - 100.0) * (v - 100.0);
    EXPECT_NEAR(g.mean(), 100.0, 0.2);
    EXPECT_NEAR(std::sqrt(s / static_cast<double>(g.size())), 10.0, 0.2);
}

}  // namespace
}  // namespace texbank::synth
