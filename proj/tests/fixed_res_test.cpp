#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "texbank/feature_vector.hpp"
#include "texbank/fractal.hpp"
#include "texbank/glcm.hpp"
#include "texbank/gmrf.hpp"
#include "texbank/quantize.hpp"
#include "texbank/rlm.hpp"
#include "texbank/synth.hpp"

namespace texbank {
namespace {

GrayImage checkerboard(std::size_t n) {
    GrayImage g(n, n);
    for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) g.at(x, y) = (x + y) % 2 ? 255.0 : 0.0;
    return g;
}

QuantizedImage random_quantized(std::mt19937_64& rng, int levels) {
    std::uniform_int_distribution<std::size_t> dim(2, 40);
    const std::size_t w = dim(rng), h = dim(rng);
    QuantizedImage q{w, h, levels, std::vector<int>(w * h)};
    std::uniform_int_distribution<int> lv(0, levels - 1);
    for (int& v : q.values) v = lv(rng);
    return q;
}

double value_of(const FeatureVector& f, const std::string& name) {
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f.name(i) == name) return f[i];
    throw std::out_of_range(name);
}

TEST(Quantize, SpansAllLevelsAndClampsTheMaximum) {
    const GrayImage g(4, 1, std::vector<double>{0.0, 0.25, 0.5, 1.0});
    const auto q = quantize(g, 4);
    EXPECT_EQ(q.values, (std::vector<int>{0, 1, 2, 3}));
    const auto c = quantize(GrayImage(3, 3, 42.0), 16);
    for (int v : c.values) EXPECT_EQ(v, 0);
    EXPECT_THROW(quantize(g, 1), DomainError);
}

TEST(Quantize, InvariantUnderAffineIntensityChange) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    GrayImage g(20, 20);
    for (double& v : g.values()) v = u(rng);
    GrayImage a(20, 20);
    for (std::size_t i = 0; i < g.size(); ++i) a.values()[i] = 3.0 * g.values()[i] - 17.0;
    // Powers of two avoid rounding at bin edges after scaling.
    EXPECT_EQ(quantize(g, 16).values, quantize(a, 16).values);
}

TEST(FractalDimension, ConstantSurfaceIsTwo) {
    EXPECT_EQ(fractal_dimension(GrayImage(64, 64, 5.0)), 2.0);
    EXPECT_EQ(fractal_dimension(GrayImage(64, 64, 5.0), FdMethod::box_counting), 2.0);
}

TEST(FractalDimension, FbmWithHalfHurstNearTwoAndAHalf) {
    const auto img = synth::fbm_surface({512, 0.5, 7});
    EXPECT_NEAR(fractal_dimension(img), 2.5, 0.15);
}

TEST(FractalDimension, DecreasesWithHurst) {
    for (std::uint64_t seed : {1u, 2u}) {
        const double a = fractal_dimension(synth::fbm_surface({256, 0.2, seed}));
        const double b = fractal_dimension(synth::fbm_surface({256, 0.5, seed}));
        const double c = fractal_dimension(synth::fbm_surface({256, 0.8, seed}));
        EXPECT_GT(a, b);
        EXPECT_GT(b, c);
    }
}

TEST(FractalDimension, BoxCountingOrdersRoughness) {
    const double a = box_counting_dimension(synth::fbm_surface({256, 0.2, 3}));
    const double c = box_counting_dimension(synth::fbm_surface({256, 0.8, 3}));
    EXPECT_GT(a, c);
    EXPECT_GE(c, 2.0);
    EXPECT_LE(a, 3.0);
}

TEST(FractalDimension, InputErrors) {
    EXPECT_THROW(fractal_dimension(GrayImage(64, 32, 1.0)), SizeError);
    EXPECT_THROW(fractal_dimension(GrayImage(4, 4, 1.0)), SizeError);
    EXPECT_THROW(fractal_dimension(GrayImage(8, 8, 1.0), FdMethod::box_counting), DegenerateError);
    EXPECT_THROW(fractal_dimension(GrayImage(16, 16, 1.0)), DegenerateError);
    EXPECT_THROW(parse_fd_method("hausdorff"), ConfigError);
    EXPECT_EQ(parse_fd_method("box_counting"), FdMethod::box_counting);
}

TEST(FractalDimension, AlwaysWithinTwoAndThree) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = std::size_t{32} << (trial % 3);
        GrayImage g(n, n);
        std::uniform_real_distribution<double> u(-1000.0, 1000.0);
        const int mode = trial % 3;
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t x = 0; x < n; ++x)
                g.at(x, y) = mode == 0 ? u(rng) : mode == 1 ? double(x * x + y) : (x / 4 + y / 4) % 2 * 100.0;
        for (FdMethod m : {FdMethod::variogram, FdMethod::box_counting}) {
            const double d = fractal_dimension(g, m);
            EXPECT_GE(d, 2.0);
            EXPECT_LE(d, 3.0);
        }
    }
}

TEST(Gmrf, WhiteNoiseParametersAreInsignificant) {
    const auto e = estimate_gmrf(synth::white_noise(128, 5));
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_GT(e.standard_error[k], 0.0);
        EXPECT_LT(std::abs(e.beta[k]), 3.0 * e.standard_error[k]) << k;
    }
    EXPECT_NEAR(e.residual_variance, 32.0 * 32.0, 0.1 * 32.0 * 32.0);
}

TEST(Gmrf, RecoversHorizontalInteraction) {
    const auto e = estimate_gmrf(synth::gmrf_texture({256, {0.4, 0.0, 0.0, 0.0}, 11}));
    EXPECT_NEAR(e.beta[0], 0.4, 0.05);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(e.beta[k], 0.0, 0.05);
}

TEST(Gmrf, RecoversMixedInteractions) {
    const auto e = estimate_gmrf(synth::gmrf_texture({256, {0.15, 0.2, -0.05, 0.05}, 12}));
    EXPECT_NEAR(e.beta[0], 0.15, 0.05);
    EXPECT_NEAR(e.beta[1], 0.2, 0.05);
    EXPECT_NEAR(e.beta[2], -0.05, 0.05);
    EXPECT_NEAR(e.beta[3], 0.05, 0.05);
}

TEST(Gmrf, DegenerateInputs) {
    EXPECT_THROW(estimate_gmrf(GrayImage(32, 32, 3.0)), SingularError);
    EXPECT_THROW(estimate_gmrf(GrayImage(4, 10, 3.0)), SizeError);
    EXPECT_THROW(synth::gmrf_texture({64, {0.3, 0.3, 0.0, 0.0}, 1}), DomainError);
    const auto f = gmrf_features(synth::white_noise(64, 2));
    EXPECT_EQ(f.names(), (std::vector<std::string>{"gmrf_h", "gmrf_v", "gmrf_d1", "gmrf_d2", "gmrf_var"}));
}

TEST(Glcm, ConstantImage) {
    const auto f = glcm_features(quantize(GrayImage(16, 16, 9.0), 64));
    EXPECT_EQ(value_of(f, "glcm_contrast"), 0.0);
    EXPECT_EQ(value_of(f, "glcm_asm"), 1.0);
    EXPECT_EQ(value_of(f, "glcm_homogeneity"), 1.0);
    EXPECT_EQ(value_of(f, "glcm_entropy"), 0.0);
    EXPECT_EQ(value_of(f, "glcm_dissimilarity"), 0.0);
    EXPECT_EQ(value_of(f, "glcm_correlation"), 1.0);
}

TEST(Glcm, CheckerboardHorizontalNeighbours) {
    const Direction horizontal[] = {Direction::deg0};
    const auto q = quantize(checkerboard(8), 2);
    const auto m = cooccurrence_matrix(q, 1, horizontal);
    EXPECT_DOUBLE_EQ(m.at(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(m.at(1, 0), 0.5);
    EXPECT_EQ(m.at(0, 0), 0.0);
    EXPECT_EQ(m.pair_count, 2u * 8u * 7u);
    const auto f = glcm_statistics(m);
    EXPECT_DOUBLE_EQ(value_of(f, "glcm_contrast"), 1.0);
    EXPECT_DOUBLE_EQ(value_of(f, "glcm_correlation"), -1.0);
    EXPECT_DOUBLE_EQ(value_of(f, "glcm_entropy"), std::log(2.0));
    // Diagonal neighbours on a checkerboard always share a value.
    const Direction diag[] = {Direction::deg45};
    EXPECT_EQ(value_of(glcm_statistics(cooccurrence_matrix(q, 1, diag)), "glcm_contrast"), 0.0);
}

TEST(Glcm, NormalisedAndSymmetricOnRandomImages) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 40; ++trial) {
        const auto q = random_quantized(rng, 8);
        const auto m = cooccurrence_matrix(q, 1 + trial % 2);
        double sum = 0.0;
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) {
                sum += m.at(i, j);
                EXPECT_EQ(m.at(i, j), m.at(j, i));
                EXPECT_GE(m.at(i, j), 0.0);
            }
        EXPECT_NEAR(sum, 1.0, 1e-12);
        const auto f = glcm_statistics(m);
        EXPECT_GE(value_of(f, "glcm_correlation"), -1.0 - 1e-12);
        EXPECT_LE(value_of(f, "glcm_correlation"), 1.0 + 1e-12);
        EXPECT_GT(value_of(f, "glcm_asm"), 0.0);
        EXPECT_LE(value_of(f, "glcm_asm"), 1.0);
        EXPECT_LE(value_of(f, "glcm_entropy"), 2.0 * std::log(8.0) + 1e-12);
    }
}

TEST(Glcm, NoPairsIsSizeError) {
    const auto q = quantize(GrayImage(1, 1, 0.0), 4);
    EXPECT_THROW(cooccurrence_matrix(q, 1), SizeError);
    EXPECT_THROW(cooccurrence_matrix(quantize(GrayImage(4, 4, 0.0), 4), 0), DomainError);
}

TEST(Rlm, ConstantImageIsOneRunPerLine) {
    const std::size_t n = 16;
    const auto q = quantize(GrayImage(n, n, 1.0), 16);
    const Direction horizontal[] = {Direction::deg0};
    const auto f = rlm_features(q, horizontal);
    EXPECT_DOUBLE_EQ(value_of(f, "rlm_lre"), double(n * n));
    EXPECT_DOUBLE_EQ(value_of(f, "rlm_sre"), 1.0 / double(n * n));
    EXPECT_DOUBLE_EQ(value_of(f, "rlm_rp"), 1.0 / double(n));
}

TEST(Rlm, CheckerboardHasOnlyUnitRunsAcross) {
    const auto q = quantize(checkerboard(8), 2);
    const Direction straight[] = {Direction::deg0, Direction::deg90};
    const auto f = rlm_features(q, straight);
    EXPECT_DOUBLE_EQ(value_of(f, "rlm_sre"), 1.0);
    EXPECT_DOUBLE_EQ(value_of(f, "rlm_lre"), 1.0);
    EXPECT_DOUBLE_EQ(value_of(f, "rlm_rp"), 1.0);
    EXPECT_DOUBLE_EQ(value_of(f, "rlm_gln"), 64.0);
}

TEST(Rlm, RunsCoverEveryPixelOncePerDirection) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const auto q = random_quantized(rng, 4);
        for (Direction d : kAllDirections) {
            const auto m = run_length_matrix(q, d);
            EXPECT_EQ(m.covered_pixels(), q.size());
            EXPECT_LE(m.run_count(), q.size());
            EXPECT_GE(m.run_count(), 1u);
        }
        const auto f = rlm_features(q);
        EXPECT_GT(value_of(f, "rlm_rp"), 0.0);
        EXPECT_LE(value_of(f, "rlm_rp"), 1.0);
        EXPECT_LE(value_of(f, "rlm_sre"), 1.0);
        EXPECT_GE(value_of(f, "rlm_lre"), 1.0);
    }
}

TEST(Fuse, ConcatenatesInOrder) {
    const FeatureVector a({"a1", "a2"}, {1.0, 2.0});
    const FeatureVector b({"b1"}, {3.0});
    const auto f = fuse({a, b});
    EXPECT_EQ(f.names(), (std::vector<std::string>{"a1", "a2", "b1"}));
    EXPECT_EQ(std::vector<double>(f.values().begin(), f.values().end()), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(fuse({FeatureVector{}, a}), a);
}

TEST(Fuse, RejectsCollisions) {
    const FeatureVector a({"x"}, {1.0});
    EXPECT_THROW(fuse({a, a}), NameCollisionError);
    EXPECT_THROW(FeatureVector({"x", "x"}, {1.0, 2.0}), NameCollisionError);
    EXPECT_THROW(FeatureVector({"x"}, {1.0, 2.0}), SchemaError);
    EXPECT_THROW(FeatureVector({"x"}, {std::nan("")}), DomainError);
}

TEST(Fuse, Associative) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<FeatureVector> parts;
        for (int p = 0; p < 3; ++p) {
            std::vector<std::string> names;
            std::vector<double> values;
            const int n = static_cast<int>(rng() % 4);
            for (int i = 0; i < n; ++i) {
                names.push_back("p" + std::to_string(p) + "_" + std::to_string(i));
                values.push_back(g(rng));
            }
            parts.emplace_back(names, values);
        }
        EXPECT_EQ(fuse({fuse({parts[0], parts[1]}), parts[2]}), fuse({parts[0], fuse({parts[1], parts[2]})}));
        EXPECT_EQ(fuse({parts[0], parts[1], parts[2]}).size(), parts[0].size() + parts[1].size() + parts[2].size());
    }
}

}  // namespace
}  // namespace texbank
