#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "culd/encode.hpp"
#include "culd/error.hpp"

using namespace culd;

namespace {
constexpr Ohm kHrs = 150e3;
constexpr Ohm kLrs = 50e3;
}  // namespace

TEST(WeightToResistances, Endpoints) {
    const WeightCode plus = weight_to_resistances(1.0, kHrs, kLrs);
    EXPECT_NEAR(plus.r_p, 50e3, 1e-9);
    EXPECT_NEAR(plus.r_n, 150e3, 1e-9);
    const WeightCode minus = weight_to_resistances(-1.0, kHrs, kLrs);
    EXPECT_NEAR(minus.r_p, 150e3, 1e-9);
    EXPECT_NEAR(minus.r_n, 50e3, 1e-9);
}

TEST(WeightToResistances, ZeroAndHalf) {
    const WeightCode zero = weight_to_resistances(0.0, kHrs, kLrs);
    EXPECT_NEAR(zero.r_p, 75e3, 1e-9);
    EXPECT_NEAR(zero.r_n, 75e3, 1e-9);
    const WeightCode half = weight_to_resistances(0.5, kHrs, kLrs);
    EXPECT_NEAR(half.r_p, 60e3, 1e-9);
    EXPECT_NEAR(half.r_n, 100e3, 1e-9);
    EXPECT_NEAR(composite_resistance(half.r_p, half.r_n), 37.5e3, 1e-9);
}

TEST(WeightToResistances, RejectsOutOfRange) {
    EXPECT_THROW(weight_to_resistances(1.01, kHrs, kLrs), Error);
    EXPECT_THROW(weight_to_resistances(-1.5, kHrs, kLrs), Error);
    EXPECT_THROW(weight_to_resistances(0.0, kLrs, kHrs), Error);
}

TEST(ResistancesToWeight, Inverses) {
    EXPECT_NEAR(resistances_to_weight(50e3, 150e3, kHrs, kLrs), 1.0, 1e-12);
    EXPECT_NEAR(resistances_to_weight(75e3, 75e3, kHrs, kLrs), 0.0, 1e-12);
    EXPECT_NEAR(resistances_to_weight(60e3, 100e3, kHrs, kLrs), 0.5, 1e-12);
}

TEST(ResistancesToWeight, OffManifoldPairIsInconsistent) {
    try {
        resistances_to_weight(100e3, 150e3, kHrs, kLrs);
        FAIL() << "expected inconsistent-pair error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InconsistentPair);
    }
}

TEST(EncodeProperties, RandomWeights) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const Ohm composite = kHrs * kLrs / (kHrs + kLrs);
    const double diff_scale = (kHrs - kLrs) / (kHrs * kLrs);
    for (int i = 0; i < 10'000; ++i) {
        const double a = uni(rng);
        const WeightCode c = weight_to_resistances(a, kHrs, kLrs);
        ASSERT_LE(std::abs(composite_resistance(c.r_p, c.r_n) - composite) / composite, 1e-9);
        ASSERT_NEAR(1.0 / c.r_p - 1.0 / c.r_n, a * diff_scale, 1e-9 * diff_scale);
        ASSERT_GE(c.r_p, kLrs * (1 - 1e-12));
        ASSERT_LE(c.r_p, kHrs * (1 + 1e-12));
        ASSERT_GE(c.r_n, kLrs * (1 - 1e-12));
        ASSERT_LE(c.r_n, kHrs * (1 + 1e-12));
        const WeightCode m = weight_to_resistances(-a, kHrs, kLrs);
        ASSERT_EQ(m.r_p, c.r_n);
        ASSERT_EQ(m.r_n, c.r_p);
        ASSERT_NEAR(resistances_to_weight(c.r_p, c.r_n, kHrs, kLrs), a, 1e-12);
        ASSERT_NEAR(pwm_to_input(input_to_pwm(a, 100e-9), 100e-9), a, 1e-12);
    }
}

TEST(Pwm, TableInputs) {
    EXPECT_NEAR(input_to_pwm(0.0, 100e-9), 50e-9, 1e-21);
    EXPECT_NEAR(input_to_pwm(-0.5, 100e-9), 25e-9, 1e-21);
    EXPECT_EQ(input_to_pwm(1.0, 100e-9), 100e-9);
    EXPECT_EQ(input_to_pwm(-1.0, 100e-9), 0.0);
    EXPECT_NEAR(pwm_to_input(50e-9, 100e-9), 0.0, 1e-15);
    EXPECT_NEAR(pwm_to_input(75e-9, 100e-9), 0.5, 1e-15);
    EXPECT_EQ(pwm_to_input(0.0, 100e-9), -1.0);
}

TEST(Pwm, RangeErrors) {
    EXPECT_THROW(input_to_pwm(1.2, 100e-9), Error);
    EXPECT_THROW(pwm_to_input(101e-9, 100e-9), Error);
    EXPECT_THROW(pwm_to_input(-1e-9, 100e-9), Error);
    EXPECT_THROW(input_to_pwm(0.0, 0.0), Error);
}

TEST(QuantizeWeight, GridAndTies) {
    EXPECT_DOUBLE_EQ(quantize_weight(0.3, 5), 0.5);
    EXPECT_DOUBLE_EQ(quantize_weight(0.25, 5), 0.5);
    EXPECT_DOUBLE_EQ(quantize_weight(-0.25, 5), -0.5);
    EXPECT_DOUBLE_EQ(quantize_weight(-1.0, 2), -1.0);
    EXPECT_DOUBLE_EQ(quantize_weight(0.1, 5), 0.0);
    EXPECT_DOUBLE_EQ(quantize_weight(0.0, 2), 1.0);  // tie between -1 and +1
    EXPECT_DOUBLE_EQ(quantize_weight(0.9, 3), 1.0);
    EXPECT_THROW(quantize_weight(0.0, 1), Error);
}

TEST(QuantizeWeight, ResultIsNearestGridPoint) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int levels : {2, 3, 5, 9, 17}) {
        const double step = 2.0 / (levels - 1);
        for (int i = 0; i < 2000; ++i) {
            const double a = uni(rng);
            const double q = quantize_weight(a, levels);
            ASSERT_LE(std::abs(q - a), step / 2 + 1e-12);
            const double k = (q + 1.0) / step;
            ASSERT_NEAR(k, std::round(k), 1e-9);
        }
    }
}
