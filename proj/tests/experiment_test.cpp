#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "culd/error.hpp"
#include "culd/experiment.hpp"

using namespace culd;

namespace {

ExperimentSpec mac_spec(Topology topo, std::vector<double> weights) {
    ExperimentSpec s;
    s.kind = ExperimentKind::MacSweep;
    s.topology = topo;
    s.n_rows = 4;
    s.weights = std::move(weights);
    s.widths = {0.0, 25e-9, 50e-9, 75e-9, 100e-9};
    s.samples = 1000;
    return s;
}

}  // namespace

TEST(FitLeastSquares, Collinear) {
    const std::vector<double> x{0, 1, 2};
    const std::vector<double> y{0, 2, 4};
    const FitReport f = fit_least_squares(x, y);
    EXPECT_DOUBLE_EQ(f.slope, 2.0);
    EXPECT_DOUBLE_EQ(f.intercept, 0.0);
    EXPECT_DOUBLE_EQ(f.rmse, 0.0);
    EXPECT_DOUBLE_EQ(f.r_squared, 1.0);
    EXPECT_DOUBLE_EQ(f.range, 4.0);
    EXPECT_FALSE(f.degenerate);
}

TEST(FitLeastSquares, DegenerateInputsAreFlagged) {
    const std::vector<double> x{0, 0};
    const std::vector<double> y{0, 1};
    EXPECT_TRUE(fit_least_squares(x, y).degenerate);
    const std::vector<double> one{3.0};
    EXPECT_TRUE(fit_least_squares(one, one).degenerate);
    EXPECT_TRUE(fit_least_squares({}, {}).degenerate);
}

TEST(FitLeastSquares, NoiseLevelRecovered) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<double> x(10'000);
    std::vector<double> y(10'000);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = ux(rng);
        y[i] = 0.3 * x[i] - 0.1 + noise(rng);
    }
    const FitReport f = fit_least_squares(x, y);
    EXPECT_NEAR(f.rmse, 0.05, 0.005);
    EXPECT_NEAR(f.slope, 0.3, 0.01);
    EXPECT_GE(f.r_squared, 0.0);
    EXPECT_LE(f.r_squared, 1.0);
}

TEST(MacSweep, VariationFree4T2RIsLinear) {
    const MacSweepReport rep = run_mac_sweep(mac_spec(Topology::FourT2R, {1, -1, 0.5, -0.5, 0}));
    EXPECT_TRUE(rep.sampled);
    EXPECT_EQ(rep.points.size(), 1000u);
    EXPECT_GE(rep.fit.r_squared, 0.9999);
    EXPECT_LE(rep.fit.rmse, 1e-6 * rep.fit.range);
    EXPECT_LE(std::abs(rep.fit.intercept), 1e-6 * rep.fit.range);
}

TEST(MacSweep, SramFullCrossProduct) {
    const MacSweepReport rep = run_mac_sweep(mac_spec(Topology::EightTSram, {1, -1}));
    EXPECT_FALSE(rep.sampled);
    EXPECT_EQ(rep.points.size(), 10'000u);
    EXPECT_GE(rep.fit.r_squared, 0.9999);
}

TEST(MacSweep, AllZeroWeightsFlagged) {
    const MacSweepReport rep = run_mac_sweep(mac_spec(Topology::FourT2R, {0.0}));
    for (const auto& p : rep.points) EXPECT_NEAR(p.result.v_x, 0.0, 1e-15);
    EXPECT_TRUE(rep.fit.degenerate);
    EXPECT_TRUE(rep.fit.zero_range || rep.fit.range < 1e-15);
}

TEST(MacSweep, WrongKindRejected) {
    ExperimentSpec s = mac_spec(Topology::FourT2R, {1.0});
    s.kind = ExperimentKind::NSweep;
    s.n_list = {2};
    try {
        run_mac_sweep(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidSpec);
    }
}

TEST(MacSweep, ThreadCountDoesNotChangeResults) {
    ExperimentSpec s = mac_spec(Topology::FourT4R, {1, -1, 0.5, -0.5, 0});
    s.cells.device.sigma_rel = 0.3;
    s.samples = 200;
    const MacSweepReport a = run_mac_sweep(s, {1, false});
    const MacSweepReport b = run_mac_sweep(s, {4, false});
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i].result.v_x, b.points[i].result.v_x);
    EXPECT_EQ(a.fit.rmse, b.fit.rmse);
}

TEST(MismatchCompare, SingleCellFixture) {
    ExperimentSpec s;
    s.kind = ExperimentKind::MismatchCompare;
    s.n_rows = 1;
    s.widths = {50e-9};
    s.weights = {1.0};
    const MismatchReport rep = run_mismatch_compare(s);
    ASSERT_EQ(rep.arms.size(), 3u);
    EXPECT_EQ(rep.arms[0].name, "matched_4t4r");
    EXPECT_NEAR(rep.arms[0].result.v_x, 0.0, 1e-15);
    // Q_p = 550 fC, Q_n = 450 fC on 3 pF.
    EXPECT_NEAR(rep.arms[1].result.v_xp, 550e-15 / 3e-12, 1e-12);
    EXPECT_NEAR(rep.arms[1].result.v_xn, 450e-15 / 3e-12, 1e-12);
    EXPECT_NEAR(rep.arms[1].shift, 100e-15 / 3e-12, 1e-12);
    EXPECT_NEAR(rep.arms[2].result.v_xp, 500e-15 / 3e-12, 1e-12);
    EXPECT_LE(std::abs(rep.arms[2].result.v_x), 1e-12);
    EXPECT_FALSE(rep.arms[1].waveform.t.empty());
}

TEST(MismatchCompare, FourT2RShiftZeroForAnyDevices) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(50e3, 150e3);
    for (int trial = 0; trial < 100; ++trial) {
        ExperimentSpec s;
        s.kind = ExperimentKind::MismatchCompare;
        s.n_rows = 1 + trial % 5;
        s.widths = {50e-9, 25e-9, 80e-9};
        s.mismatch = {trial % 2 ? MismatchRole::N : MismatchRole::P, r(rng), r(rng), r(rng)};
        const MismatchReport rep = run_mismatch_compare(s);
        ASSERT_LE(std::abs(rep.arms[2].shift), 1e-12);
    }
}

TEST(NSweep, FlatCurveAndCurrentDivision) {
    ExperimentSpec s;
    s.kind = ExperimentKind::NSweep;
    s.topology = Topology::EightTSram;
    s.readout.i_bias = 4e-6;
    s.weights = {1.0};
    s.widths = {25e-9};
    s.n_list = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    const NSweepReport rep = run_n_sweep(s, {4, false});
    const double ref = rep.points.front().result.v_x;
    const std::vector<double> w{1.0};
    const std::vector<double> x{-0.5};
    // N = 1 equals the single-cell closed form with the SRAM window.
    EXPECT_LE(std::abs(ref - closed_form_vx(w, x, 1.0 / s.cells.sram.g_off, 1.0 / s.cells.sram.g_on, s.x_max,
                                            s.readout)),
              1e-12 * std::abs(ref));
    for (const auto& p : rep.points) {
        EXPECT_LE(std::abs(p.result.v_x - ref), 1e-9 * std::abs(ref)) << "N=" << p.n;
        EXPECT_LE(p.max_current_error, 1e-12);
        EXPECT_NEAR(p.per_cell_current, 4e-6 / p.n, 1e-12 * 4e-6 / p.n);
    }
}

TEST(MonteCarlo, ZeroVariationRejectedAndTinyVariationTiny) {
    ExperimentSpec s;
    s.kind = ExperimentKind::MonteCarlo;
    s.weights = {1, -1, 0.5, -0.5, 0};
    s.widths = {0.0, 25e-9, 50e-9, 75e-9, 100e-9};
    s.samples = 50;
    EXPECT_THROW(run_monte_carlo(s), Error);
    s.cells.device.sigma_rel = 1e-12;
    const MonteCarloReport rep = run_monte_carlo(s);
    for (const auto& t : rep.trials) EXPECT_LE(std::abs(t.result.error), 1e-12);
}

TEST(MonteCarlo, ReproducibleAndThreadIndependent) {
    ExperimentSpec s;
    s.kind = ExperimentKind::MonteCarlo;
    s.weights = {1, -1, 0.5, -0.5, 0};
    s.widths = {0.0, 25e-9, 50e-9, 75e-9, 100e-9};
    s.samples = 200;
    s.bootstrap_resamples = 200;
    s.cells.device.sigma_rel = 0.5;
    const MonteCarloReport a = run_monte_carlo(s, {1, false});
    const MonteCarloReport b = run_monte_carlo(s, {8, false});
    ASSERT_EQ(a.trials.size(), b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) EXPECT_EQ(a.trials[i].result.v_x, b.trials[i].result.v_x);
    EXPECT_EQ(a.ci_low, b.ci_low);
    EXPECT_EQ(a.ci_high, b.ci_high);
    EXPECT_LE(a.ci_low, a.median_diff);
    EXPECT_GE(a.ci_high, a.median_diff);
    ASSERT_EQ(a.summaries.size(), 2u);
    EXPECT_EQ(a.summaries[0].topology, Topology::FourT4R);
    EXPECT_LE(a.summaries[0].p05, a.summaries[0].median);
    EXPECT_LE(a.summaries[0].median, a.summaries[0].p95);
}

TEST(ExperimentSpec, Validation) {
    ExperimentSpec s = mac_spec(Topology::FourT2R, {1.0});
    EXPECT_NO_THROW(s.validate());
    s.n_rows = 0;
    EXPECT_THROW(s.validate(), Error);
    s = mac_spec(Topology::FourT2R, {});
    EXPECT_THROW(s.validate(), Error);
    s = mac_spec(Topology::FourT2R, {1.0});
    s.widths = {200e-9};
    EXPECT_THROW(s.validate(), Error);
}
