#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "culd/cell.hpp"
#include "culd/engine.hpp"

namespace culd {

enum class ExperimentKind { MismatchCompare, MacSweep, NSweep, MonteCarlo };

const char* to_string(ExperimentKind k);

enum class MismatchRole { P, N };

// Copy mismatch injected into one role of a 4T4R cell. The other role keeps
// r_other on both copies; the matched arm uses r_upper on both copies.
struct MismatchSetup {
    MismatchRole role = MismatchRole::P;
    Ohm r_upper = 100e3;
    Ohm r_lower = 150e3;
    Ohm r_other = 150e3;

    bool operator==(const MismatchSetup&) const = default;
};

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::MacSweep;
    Topology topology = Topology::FourT2R;
    int n_rows = 4;
    std::vector<int> n_list;       // NSweep row counts
    std::vector<double> weights;   // weight set
    std::vector<Second> widths;    // input set, as PWM widths
    CellBuildOptions cells;
    ReadoutConfig readout;
    Second x_max = 100e-9;
    PhaseOrder order = PhaseOrder::WlFirst;
    MismatchSetup mismatch;
    int samples = 1000;
    std::uint64_t seed = 1;
    int bootstrap_resamples = 1000;

    void validate() const;
};

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b);

struct FitReport {
    double slope = 0.0;
    double intercept = 0.0;
    double rmse = 0.0;
    double r_squared = 0.0;
    Volt range = 0.0;
    std::size_t count = 0;
    bool degenerate = false;  // fewer than two distinct x values
    bool zero_range = false;  // every y identical
};

struct MacPoint {
    std::vector<double> weights;
    std::vector<double> inputs;
    MacResult result;
};

struct MacSweepReport {
    FitReport fit;
    std::vector<MacPoint> points;
    bool sampled = false;  // true when the cross-product was subsampled
    std::size_t combinations = 0;
};

struct MismatchArm {
    std::string name;
    MacResult result;
    Volt shift = 0.0;  // relative to the matched 4T4R arm
    Waveform waveform;
};

struct MismatchReport {
    std::vector<MismatchArm> arms;  // matched_4t4r, mismatched_4t4r, 4t2r
};

struct NSweepPoint {
    int n = 0;
    MacResult result;
    Ampere total_current = 0.0;
    Ampere per_cell_current = 0.0;
    double max_current_error = 0.0;  // worst relative |I_total - i_bias| over intervals
};

struct NSweepReport {
    std::vector<NSweepPoint> points;
};

struct ErrorSummary {
    Topology topology = Topology::FourT2R;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;
    double p05 = 0.0;
    double p25 = 0.0;
    double p75 = 0.0;
    double p95 = 0.0;
    double max = 0.0;
    double median_normalized = 0.0;  // median / full-scale range
};

struct MonteCarloTrial {
    std::size_t trial = 0;
    Topology topology = Topology::FourT2R;
    MacResult result;
};

struct MonteCarloReport {
    std::vector<MonteCarloTrial> trials;
    std::vector<ErrorSummary> summaries;  // 4T4R first, then 4T2R
    Volt full_scale = 0.0;
    // median|e|(4T4R) - median|e|(4T2R) with a percentile bootstrap interval.
    double median_diff = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

FitReport fit_least_squares(std::span<const double> x, std::span<const double> y);

struct RunOptions {
    unsigned threads = 1;
    bool waveforms = false;
};

MacSweepReport run_mac_sweep(const ExperimentSpec& spec, const RunOptions& opt = {});
MismatchReport run_mismatch_compare(const ExperimentSpec& spec, const RunOptions& opt = {});
NSweepReport run_n_sweep(const ExperimentSpec& spec, const RunOptions& opt = {});
MonteCarloReport run_monte_carlo(const ExperimentSpec& spec, const RunOptions& opt = {});

// Array of n rows built from the spec: weights and widths assigned
// round-robin from the spec's sets.
ArrayState build_array(const ExperimentSpec& spec, Topology topology, std::span<const double> weights,
                       std::span<const Second> widths, Rng& rng);

}  // namespace culd
