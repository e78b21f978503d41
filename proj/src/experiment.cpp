#include "culd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "culd/error.hpp"
#include "parallel.hpp"

namespace culd {

namespace {

constexpr std::size_t kMaxEnumerated = 10'000;

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

// Linear interpolation between closest ranks; `sorted` must be ascending.
double percentile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return 0.0;
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

ErrorSummary summarize(Topology topology, std::vector<double> abs_err, Volt full_scale) {
    ErrorSummary s;
    s.topology = topology;
    if (abs_err.empty()) return s;
    std::sort(abs_err.begin(), abs_err.end());
    const double n = static_cast<double>(abs_err.size());
    s.mean = std::accumulate(abs_err.begin(), abs_err.end(), 0.0) / n;
    double ss = 0.0;
    for (double e : abs_err) ss += (e - s.mean) * (e - s.mean);
    s.stddev = abs_err.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    s.median = percentile(abs_err, 0.5);
    s.p05 = percentile(abs_err, 0.05);
    s.p25 = percentile(abs_err, 0.25);
    s.p75 = percentile(abs_err, 0.75);
    s.p95 = percentile(abs_err, 0.95);
    s.max = abs_err.back();
    s.median_normalized = full_scale > 0.0 ? s.median / full_scale : 0.0;
    return s;
}

// Weight implied by an arbitrary (p, n) pair under the device window.
double effective_weight(Ohm r_p, Ohm r_n, Ohm r_hrs, Ohm r_lrs) {
    const double gp = 1.0 / r_p;
    const double gn = 1.0 / r_n;
    const double a = (gp - gn) / (gp + gn) * (r_hrs + r_lrs) / (r_hrs - r_lrs);
    return std::clamp(a, -1.0, 1.0);
}

std::vector<double> inputs_of(std::span<const Second> widths, Second x_max) {
    std::vector<double> out;
    out.reserve(widths.size());
    for (Second w : widths) out.push_back(pwm_to_input(w, x_max));
    return out;
}

void require_kind(const ExperimentSpec& spec, ExperimentKind kind) {
    spec.validate();
    if (spec.kind != kind) {
        throw Error(ErrorKind::InvalidSpec,
                    std::string("expected a ") + to_string(kind) + " spec, got " + to_string(spec.kind));
    }
}

}  // namespace

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::MismatchCompare: return "mismatch_compare";
        case ExperimentKind::MacSweep: return "mac_sweep";
        case ExperimentKind::NSweep: return "n_sweep";
        case ExperimentKind::MonteCarlo: return "monte_carlo";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    if (n_rows < 1) throw Error(ErrorKind::InvalidSpec, "n_rows must be >= 1");
    if (samples < 1) throw Error(ErrorKind::InvalidSpec, "samples must be >= 1");
    if (weights.empty() && kind != ExperimentKind::MismatchCompare) {
        throw Error(ErrorKind::InvalidSpec, "weight set is empty");
    }
    if (widths.empty()) throw Error(ErrorKind::InvalidSpec, "input width set is empty");
    if (kind == ExperimentKind::NSweep) {
        if (n_list.empty()) throw Error(ErrorKind::InvalidSpec, "n_list is empty");
        for (int n : n_list) {
            if (n < 1) throw Error(ErrorKind::InvalidSpec, "every N in n_list must be >= 1");
        }
    }
    if (kind == ExperimentKind::MonteCarlo && !(cells.device.sigma_rel > 0.0)) {
        throw Error(ErrorKind::InvalidSpec, "monte carlo requires sigma_rel > 0");
    }
    if (bootstrap_resamples < 1) throw Error(ErrorKind::InvalidSpec, "bootstrap_resamples must be >= 1");
    for (double w : weights) {
        if (!(w >= -1.0 && w <= 1.0)) throw Error(ErrorKind::Range, "weight outside [-1, 1]");
    }
    PwmSchedule{x_max, widths, order}.validate();
    cells.device.validate();
    cells.sram.validate();
    readout.validate();
}

bool operator==(const ExperimentSpec& a, const ExperimentSpec& b) {
    return a.kind == b.kind && a.topology == b.topology && a.n_rows == b.n_rows && a.n_list == b.n_list &&
           a.weights == b.weights && a.widths == b.widths && a.cells.device == b.cells.device &&
           a.cells.program == b.cells.program && a.cells.sram == b.cells.sram && a.readout == b.readout &&
           a.x_max == b.x_max && a.order == b.order && a.mismatch == b.mismatch && a.samples == b.samples &&
           a.seed == b.seed && a.bootstrap_resamples == b.bootstrap_resamples;
}

FitReport fit_least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::InvalidParameter, "x and y differ in length");
    FitReport f;
    f.count = x.size();
    if (x.empty()) {
        f.degenerate = true;
        f.zero_range = true;
        return f;
    }
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    f.range = *ymax - *ymin;
    f.zero_range = f.range == 0.0;

    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (x.size() < 2 || sxx == 0.0) {
        f.degenerate = true;
        f.intercept = my;
        double sse = 0.0;
        for (double v : y) sse += (v - my) * (v - my);
        f.rmse = std::sqrt(sse / n);
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.slope * x[i] + f.intercept);
        sse += r * r;
    }
    f.rmse = std::sqrt(sse / n);
    f.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 0.0;
    return f;
}

ArrayState build_array(const ExperimentSpec& spec, Topology topology, std::span<const double> weights,
                       std::span<const Second> widths, Rng& rng) {
    if (weights.size() != widths.size()) throw Error(ErrorKind::InvalidParameter, "one width per weight required");
    ArrayState array;
    array.schedule = PwmSchedule{spec.x_max, {widths.begin(), widths.end()}, spec.order};
    array.cells.reserve(weights.size());
    for (double w : weights) array.cells.push_back(build_cell(topology, w, spec.cells, rng));
    return array;
}

MacSweepReport run_mac_sweep(const ExperimentSpec& spec, const RunOptions& opt) {
    require_kind(spec, ExperimentKind::MacSweep);
    const std::size_t choices = spec.weights.size() * spec.widths.size();
    const auto rows = static_cast<std::size_t>(spec.n_rows);

    // Mixed-radix digit per row: index into the (weight, width) product.
    std::vector<std::vector<std::size_t>> combos;
    double total = std::pow(static_cast<double>(choices), static_cast<double>(rows));
    MacSweepReport report;
    report.combinations = total > 1e18 ? 0 : static_cast<std::size_t>(total);
    if (total <= static_cast<double>(kMaxEnumerated)) {
        const auto count = static_cast<std::size_t>(total);
        for (std::size_t c = 0; c < count; ++c) {
            std::vector<std::size_t> digits(rows);
            std::size_t rest = c;
            for (std::size_t r = 0; r < rows; ++r) {
                digits[r] = rest % choices;
                rest /= choices;
            }
            combos.push_back(std::move(digits));
        }
    } else {
        report.sampled = true;
        Rng sampler(spec.seed);
        std::uniform_int_distribution<std::size_t> pick(0, choices - 1);
        for (int s = 0; s < spec.samples; ++s) {
            std::vector<std::size_t> digits(rows);
            for (auto& d : digits) d = pick(sampler);
            combos.push_back(std::move(digits));
        }
    }

    report.points.resize(combos.size());
    detail::parallel_for(combos.size(), opt.threads, [&](std::size_t idx) {
        MacPoint& pt = report.points[idx];
        std::vector<Second> widths;
        for (std::size_t d : combos[idx]) {
            pt.weights.push_back(spec.weights[d / spec.widths.size()]);
            widths.push_back(spec.widths[d % spec.widths.size()]);
        }
        pt.inputs = inputs_of(widths, spec.x_max);
        Rng rng(spec.seed + 1 + idx);
        pt.result = integrate_exact(build_array(spec, spec.topology, pt.weights, widths, rng), spec.readout);
    });

    std::vector<double> mac;
    std::vector<double> vx;
    for (const auto& p : report.points) {
        mac.push_back(p.result.mac_ideal);
        vx.push_back(p.result.v_x);
    }
    report.fit = fit_least_squares(mac, vx);
    return report;
}

MismatchReport run_mismatch_compare(const ExperimentSpec& spec, const RunOptions& opt) {
    (void)opt;
    require_kind(spec, ExperimentKind::MismatchCompare);
    const MismatchSetup& m = spec.mismatch;
    const bool p_role = m.role == MismatchRole::P;
    const Ohm nominal_p = p_role ? m.r_upper : m.r_other;
    const Ohm nominal_n = p_role ? m.r_other : m.r_upper;
    const double weight =
        effective_weight(nominal_p, nominal_n, spec.cells.device.r_hrs, spec.cells.device.r_lrs);

    const CellInstance matched =
        make_4t4r_cell(nominal_p, nominal_n, nominal_p, nominal_n, nominal_p, nominal_n, weight);
    const CellInstance mismatched =
        p_role ? make_4t4r_cell(m.r_upper, m.r_other, m.r_lower, m.r_other, nominal_p, nominal_n, weight)
               : make_4t4r_cell(m.r_other, m.r_upper, m.r_other, m.r_lower, nominal_p, nominal_n, weight);
    const CellInstance two_r = make_4t2r_cell(nominal_p, nominal_n, weight);

    const auto rows = static_cast<std::size_t>(spec.n_rows);
    std::vector<Second> widths(rows);
    for (std::size_t i = 0; i < rows; ++i) widths[i] = spec.widths[i % spec.widths.size()];

    MismatchReport report;
    const std::pair<const char*, const CellInstance*> arms[] = {
        {"matched_4t4r", &matched}, {"mismatched_4t4r", &mismatched}, {"4t2r", &two_r}};
    for (const auto& [name, cell] : arms) {
        ArrayState array{std::vector<CellInstance>(rows, *cell), PwmSchedule{spec.x_max, widths, spec.order}};
        MismatchArm arm;
        arm.name = name;
        arm.result = integrate_exact(array, spec.readout);
        arm.waveform = simulate_transient(array, spec.readout).waveform;
        report.arms.push_back(std::move(arm));
    }
    for (auto& arm : report.arms) arm.shift = arm.result.v_x - report.arms.front().result.v_x;
    return report;
}

NSweepReport run_n_sweep(const ExperimentSpec& spec, const RunOptions& opt) {
    require_kind(spec, ExperimentKind::NSweep);
    Rng rng(spec.seed);
    const CellInstance row = build_cell(spec.topology, spec.weights.front(), spec.cells, rng);
    const Second width = spec.widths.front();

    NSweepReport report;
    report.points.resize(spec.n_list.size());
    detail::parallel_for(spec.n_list.size(), opt.threads, [&](std::size_t idx) {
        const auto n = static_cast<std::size_t>(spec.n_list[idx]);
        ArrayState array{std::vector<CellInstance>(n, row),
                         PwmSchedule{spec.x_max, std::vector<Second>(n, width), spec.order}};
        NSweepPoint& pt = report.points[idx];
        pt.n = spec.n_list[idx];
        pt.result = integrate_exact(array, spec.readout);
        const auto intervals = event_intervals(array, spec.readout);
        pt.total_current = intervals.front().node.i_bl + intervals.front().node.i_blb;
        pt.per_cell_current = intervals.front().node.cell_current.front();
        for (const auto& iv : intervals) {
            const double err = std::abs(iv.node.i_bl + iv.node.i_blb - spec.readout.i_bias) / spec.readout.i_bias;
            pt.max_current_error = std::max(pt.max_current_error, err);
        }
    });
    return report;
}

MonteCarloReport run_monte_carlo(const ExperimentSpec& spec, const RunOptions& opt) {
    require_kind(spec, ExperimentKind::MonteCarlo);
    constexpr Topology kArms[] = {Topology::FourT4R, Topology::FourT2R};
    const auto rows = static_cast<std::size_t>(spec.n_rows);
    const auto trials = static_cast<std::size_t>(spec.samples);
    const DeviceParams& dp = spec.cells.device;

    MonteCarloReport report;
    report.trials.resize(trials * 2);
    detail::parallel_for(trials, opt.threads, [&](std::size_t t) {
        Rng rng(spec.seed + t);
        std::uniform_int_distribution<std::size_t> pick_w(0, spec.weights.size() - 1);
        std::uniform_int_distribution<std::size_t> pick_x(0, spec.widths.size() - 1);
        std::vector<double> weights(rows);
        std::vector<Second> widths(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            weights[i] = spec.weights[pick_w(rng)];
            widths[i] = spec.widths[pick_x(rng)];
        }
        const Volt ideal = closed_form_vx(weights, inputs_of(widths, spec.x_max), dp.r_hrs, dp.r_lrs, spec.x_max,
                                          spec.readout);
        for (std::size_t k = 0; k < 2; ++k) {
            MonteCarloTrial& tr = report.trials[t * 2 + k];
            tr.trial = t;
            tr.topology = kArms[k];
            tr.result = integrate_exact(build_array(spec, kArms[k], weights, widths, rng), spec.readout);
            tr.result.v_x_ideal = ideal;
            tr.result.error = tr.result.v_x - ideal;
        }
    });

    const std::vector<double> ones(rows, 1.0);
    std::vector<double> minus(rows, -1.0);
    report.full_scale = closed_form_vx(ones, ones, dp.r_hrs, dp.r_lrs, spec.x_max, spec.readout) -
                        closed_form_vx(ones, minus, dp.r_hrs, dp.r_lrs, spec.x_max, spec.readout);

    std::vector<double> e4(trials);
    std::vector<double> e2(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        e4[t] = std::abs(report.trials[t * 2].result.error);
        e2[t] = std::abs(report.trials[t * 2 + 1].result.error);
    }
    report.summaries = {summarize(Topology::FourT4R, e4, report.full_scale),
                        summarize(Topology::FourT2R, e2, report.full_scale)};
    report.median_diff = median_of(e4) - median_of(e2);

    // Paired percentile bootstrap over trials.
    Rng boot(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_int_distribution<std::size_t> pick(0, trials - 1);
    std::vector<double> diffs(static_cast<std::size_t>(spec.bootstrap_resamples));
    std::vector<double> r4(trials);
    std::vector<double> r2(trials);
    for (double& d : diffs) {
        for (std::size_t i = 0; i < trials; ++i) {
            const std::size_t j = pick(boot);
            r4[i] = e4[j];
            r2[i] = e2[j];
        }
        d = median_of(r4) - median_of(r2);
    }
    std::sort(diffs.begin(), diffs.end());
    report.ci_low = percentile(diffs, 0.025);
    report.ci_high = percentile(diffs, 0.975);
    return report;
}

}  // namespace culd
