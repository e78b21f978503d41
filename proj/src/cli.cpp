#include "culd/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "culd/error.hpp"

namespace culd {

namespace {

namespace fs = std::filesystem;

std::string g17(double v) { return fmt::format("{:.17g}", v); }

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << content;
    f.close();
    if (!f) throw IoError("failed writing " + path.string());
}

std::string waveform_csv(const Waveform& wf) {
    std::string out = "t_s,v_xp_V,v_xn_V,i_bl_A,i_blb_A,clamped\n";
    for (std::size_t i = 0; i < wf.size(); ++i) {
        out += fmt::format("{},{},{},{},{},{}\n", g17(wf.t[i]), g17(wf.v_xp[i]), g17(wf.v_xn[i]), g17(wf.i_bl[i]),
                           g17(wf.i_blb[i]), wf.clamped[i] ? 1 : 0);
    }
    return out;
}

std::string provenance(const RunConfig& cfg) {
    const std::string source = cfg.config_path.empty() ? std::string("<inline>") : cfg.config_path;
    return fmt::format("source: {}  name: {}  seed: {}\n", source, cfg.name.empty() ? "-" : cfg.name, cfg.spec.seed);
}

constexpr std::string_view kModelNote =
    "note: behavioral model with ideal mirrors and a single source node; absolute ranges and RMSE of\n"
    "      transistor-level simulations are not reproduced.\n";

std::string run_mac_sweep_cli(const RunConfig& cfg, const RunOptions& opt) {
    const ExperimentSpec& spec = cfg.spec;
    const MacSweepReport rep = run_mac_sweep(spec, opt);

    std::string csv = "index,mac_ideal,v_x_V,v_x_ideal_V,error_V,clamped\n";
    for (std::size_t i = 0; i < rep.points.size(); ++i) {
        const MacResult& r = rep.points[i].result;
        csv += fmt::format("{},{},{},{},{},{}\n", i, g17(r.mac_ideal), g17(r.v_x), g17(r.v_x_ideal), g17(r.error),
                           r.clamped ? 1 : 0);
    }
    write_file(cfg.out_dir / "points.csv", csv);

    const FitReport& f = rep.fit;
    std::string s = provenance(cfg);
    s += fmt::format("experiment: mac_sweep  topology: {}  N: {}\n", to_string(spec.topology), spec.n_rows);
    s += rep.sampled ? fmt::format("combinations: {} (uniformly sampled {})\n", rep.combinations, rep.points.size())
                     : fmt::format("combinations: {} (full cross-product)\n", rep.combinations);
    s += "least-squares fit v_x = slope * mac + intercept\n";
    s += fmt::format("  slope      {:.9g} V per MAC unit\n", f.slope);
    s += fmt::format("  intercept  {:.9g} V\n", f.intercept);
    s += fmt::format("  rmse       {:.9g} V\n", f.rmse);
    s += fmt::format("  r_squared  {:.12g}\n", f.r_squared);
    s += fmt::format("  range      {:.9g} V\n", f.range);
    s += fmt::format("  points     {}\n", f.count);
    if (f.degenerate) s += "  flag: degenerate fit (fewer than two distinct MAC values)\n";
    if (f.zero_range) s += "  flag: zero output range\n";
    std::size_t clamped = 0;
    for (const auto& p : rep.points) clamped += p.result.clamped ? 1 : 0;
    if (clamped > 0) s += fmt::format("  flag: {} points clamped at v_dd\n", clamped);
    s += kModelNote;
    return s;
}

std::string run_mismatch_cli(const RunConfig& cfg, const RunOptions& opt) {
    const MismatchReport rep = run_mismatch_compare(cfg.spec, opt);
    std::string csv = "case,v_x_V,shift_V,v_x_ideal_V,clamped\n";
    for (const auto& arm : rep.arms) {
        csv += fmt::format("{},{},{},{},{}\n", arm.name, g17(arm.result.v_x), g17(arm.shift), g17(arm.result.v_x_ideal),
                           arm.result.clamped ? 1 : 0);
        if (opt.waveforms) write_file(cfg.out_dir / ("waveform_" + arm.name + ".csv"), waveform_csv(arm.waveform));
    }
    write_file(cfg.out_dir / "points.csv", csv);

    const MismatchSetup& m = cfg.spec.mismatch;
    std::string s = provenance(cfg);
    s += fmt::format("experiment: mismatch_compare  N: {}  mismatch on role {}: upper {:.6g} ohm, lower {:.6g} ohm, "
                     "other role {:.6g} ohm\n",
                     cfg.spec.n_rows, m.role == MismatchRole::P ? "p" : "n", m.r_upper, m.r_lower, m.r_other);
    s += fmt::format("  {:<16} {:>16} {:>16}\n", "case", "v_x [mV]", "shift [mV]");
    for (const auto& arm : rep.arms) {
        s += fmt::format("  {:<16} {:>16.9g} {:>16.9g}{}\n", arm.name, arm.result.v_x * 1e3, arm.shift * 1e3,
                         arm.result.clamped ? "  (clamped)" : "");
    }
    s += kModelNote;
    return s;
}

std::string run_n_sweep_cli(const RunConfig& cfg, const RunOptions& opt) {
    const NSweepReport rep = run_n_sweep(cfg.spec, opt);
    std::string csv = "N,v_x,total_current\n";
    for (const auto& p : rep.points) csv += fmt::format("{},{},{}\n", p.n, g17(p.result.v_x), g17(p.total_current));
    write_file(cfg.out_dir / "points.csv", csv);

    std::string s = provenance(cfg);
    s += fmt::format("experiment: n_sweep  topology: {}  i_bias: {:.6g} A\n", to_string(cfg.spec.topology),
                     cfg.spec.readout.i_bias);
    s += fmt::format("  {:>6} {:>18} {:>18} {:>18}\n", "N", "v_x [mV]", "I_total [A]", "I_cell [A]");
    double lo = rep.points.front().result.v_x;
    double hi = lo;
    for (const auto& p : rep.points) {
        s += fmt::format("  {:>6} {:>18.12g} {:>18.12g} {:>18.12g}\n", p.n, p.result.v_x * 1e3, p.total_current,
                         p.per_cell_current);
        lo = std::min(lo, p.result.v_x);
        hi = std::max(hi, p.result.v_x);
    }
    s += fmt::format("  v_x spread across N: {:.3g} V\n", hi - lo);
    s += kModelNote;
    return s;
}

std::string run_monte_carlo_cli(const RunConfig& cfg, const RunOptions& opt) {
    const MonteCarloReport rep = run_monte_carlo(cfg.spec, opt);
    std::string csv = "trial,topology,v_x_V,v_x_ideal_V,error_V,abs_error_V\n";
    for (const auto& t : rep.trials) {
        csv += fmt::format("{},{},{},{},{},{}\n", t.trial, to_string(t.topology), g17(t.result.v_x),
                           g17(t.result.v_x_ideal), g17(t.result.error), g17(std::abs(t.result.error)));
    }
    write_file(cfg.out_dir / "points.csv", csv);

    std::string s = provenance(cfg);
    s += fmt::format("experiment: monte_carlo  N: {}  trials: {}  sigma_rel: {:.6g}  full scale: {:.6g} V\n",
                     cfg.spec.n_rows, cfg.spec.samples, cfg.spec.cells.device.sigma_rel, rep.full_scale);
    s += "  |error| [mV]      mean     median        std        p05        p25        p75        p95        max  "
         "median/FS\n";
    for (const auto& e : rep.summaries) {
        s += fmt::format("  {:<10} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f} {:>10.4f} "
                         "{:>10.5f}\n",
                         to_string(e.topology), e.mean * 1e3, e.median * 1e3, e.stddev * 1e3, e.p05 * 1e3,
                         e.p25 * 1e3, e.p75 * 1e3, e.p95 * 1e3, e.max * 1e3, e.median_normalized);
    }
    s += fmt::format("  median |error| 4T4R - 4T2R: {:.4f} mV, 95% bootstrap CI [{:.4f}, {:.4f}] mV ({} resamples)\n",
                     rep.median_diff * 1e3, rep.ci_low * 1e3, rep.ci_high * 1e3, cfg.spec.bootstrap_resamples);
    s += fmt::format("  4T2R lower with CI excluding zero: {}\n", rep.ci_low > 0.0 ? "yes" : "no");
    return s;
}

RunConfig effective(const RunConfig& cfg) {
    RunConfig eff = cfg;
    if (cfg.seed_override) eff.spec.seed = *cfg.seed_override;
    return eff;
}

template <class Body>
int guarded(const RunConfig& cfg, std::ostream& out, std::ostream& err, Body&& body) {
    RunConfig eff = effective(cfg);
    try {
        eff.spec.validate();
    } catch (const Error& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        std::error_code ec;
        fs::create_directories(eff.out_dir, ec);
        if (ec) throw IoError("cannot create output directory " + eff.out_dir.string() + ": " + ec.message());
        const std::string summary = body(eff);
        write_file(eff.out_dir / "summary.txt", summary);
        out << summary;
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        err << "simulation error: " << e.what() << "\n";
        return kExitSimulation;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(cfg, out, err, [](const RunConfig& eff) {
        const RunOptions opt{std::max(1u, eff.threads), eff.emit_waveforms};
        switch (eff.spec.kind) {
            case ExperimentKind::MacSweep: return run_mac_sweep_cli(eff, opt);
            case ExperimentKind::MismatchCompare: return run_mismatch_cli(eff, opt);
            case ExperimentKind::NSweep: return run_n_sweep_cli(eff, opt);
            case ExperimentKind::MonteCarlo: return run_monte_carlo_cli(eff, opt);
        }
        throw Error(ErrorKind::InvalidSpec, "unknown experiment kind");
    });
}

int simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(cfg, out, err, [](const RunConfig& eff) {
        const ExperimentSpec& spec = eff.spec;
        const auto rows = static_cast<std::size_t>(spec.n_rows);
        std::vector<double> weights(rows);
        std::vector<Second> widths(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            weights[i] = spec.weights[i % spec.weights.size()];
            widths[i] = spec.widths[i % spec.widths.size()];
        }
        Rng rng(spec.seed);
        const ArrayState array = build_array(spec, spec.topology, weights, widths, rng);
        const TransientResult tr = simulate_transient(array, spec.readout);
        write_file(eff.out_dir / "waveform_transient.csv", waveform_csv(tr.waveform));

        const MacResult& r = tr.result;
        std::string csv = "v_xp_V,v_xn_V,v_x_V,v_x_ideal_V,mac_ideal,error_V,clamped\n";
        csv += fmt::format("{},{},{},{},{},{},{}\n", g17(r.v_xp), g17(r.v_xn), g17(r.v_x), g17(r.v_x_ideal),
                           g17(r.mac_ideal), g17(r.error), r.clamped ? 1 : 0);
        write_file(eff.out_dir / "points.csv", csv);

        std::string s = provenance(eff);
        s += fmt::format("transient: topology {}  N {}  dt {:.6g} s  samples {}\n", to_string(spec.topology), rows,
                         spec.readout.dt, tr.waveform.size());
        s += fmt::format("  v_xp {:.9g} V  v_xn {:.9g} V  v_x {:.9g} V\n", r.v_xp, r.v_xn, r.v_x);
        s += fmt::format("  ideal {:.9g} V  mac {:.9g}  error {:.6g} V{}\n", r.v_x_ideal, r.mac_ideal, r.error,
                         r.clamped ? "  (clamped)" : "");
        return s;
    });
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Behavioral simulator for current-limited differential-readout CiM arrays", "culd"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    bool waveforms = false;
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Override the experiment seed");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--waveforms", waveforms, "Write waveform_<case>.csv files");

    std::string config;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment from a config file or preset name");
    run_cmd->add_option("config", config, "Config file path or preset name")->required();
    auto* sim_cmd = app.add_subcommand("simulate", "Single transient simulation with waveform output");
    sim_cmd->add_option("config", config, "Config file path or preset name")->required();
    auto* presets_cmd = app.add_subcommand("presets", "List bundled presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (presets_cmd->parsed()) {
        out << list_presets();
        return kExitOk;
    }

    RunConfig cfg;
    try {
        cfg = load_config(config);
    } catch (const ConfigError& e) {
        err << "config error (" << config << "): " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
    cfg.out_dir = out_dir;
    cfg.seed_override = seed;
    cfg.threads = threads;
    cfg.emit_waveforms = waveforms;
    return run_cmd->parsed() ? run(cfg, out, err) : simulate(cfg, out, err);
}

}  // namespace culd
