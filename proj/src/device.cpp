#include "culd/device.hpp"

#include <cmath>
#include <string>

#include "culd/error.hpp"

namespace culd {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidParameter: return "invalid parameter";
        case ErrorKind::OutOfWindow: return "out of window";
        case ErrorKind::Range: return "out of range";
        case ErrorKind::InvalidWeight: return "invalid weight";
        case ErrorKind::InconsistentPair: return "inconsistent resistance pair";
        case ErrorKind::OpenCircuit: return "open circuit";
        case ErrorKind::DegenerateSchedule: return "degenerate schedule";
        case ErrorKind::InvalidSpec: return "invalid experiment spec";
    }
    return "error";
}

void DeviceParams::validate() const {
    if (!(r_lrs > 0.0) || !(r_hrs > r_lrs)) {
        throw Error(ErrorKind::InvalidParameter, "require r_hrs > r_lrs > 0");
    }
    if (!(sigma_rel >= 0.0)) throw Error(ErrorKind::InvalidParameter, "sigma_rel must be >= 0");
    if (!(series_r_on >= 0.0)) throw Error(ErrorKind::InvalidParameter, "series_r_on must be >= 0");
}

void SwitchParams::validate() const {
    if (!(g_off >= 0.0) || !(g_on > g_off)) {
        throw Error(ErrorKind::InvalidParameter, "require g_on > g_off >= 0");
    }
}

ReramDevice ReramDevice::exact(Ohm r) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidParameter, "resistance must be positive");
    return ReramDevice{1.0 / r, 1.0 / r, 1, true};
}

Siemens sample_conductance(Siemens g_nominal, double sigma_rel, Rng& rng, VariationModel model) {
    if (!(g_nominal > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "nominal conductance must be positive");
    }
    if (!(sigma_rel >= 0.0)) throw Error(ErrorKind::InvalidParameter, "sigma_rel must be >= 0");
    if (sigma_rel == 0.0) return g_nominal;

    std::normal_distribution<double> normal(0.0, 1.0);
    if (model == VariationModel::LogNormal) {
        return g_nominal * std::exp(sigma_rel * normal(rng));
    }
    for (;;) {
        const double factor = 1.0 + sigma_rel * normal(rng);
        if (factor > 0.0) return g_nominal * factor;
    }
}

ReramDevice program_device(Siemens g_target, const DeviceParams& params, double verify_tol,
                           int max_iters, Rng& rng) {
    params.validate();
    if (!(g_target > 0.0)) throw Error(ErrorKind::InvalidParameter, "target conductance must be positive");
    if (!(verify_tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "verify_tol must be positive");
    if (max_iters < 1) throw Error(ErrorKind::InvalidParameter, "max_iters must be >= 1");

    // Tolerate rounding from the weight encoding at the window edges.
    const Ohm r = 1.0 / g_target;
    constexpr double kEdge = 1e-12;
    if (r < params.r_lrs * (1.0 - kEdge) || r > params.r_hrs * (1.0 + kEdge)) {
        throw Error(ErrorKind::OutOfWindow,
                    "target " + std::to_string(r) + " ohm outside [" + std::to_string(params.r_lrs) +
                        ", " + std::to_string(params.r_hrs) + "]");
    }

    ReramDevice dev{g_target, g_target, 0, false};
    for (int attempt = 1; attempt <= max_iters; ++attempt) {
        dev.g_actual = sample_conductance(g_target, params.sigma_rel, rng, params.model);
        dev.program_attempts = attempt;
        if (std::abs(dev.g_actual - g_target) / g_target <= verify_tol) {
            dev.verified = true;
            break;
        }
    }
    return dev;
}

Ampere read_device(const ReramDevice& device, Volt v_read, Ohm series_r_on) {
    if (!(v_read >= 0.0)) throw Error(ErrorKind::InvalidParameter, "v_read must be >= 0");
    if (!(series_r_on >= 0.0)) throw Error(ErrorKind::InvalidParameter, "series_r_on must be >= 0");
    return with_series(device.g_actual, series_r_on) * v_read;
}

}  // namespace culd
