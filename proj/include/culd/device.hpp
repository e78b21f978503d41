#pragma once

#include <cstdint>
#include <random>

namespace culd {

using Ohm = double;
using Siemens = double;
using Volt = double;
using Ampere = double;
using Second = double;
using Farad = double;
using Coulomb = double;

using Rng = std::mt19937_64;

enum class VariationModel {
    LogNormal,        // g * exp(sigma * z)
    TruncatedNormal,  // g * (1 + sigma * z), redrawn until positive
};

struct DeviceParams {
    Ohm r_hrs = 150e3;
    Ohm r_lrs = 50e3;
    double sigma_rel = 0.0;
    Ohm series_r_on = 0.0;
    VariationModel model = VariationModel::LogNormal;

    void validate() const;
    bool operator==(const DeviceParams&) const = default;
};

// Write-verify loop settings. max_iters = 1 is a single unverified shot.
struct ProgramConfig {
    double verify_tol = 0.05;
    int max_iters = 1;

    bool operator==(const ProgramConfig&) const = default;
};

struct ReramDevice {
    Siemens g_target = 0.0;
    Siemens g_actual = 0.0;
    int program_attempts = 0;
    bool verified = false;

    [[nodiscard]] Ohm resistance() const { return 1.0 / g_actual; }

    // A device written to an exact resistance, e.g. for hand-built fixtures.
    static ReramDevice exact(Ohm r);
};

// Pull path of an SRAM-style cell: on-conductance and leakage.
struct SwitchParams {
    Siemens g_on = 50e-6;
    Siemens g_off = 1e-9;

    void validate() const;
    bool operator==(const SwitchParams&) const = default;
};

Siemens sample_conductance(Siemens g_nominal, double sigma_rel, Rng& rng,
                           VariationModel model = VariationModel::LogNormal);

ReramDevice program_device(Siemens g_target, const DeviceParams& params,
                           double verify_tol, int max_iters, Rng& rng);

inline ReramDevice program_device(Siemens g_target, const DeviceParams& params,
                                  const ProgramConfig& prog, Rng& rng) {
    return program_device(g_target, params, prog.verify_tol, prog.max_iters, rng);
}

Ampere read_device(const ReramDevice& device, Volt v_read, Ohm series_r_on = 0.0);

// Conductance seen through an access switch of resistance series_r_on.
inline Siemens with_series(Siemens g, Ohm series_r_on) {
    return series_r_on > 0.0 ? 1.0 / (1.0 / g + series_r_on) : g;
}

}  // namespace culd
