#include "culd/cell.hpp"

#include <algorithm>
#include <cmath>

#include "culd/error.hpp"

namespace culd {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

BranchConductances sram_nominal(int bit, const SwitchParams& sw) {
    return bit > 0 ? BranchConductances{sw.g_on, sw.g_off} : BranchConductances{sw.g_off, sw.g_on};
}

}  // namespace

const char* to_string(Topology t) {
    switch (t) {
        case Topology::FourT4R: return "4T4R";
        case Topology::FourT2R: return "4T2R";
        case Topology::EightTSram: return "8T";
    }
    return "?";
}

CellInstance::CellInstance(Storage storage, double weight_nominal, BranchConductances nominal,
                           Ohm series_r_on)
    : storage_(std::move(storage)), weight_(weight_nominal), nominal_(nominal), series_r_on_(series_r_on) {
    if (const auto* s = std::get_if<SramBit>(&storage_)) {
        if (s->bit != 1 && s->bit != -1) throw Error(ErrorKind::InvalidWeight, "SRAM bit must be +1 or -1");
        s->sw.validate();
    }
}

Topology CellInstance::topology() const {
    return std::visit(Overloaded{
                          [](const FourT4RDevices&) { return Topology::FourT4R; },
                          [](const FourT2RDevices&) { return Topology::FourT2R; },
                          [](const SramBit&) { return Topology::EightTSram; },
                      },
                      storage_);
}

int CellInstance::device_count() const {
    switch (topology()) {
        case Topology::FourT4R: return 4;
        case Topology::FourT2R: return 2;
        case Topology::EightTSram: return 1;
    }
    return 0;
}

CellInstance build_cell(Topology topology, double weight, const CellBuildOptions& options, Rng& rng) {
    if (topology == Topology::EightTSram) {
        if (weight != 1.0 && weight != -1.0) {
            throw Error(ErrorKind::InvalidWeight, "8T SRAM stores a binary weight (+1 or -1)");
        }
        return make_sram_cell(weight > 0 ? 1 : -1, options.sram);
    }

    const DeviceParams& dp = options.device;
    dp.validate();
    const WeightCode code = weight_to_resistances(weight, dp.r_hrs, dp.r_lrs);
    const Siemens gp = 1.0 / code.r_p;
    const Siemens gn = 1.0 / code.r_n;
    const BranchConductances nominal{gp, gn};

    if (topology == Topology::FourT2R) {
        FourT2RDevices d;
        d.p = program_device(gp, dp, options.program, rng);
        d.n = program_device(gn, dp, options.program, rng);
        return CellInstance(d, weight, nominal, dp.series_r_on);
    }
    FourT4RDevices d;
    d.upper_p = program_device(gp, dp, options.program, rng);
    d.upper_n = program_device(gn, dp, options.program, rng);
    d.lower_p = program_device(gp, dp, options.program, rng);
    d.lower_n = program_device(gn, dp, options.program, rng);
    return CellInstance(d, weight, nominal, dp.series_r_on);
}

CellInstance make_4t4r_cell(Ohm upper_p, Ohm upper_n, Ohm lower_p, Ohm lower_n, Ohm nominal_p,
                            Ohm nominal_n, double weight) {
    FourT4RDevices d{ReramDevice::exact(upper_p), ReramDevice::exact(upper_n), ReramDevice::exact(lower_p),
                     ReramDevice::exact(lower_n)};
    if (!(nominal_p > 0.0) || !(nominal_n > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "nominal resistances must be positive");
    }
    return CellInstance(d, weight, {1.0 / nominal_p, 1.0 / nominal_n});
}

CellInstance make_4t2r_cell(Ohm r_p, Ohm r_n, double weight) {
    FourT2RDevices d{ReramDevice::exact(r_p), ReramDevice::exact(r_n)};
    return CellInstance(d, weight, {1.0 / r_p, 1.0 / r_n});
}

CellInstance make_sram_cell(int bit, const SwitchParams& sw) {
    sw.validate();
    return CellInstance(SramBit{bit, sw}, bit > 0 ? 1.0 : -1.0, sram_nominal(bit, sw));
}

BranchConductances branch_conductances(const CellInstance& cell, Phase phase) {
    const Ohm r_on = cell.series_r_on();
    auto g = [r_on](const ReramDevice& d) { return with_series(d.g_actual, r_on); };
    const bool wl = phase == Phase::WL;
    return std::visit(
        Overloaded{
            [&](const FourT4RDevices& d) {
                return wl ? BranchConductances{g(d.upper_p), g(d.upper_n)}
                          : BranchConductances{g(d.lower_n), g(d.lower_p)};
            },
            [&](const FourT2RDevices& d) {
                return wl ? BranchConductances{g(d.p), g(d.n)} : BranchConductances{g(d.n), g(d.p)};
            },
            [&](const SramBit& s) {
                const BranchConductances b = sram_nominal(s.bit, s.sw);
                return wl ? b : BranchConductances{b.g_to_blb, b.g_to_bl};
            },
        },
        cell.storage());
}

double intra_cell_mismatch(const CellInstance& cell) {
    const auto* d = std::get_if<FourT4RDevices>(&cell.storage());
    if (d == nullptr) return 0.0;
    auto rel = [](const ReramDevice& upper, const ReramDevice& lower) {
        return std::abs(upper.g_actual - lower.g_actual) / upper.g_actual;
    };
    return std::max(rel(d->upper_p, d->lower_p), rel(d->upper_n, d->lower_n));
}

}  // namespace culd
