#pragma once

#include <array>
#include <variant>

#include "culd/device.hpp"
#include "culd/encode.hpp"

namespace culd {

enum class Phase { WL, WLB };

enum class Topology { FourT4R, FourT2R, EightTSram };

const char* to_string(Topology t);

struct BranchConductances {
    Siemens g_to_bl = 0.0;
    Siemens g_to_blb = 0.0;

    [[nodiscard]] Siemens total() const { return g_to_bl + g_to_blb; }
};

// Four 1T1R devices. WL enables the upper pair, WLB the lower pair; the
// lower pair is cross-wired so the same nominal resistance drives the other
// bit line.
struct FourT4RDevices {
    ReramDevice upper_p;
    ReramDevice upper_n;
    ReramDevice lower_p;
    ReramDevice lower_n;
};

// Two devices shared by both phases through four access switches.
struct FourT2RDevices {
    ReramDevice p;
    ReramDevice n;
};

struct SramBit {
    int bit = +1;  // +1 pulls BL during WL, -1 pulls BLB during WL
    SwitchParams sw;
};

class CellInstance {
public:
    using Storage = std::variant<FourT4RDevices, FourT2RDevices, SramBit>;

    CellInstance(Storage storage, double weight_nominal, BranchConductances nominal,
                 Ohm series_r_on = 0.0);

    [[nodiscard]] Topology topology() const;
    [[nodiscard]] const Storage& storage() const { return storage_; }
    [[nodiscard]] double weight_nominal() const { return weight_; }
    // Variation-free (p, n) conductances used for the ideal readout.
    [[nodiscard]] const BranchConductances& nominal() const { return nominal_; }
    [[nodiscard]] Ohm series_r_on() const { return series_r_on_; }
    // Number of physical storage elements: 4, 2, or 1 (the latch).
    [[nodiscard]] int device_count() const;

private:
    Storage storage_;
    double weight_;
    BranchConductances nominal_;
    Ohm series_r_on_;
};

struct CellBuildOptions {
    DeviceParams device;
    ProgramConfig program;
    SwitchParams sram;
};

CellInstance build_cell(Topology topology, double weight, const CellBuildOptions& options, Rng& rng);

// Hand-built cells with exact resistances; the nominal pair is the intended
// (p, n) value and need not lie on the weight-encoding manifold.
CellInstance make_4t4r_cell(Ohm upper_p, Ohm upper_n, Ohm lower_p, Ohm lower_n, Ohm nominal_p,
                            Ohm nominal_n, double weight = 0.0);
CellInstance make_4t2r_cell(Ohm r_p, Ohm r_n, double weight = 0.0);
CellInstance make_sram_cell(int bit, const SwitchParams& sw = {});

BranchConductances branch_conductances(const CellInstance& cell, Phase phase);

// Largest relative disagreement between the upper and lower copies of a
// role in a 4T4R cell. Zero for the other topologies.
double intra_cell_mismatch(const CellInstance& cell);

}  // namespace culd
