#pragma once

#include <span>
#include <vector>

#include "culd/cell.hpp"
#include "culd/encode.hpp"

namespace culd {

struct ReadoutConfig {
    Ampere i_bias = 10e-6;
    Farad c_p = 3e-12;
    Farad c_n = 3e-12;
    Volt v_dd = 0.8;
    // Mirror ratio per side; unequal values model mirror mismatch.
    double mirror_gain_p = 1.0;
    double mirror_gain_n = 1.0;
    Second dt = 0.1e-9;

    void validate() const;
    bool operator==(const ReadoutConfig&) const = default;
};

// N rows sharing one BL/BLB pair and one source node.
struct ArrayState {
    std::vector<CellInstance> cells;
    PwmSchedule schedule;

    void validate() const;
};

struct NodeSolution {
    Volt v_node = 0.0;
    Ampere i_bl = 0.0;
    Ampere i_blb = 0.0;
    std::vector<Ampere> cell_current;  // per-row total (BL + BLB)
};

struct MacResult {
    Volt v_xp = 0.0;
    Volt v_xn = 0.0;
    Volt v_x = 0.0;  // v_xp - v_xn
    Volt v_x_ideal = 0.0;
    double mac_ideal = 0.0;
    Volt error = 0.0;
    bool clamped = false;
};

struct Waveform {
    std::vector<Second> t;
    std::vector<Volt> v_xp;
    std::vector<Volt> v_xn;
    std::vector<Ampere> i_bl;
    std::vector<Ampere> i_blb;
    std::vector<bool> clamped;

    [[nodiscard]] std::size_t size() const { return t.size(); }
};

// A stretch of the PWM period during which every row holds one phase.
struct EventInterval {
    Second t_begin = 0.0;
    Second t_end = 0.0;
    std::vector<Phase> phases;
    NodeSolution node;
};

Phase row_phase(const PwmSchedule& schedule, std::size_t row, Second t_mid);

NodeSolution solve_node(std::span<const CellInstance> cells, std::span<const Phase> phases, Ampere i_bias);

// Switching instants split the period into intervals of constant current.
std::vector<EventInterval> event_intervals(const ArrayState& array, const ReadoutConfig& cfg);

MacResult integrate_exact(const ArrayState& array, const ReadoutConfig& cfg);

struct TransientResult {
    MacResult result;
    Waveform waveform;
};

TransientResult simulate_transient(const ArrayState& array, const ReadoutConfig& cfg);

// Ideal output: a single source node shared by all rows, each row driven by
// its nominal (p, n) conductances, unit mirrors, and both capacitors equal
// to c_p.
Volt ideal_vx(std::span<const BranchConductances> nominal, std::span<const Second> widths, Second x_max,
              const ReadoutConfig& cfg);

// Ideal output for encoded weights a_i and inputs x_i in [-1, 1].
Volt closed_form_vx(std::span<const double> weights, std::span<const double> inputs, Ohm r_hrs, Ohm r_lrs,
                    Second x_max, const ReadoutConfig& cfg);

double mac_value(std::span<const double> weights, std::span<const double> inputs);

}  // namespace culd
