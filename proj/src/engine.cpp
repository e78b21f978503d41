#include "culd/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "culd/error.hpp"

namespace culd {

void ReadoutConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw Error(ErrorKind::InvalidParameter, std::string(name) + " must be positive");
    };
    positive(i_bias, "i_bias");
    positive(c_p, "c_p");
    positive(c_n, "c_n");
    positive(v_dd, "v_dd");
    positive(mirror_gain_p, "mirror_gain_p");
    positive(mirror_gain_n, "mirror_gain_n");
    positive(dt, "dt");
}

void ArrayState::validate() const {
    if (cells.empty()) throw Error(ErrorKind::InvalidParameter, "array has no rows");
    if (schedule.widths.size() != cells.size()) {
        throw Error(ErrorKind::InvalidParameter, "schedule has " + std::to_string(schedule.widths.size()) +
                                                     " widths for " + std::to_string(cells.size()) + " rows");
    }
    schedule.validate();
}

Phase row_phase(const PwmSchedule& schedule, std::size_t row, Second t_mid) {
    const Second w = schedule.widths[row];
    if (schedule.order == PhaseOrder::WlFirst) return t_mid < w ? Phase::WL : Phase::WLB;
    return t_mid < schedule.x_max - w ? Phase::WLB : Phase::WL;
}

NodeSolution solve_node(std::span<const CellInstance> cells, std::span<const Phase> phases, Ampere i_bias) {
    if (cells.size() != phases.size()) throw Error(ErrorKind::InvalidParameter, "one phase per row required");

    std::vector<BranchConductances> branches;
    branches.reserve(cells.size());
    Siemens g_bl = 0.0;
    Siemens g_blb = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        branches.push_back(branch_conductances(cells[i], phases[i]));
        g_bl += branches.back().g_to_bl;
        g_blb += branches.back().g_to_blb;
    }
    const Siemens g_total = g_bl + g_blb;
    if (!(g_total > 0.0)) throw Error(ErrorKind::OpenCircuit, "no conducting branch on the source node");

    NodeSolution s;
    s.v_node = i_bias / g_total;
    s.i_bl = s.v_node * g_bl;
    s.i_blb = s.v_node * g_blb;
    s.cell_current.reserve(cells.size());
    for (const auto& b : branches) s.cell_current.push_back(s.v_node * b.total());
    return s;
}

std::vector<EventInterval> event_intervals(const ArrayState& array, const ReadoutConfig& cfg) {
    array.validate();
    cfg.validate();
    const PwmSchedule& sch = array.schedule;

    std::vector<Second> edges{0.0, sch.x_max};
    for (Second w : sch.widths) edges.push_back(sch.order == PhaseOrder::WlFirst ? w : sch.x_max - w);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<EventInterval> out;
    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
        EventInterval iv;
        iv.t_begin = edges[k];
        iv.t_end = edges[k + 1];
        if (!(iv.t_end > iv.t_begin)) continue;
        const Second mid = 0.5 * (iv.t_begin + iv.t_end);
        iv.phases.reserve(array.cells.size());
        for (std::size_t i = 0; i < array.cells.size(); ++i) iv.phases.push_back(row_phase(sch, i, mid));
        iv.node = solve_node(array.cells, iv.phases, cfg.i_bias);
        out.push_back(std::move(iv));
    }
    return out;
}

namespace {

MacResult finish(Coulomb q_bl, Coulomb q_blb, const ArrayState& array, const ReadoutConfig& cfg) {
    MacResult r;
    r.v_xp = cfg.mirror_gain_p * q_bl / cfg.c_p;
    r.v_xn = cfg.mirror_gain_n * q_blb / cfg.c_n;
    if (r.v_xp > cfg.v_dd) {
        r.v_xp = cfg.v_dd;
        r.clamped = true;
    }
    if (r.v_xn > cfg.v_dd) {
        r.v_xn = cfg.v_dd;
        r.clamped = true;
    }
    r.v_x = r.v_xp - r.v_xn;

    std::vector<BranchConductances> nominal;
    std::vector<double> weights;
    std::vector<double> inputs;
    for (std::size_t i = 0; i < array.cells.size(); ++i) {
        nominal.push_back(array.cells[i].nominal());
        weights.push_back(array.cells[i].weight_nominal());
        inputs.push_back(pwm_to_input(array.schedule.widths[i], array.schedule.x_max));
    }
    r.v_x_ideal = ideal_vx(nominal, array.schedule.widths, array.schedule.x_max, cfg);
    r.mac_ideal = mac_value(weights, inputs);
    r.error = r.v_x - r.v_x_ideal;
    return r;
}

}  // namespace

MacResult integrate_exact(const ArrayState& array, const ReadoutConfig& cfg) {
    Coulomb q_bl = 0.0;
    Coulomb q_blb = 0.0;
    for (const EventInterval& iv : event_intervals(array, cfg)) {
        const Second span = iv.t_end - iv.t_begin;
        q_bl += iv.node.i_bl * span;
        q_blb += iv.node.i_blb * span;
    }
    return finish(q_bl, q_blb, array, cfg);
}

TransientResult simulate_transient(const ArrayState& array, const ReadoutConfig& cfg) {
    array.validate();
    cfg.validate();
    const PwmSchedule& sch = array.schedule;
    const std::size_t rows = array.cells.size();

    std::vector<Second> edges;
    for (Second w : sch.widths) {
        const Second e = sch.order == PhaseOrder::WlFirst ? w : sch.x_max - w;
        if (e > 0.0 && e < sch.x_max) edges.push_back(e);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    const auto steps = static_cast<std::size_t>(std::ceil(sch.x_max / cfg.dt - 1e-9));
    TransientResult out;
    Waveform& wf = out.waveform;
    wf.t.reserve(steps + 1);

    std::vector<Phase> phases(rows);
    auto solve_at = [&](Second t_mid) {
        for (std::size_t i = 0; i < rows; ++i) phases[i] = row_phase(sch, i, t_mid);
        return solve_node(array.cells, phases, cfg.i_bias);
    };
    auto emit = [&](Second t, Volt vp, Volt vn, const NodeSolution& node) {
        wf.t.push_back(t);
        wf.v_xp.push_back(std::min(vp, cfg.v_dd));
        wf.v_xn.push_back(std::min(vn, cfg.v_dd));
        wf.i_bl.push_back(node.i_bl);
        wf.i_blb.push_back(node.i_blb);
        wf.clamped.push_back(vp > cfg.v_dd || vn > cfg.v_dd);
    };

    // Forward Euler on the fixed grid; each step is cut at every WL edge it
    // contains so the piecewise-constant currents integrate without error.
    Coulomb q_bl = 0.0;
    Coulomb q_blb = 0.0;
    const Second first_end = std::min(cfg.dt, sch.x_max);
    Second first_cut = first_end;
    if (!edges.empty()) first_cut = std::min(first_cut, edges.front());
    emit(0.0, 0.0, 0.0, solve_at(0.5 * first_cut));

    auto edge = edges.begin();
    for (std::size_t k = 0; k < steps; ++k) {
        const Second t0 = static_cast<double>(k) * cfg.dt;
        const Second t1 = k + 1 == steps ? sch.x_max : std::min(sch.x_max, static_cast<double>(k + 1) * cfg.dt);
        Second a = t0;
        NodeSolution last;
        while (a < t1) {
            while (edge != edges.end() && *edge <= a) ++edge;
            const Second b = (edge != edges.end() && *edge < t1) ? *edge : t1;
            last = solve_at(0.5 * (a + b));
            q_bl += last.i_bl * (b - a);
            q_blb += last.i_blb * (b - a);
            a = b;
        }
        emit(t1, cfg.mirror_gain_p * q_bl / cfg.c_p, cfg.mirror_gain_n * q_blb / cfg.c_n, last);
    }

    out.result = finish(q_bl, q_blb, array, cfg);
    return out;
}

Volt ideal_vx(std::span<const BranchConductances> nominal, std::span<const Second> widths, Second x_max,
              const ReadoutConfig& cfg) {
    if (nominal.size() != widths.size()) throw Error(ErrorKind::InvalidParameter, "one width per row required");
    if (!(x_max > 0.0)) throw Error(ErrorKind::DegenerateSchedule, "x_max must be positive");
    Siemens g_total = 0.0;
    for (const auto& b : nominal) g_total += b.total();
    if (!(g_total > 0.0)) throw Error(ErrorKind::OpenCircuit, "no conducting branch on the source node");
    const Volt v_node = cfg.i_bias / g_total;

    double acc = 0.0;
    for (std::size_t i = 0; i < nominal.size(); ++i) {
        const Ampere diff = v_node * (nominal[i].g_to_bl - nominal[i].g_to_blb);
        acc += (2.0 * widths[i] - x_max) * diff;
    }
    return acc / cfg.c_p;
}

Volt closed_form_vx(std::span<const double> weights, std::span<const double> inputs, Ohm r_hrs, Ohm r_lrs,
                    Second x_max, const ReadoutConfig& cfg) {
    if (weights.size() != inputs.size()) throw Error(ErrorKind::InvalidParameter, "one input per weight required");
    std::vector<BranchConductances> nominal;
    std::vector<Second> widths;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const WeightCode code = weight_to_resistances(weights[i], r_hrs, r_lrs);
        nominal.push_back({1.0 / code.r_p, 1.0 / code.r_n});
        widths.push_back(input_to_pwm(inputs[i], x_max));
    }
    return ideal_vx(nominal, widths, x_max, cfg);
}

double mac_value(std::span<const double> weights, std::span<const double> inputs) {
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size() && i < inputs.size(); ++i) acc += weights[i] * inputs[i];
    return acc;
}

}  // namespace culd
