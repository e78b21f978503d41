#pragma once

#include <utility>
#include <vector>

#include "culd/device.hpp"

namespace culd {

// Differential resistance pair for one signed weight. The parallel composite
// r_p || r_n is the same for every weight in the window.
struct WeightCode {
    double a = 0.0;
    Ohm r_p = 0.0;
    Ohm r_n = 0.0;
};

enum class PhaseOrder { WlFirst, WlbFirst };

// Complementary PWM drive: row i holds WL for widths[i] and WLB for the rest
// of the x_max period.
struct PwmSchedule {
    Second x_max = 100e-9;
    std::vector<Second> widths;
    PhaseOrder order = PhaseOrder::WlFirst;

    void validate() const;
};

WeightCode weight_to_resistances(double a, Ohm r_hrs, Ohm r_lrs);

// Inverse of weight_to_resistances. The pair must lie on the encoding
// manifold; rel_tol bounds the disagreement between the weight implied by
// r_p and the weight implied by r_n.
double resistances_to_weight(Ohm r_p, Ohm r_n, Ohm r_hrs, Ohm r_lrs, double rel_tol = 1e-9);

Second input_to_pwm(double x, Second x_max);
double pwm_to_input(Second width, Second x_max);

// Nearest point of the uniform `levels`-point grid on [-1, 1]; ties go away
// from zero.
double quantize_weight(double a, int levels);

inline Ohm composite_resistance(Ohm r_p, Ohm r_n) { return r_p * r_n / (r_p + r_n); }

}  // namespace culd
