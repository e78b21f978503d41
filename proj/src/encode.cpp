#include "culd/encode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "culd/error.hpp"

namespace culd {

namespace {

void check_window(Ohm r_hrs, Ohm r_lrs) {
    if (!(r_lrs > 0.0) || !(r_hrs > r_lrs)) {
        throw Error(ErrorKind::InvalidParameter, "require r_hrs > r_lrs > 0");
    }
}

double weight_from_r(Ohm r, Ohm r_hrs, Ohm r_lrs) {
    return (r_hrs * r_lrs / r - (r_hrs + r_lrs) / 2.0) * 2.0 / (r_hrs - r_lrs);
}

}  // namespace

void PwmSchedule::validate() const {
    if (!(x_max > 0.0)) throw Error(ErrorKind::DegenerateSchedule, "x_max must be positive");
    for (std::size_t i = 0; i < widths.size(); ++i) {
        if (!(widths[i] >= 0.0 && widths[i] <= x_max)) {
            throw Error(ErrorKind::Range, "width of row " + std::to_string(i) + " outside [0, x_max]");
        }
    }
}

WeightCode weight_to_resistances(double a, Ohm r_hrs, Ohm r_lrs) {
    check_window(r_hrs, r_lrs);
    if (!(a >= -1.0 && a <= 1.0)) throw Error(ErrorKind::Range, "weight outside [-1, 1]");
    const double sum = r_hrs + r_lrs;
    const double diff = r_hrs - r_lrs;
    const double num = 2.0 * r_hrs * r_lrs;
    return WeightCode{a, num / (sum + a * diff), num / (sum - a * diff)};
}

double resistances_to_weight(Ohm r_p, Ohm r_n, Ohm r_hrs, Ohm r_lrs, double rel_tol) {
    check_window(r_hrs, r_lrs);
    if (!(r_p > 0.0) || !(r_n > 0.0)) throw Error(ErrorKind::InvalidParameter, "resistances must be positive");
    const double a_p = weight_from_r(r_p, r_hrs, r_lrs);
    const double a_n = -weight_from_r(r_n, r_hrs, r_lrs);
    if (std::abs(a_p - a_n) > rel_tol * std::max(1.0, std::abs(a_p))) {
        throw Error(ErrorKind::InconsistentPair,
                    "r_p implies a=" + std::to_string(a_p) + ", r_n implies a=" + std::to_string(a_n));
    }
    return a_p;
}

Second input_to_pwm(double x, Second x_max) {
    if (!(x_max > 0.0)) throw Error(ErrorKind::DegenerateSchedule, "x_max must be positive");
    if (!(x >= -1.0 && x <= 1.0)) throw Error(ErrorKind::Range, "input outside [-1, 1]");
    return (x + 1.0) * x_max / 2.0;
}

double pwm_to_input(Second width, Second x_max) {
    if (!(x_max > 0.0)) throw Error(ErrorKind::DegenerateSchedule, "x_max must be positive");
    if (!(width >= 0.0 && width <= x_max)) throw Error(ErrorKind::Range, "width outside [0, x_max]");
    return (2.0 * width - x_max) / x_max;
}

double quantize_weight(double a, int levels) {
    if (levels < 2) throw Error(ErrorKind::InvalidParameter, "levels must be >= 2");
    a = std::clamp(a, -1.0, 1.0);
    const double step = 2.0 / (levels - 1);
    const double k = (a + 1.0) / step;
    const double lo = -1.0 + std::floor(k) * step;
    const double hi = std::min(1.0, lo + step);
    const double d_lo = a - lo;
    const double d_hi = hi - a;
    constexpr double kTie = 1e-12;
    if (std::abs(d_lo - d_hi) <= kTie) return std::abs(hi) >= std::abs(lo) ? hi : lo;
    // Snap exact grid values that rounding pushed a hair off.
    const double q = d_lo < d_hi ? lo : hi;
    return std::abs(q) < kTie ? 0.0 : q;
}

}  // namespace culd
