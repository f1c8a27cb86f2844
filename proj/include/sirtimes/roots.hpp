#pragma once

#include <cmath>
#include <utility>

#include "sirtimes/errors.hpp"

namespace sirtimes {

struct RootBracket {
    double root;
    double lo;
    double hi;
    int iterations;
};

// Root of f on [lo, hi] given f(lo) and f(hi) of opposite sign (or one zero).
// Illinois-modified regula falsi; falls back to bisection whenever an
// iteration fails to halve the bracket. Stops when hi - lo <= x_tol or the
// bracket endpoints are adjacent doubles.
template <class F>
RootBracket find_bracketed_root(F&& f, double lo, double hi, double f_lo, double f_hi,
                                double x_tol, int max_iter = 400) {
    if (f_lo == 0.0) return {lo, lo, lo, 0};
    if (f_hi == 0.0) return {hi, hi, hi, 0};
    if (std::signbit(f_lo) == std::signbit(f_hi)) {
        throw DomainError("find_bracketed_root: endpoints do not bracket a sign change");
    }
    int side = 0;  // which endpoint was retained last (-1 lo, +1 hi)
    bool bisect_next = false;
    int it = 0;
    for (; it < max_iter; ++it) {
        const double width = hi - lo;
        if (width <= x_tol) break;
        const double mid_plain = lo + 0.5 * width;
        if (mid_plain <= lo || mid_plain >= hi) break;

        double trial = bisect_next ? mid_plain : (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        if (!(trial > lo && trial < hi)) trial = mid_plain;

        const double f_trial = f(trial);
        if (f_trial == 0.0) return {trial, trial, trial, it + 1};

        if (std::signbit(f_trial) == std::signbit(f_lo)) {
            lo = trial;
            f_lo = f_trial;
            if (side == -1) f_hi *= 0.5;
            side = -1;
        } else {
            hi = trial;
            f_hi = f_trial;
            if (side == +1) f_lo *= 0.5;
            side = +1;
        }
        bisect_next = !bisect_next && (hi - lo) > 0.5 * width;
    }
    const double root = std::abs(f_lo) <= std::abs(f_hi) ? lo : hi;
    return {root, lo, hi, it};
}

}  // namespace sirtimes
