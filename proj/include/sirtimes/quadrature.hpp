#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "sirtimes/errors.hpp"

namespace sirtimes {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_intervals = 5000;
};

struct QuadratureResult {
    double value;
    double error;
    int intervals;
};

namespace detail {

// 15-point Kronrod extension of the 7-point Gauss rule; nodes in [0, 1),
// symmetric about the origin. Odd indices are the Gauss nodes.
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod_15(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_center = f(center);
    double kronrod = f_center * kKronrodWeights[7];
    double gauss = f_center * kGaussWeights[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[j] * pair;
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7, 15) quadrature of f over
// [points.front(), points.back()], seeded with one segment per consecutive
// pair of the increasing breakpoints. The segment with the largest error
// estimate is bisected until the summed estimate meets
// max(abs_tol, rel_tol * |value|). Throws QuadratureFailure carrying the best
// estimate if the interval budget runs out.
template <class F>
QuadratureResult integrate_adaptive(F&& f, std::span<const double> points,
                                    const QuadratureOptions& opt = {}) {
    if (points.size() < 2 || !std::is_sorted(points.begin(), points.end())) {
        throw DomainError("integrate_adaptive: breakpoints must be increasing, at least two");
    }
    std::priority_queue<detail::Segment> active;
    std::vector<detail::Segment> settled;  // too narrow to split further
    double value = 0.0;
    double error = 0.0;
    int count = 0;
    for (std::size_t k = 1; k < points.size(); ++k) {
        if (points[k] == points[k - 1]) continue;
        const auto seg = detail::gauss_kronrod_15(f, points[k - 1], points[k]);
        value += seg.value;
        error += seg.error;
        active.push(seg);
        ++count;
    }
    if (count == 0) return {0.0, 0.0, 0};

    auto totals = [&] {
        double value = 0.0, error = 0.0;
        std::vector<detail::Segment> all = settled;
        auto copy = active;
        while (!copy.empty()) {
            all.push_back(copy.top());
            copy.pop();
        }
        std::sort(all.begin(), all.end(),
                  [](const detail::Segment& l, const detail::Segment& r) { return l.a < r.a; });
        for (const auto& s : all) {
            value += s.value;
            error += s.error;
        }
        return std::pair{value, error};
    };

    double settled_error = 0.0;
    while (!active.empty() && error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
        if (count >= opt.max_intervals) {
            auto [v, e] = totals();
            throw QuadratureFailure("adaptive quadrature did not converge within the interval budget",
                                    v, e);
        }
        const detail::Segment worst = active.top();
        active.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                      std::max(std::abs(worst.a), std::abs(worst.b))) {
            settled.push_back(worst);
            settled_error += worst.error;
            if (active.empty()) break;
            continue;
        }
        const auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        const auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        active.push(left);
        active.push(right);
        ++count;
    }
    auto [v, e] = totals();
    if (!std::isfinite(v)) {
        throw QuadratureFailure("adaptive quadrature produced a non-finite value", v, e);
    }
    if (settled_error > std::max(opt.abs_tol, opt.rel_tol * std::abs(v))) {
        throw QuadratureFailure("adaptive quadrature hit the resolution limit of double precision",
                                v, e);
    }
    return {v, e, count};
}

// Single-interval form; reversed limits negate the result.
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
    if (a == b) return {0.0, 0.0, 0};
    if (b < a) {
        auto r = integrate_adaptive(f, b, a, opt);
        return {-r.value, r.error, r.intervals};
    }
    const std::array<double, 2> points{a, b};
    return integrate_adaptive(f, std::span<const double>(points), opt);
}

}  // namespace sirtimes
