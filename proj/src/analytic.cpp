#include "sirtimes/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sirtimes/errors.hpp"
#include "sirtimes/roots.hpp"

namespace sirtimes {

namespace {

constexpr double kDegenerateDenominator = 1e-12;

double checked_log(double arg, const char* what) {
    if (!(arg > 0.0)) {
        throw DomainError(std::string("logarithm argument <= 0 in ") + what);
    }
    return std::log(arg);
}

// Adds points at - w, at + w, at - 2w, ... inside (lo, hi), so the initial
// rule resolves a feature of width w at `at` even when hi - lo is huge.
void add_graded(std::vector<double>& pts, double lo, double hi, double at, double w) {
    for (double d = w; d < hi - lo; d *= 2.0) {
        if (at - d > lo) pts.push_back(at - d);
        if (at + d < hi) pts.push_back(at + d);
    }
}

// Breakpoints in L = ln z for the integrand 1 / (beta g(e^L)) on [lo, hi]:
// the peak of g at ln rho, the layer of width mu / rho above the anchor, and
// the layer of width y / |x - rho| below ln x.
std::vector<double> log_breakpoints(const ModelParams& p, double x, double y, double lo,
                                    double hi, double lo_width) {
    std::vector<double> pts{lo, hi};
    const double log_rho = std::log(p.rho());
    const double peak = std::clamp(log_rho, lo, hi);
    pts.push_back(peak);
    add_graded(pts, lo, hi, lo, lo_width);
    add_graded(pts, lo, hi, peak, 1.0);
    const double slope = std::abs(x - p.rho());
    add_graded(pts, lo, hi, hi, slope > y ? y / slope : 1.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

LevelCurve::LevelCurve(const ModelParams& p, double x, double y)
    : rho_(p.rho()), x_(x), y_(y), log_x_(std::log(x)) {
    if (!(x > 0.0)) throw DomainError("LevelCurve requires x > 0");
}

double LevelCurve::height(double z) const {
    return y_ + (x_ - z) + rho_ * std::log(z / x_);
}

double LevelCurve::height_log(double log_z) const {
    return y_ + (x_ - std::exp(log_z)) + rho_ * (log_z - log_x_);
}

double LevelCurve::chord(double z) const {
    const double slope = rho_ * (log_x_ - std::log(rho_)) / (x_ - rho_) - 1.0;
    return slope * (z - x_) + y_;
}

double LevelCurve::tangent(double z) const {
    return (rho_ / x_ - 1.0) * (z - x_) + y_;
}

AnchorResult solve_anchor(const ModelParams& p, double x, double y) {
    if (!(x > 0.0) || !(y >= p.mu())) {
        throw DomainError("solve_anchor requires x > 0 and y >= mu");
    }
    const double rho = p.rho();
    const double target = psi(p, x, y).value;
    if (y == p.mu() && x <= rho) {
        return {x, std::log(x), 0.0};
    }

    // g(exp(L)) - mu, increasing in L on (-inf, ln rho].
    const LevelCurve curve(p, x, y);
    auto excess = [&](double log_z) { return curve.height_log(log_z) - p.mu(); };

    const double hi = std::log(rho);
    const double f_hi = excess(hi);
    if (f_hi < 0.0) {
        throw DomainError("solve_anchor: psi(x, y) < psi(rho, mu), no anchor exists");
    }
    double lo = std::min(hi, -target / rho - 10.0);
    double f_lo = excess(lo);
    for (int k = 0; f_lo >= 0.0 && f_hi != 0.0; ++k) {
        if (k > 200) throw DomainError("solve_anchor: failed to bracket the anchor");
        lo -= 2.0 * (hi - lo) + 1.0;
        f_lo = excess(lo);
    }
    const auto root = find_bracketed_root(excess, lo, hi, f_lo, f_hi, 0.0);
    const double log_a = root.root;
    const double residual = std::abs(std::exp(log_a) + p.mu() - rho * log_a - target);
    return {std::exp(log_a), log_a, residual};
}

CriticalTimeResult u_integral(const ModelParams& p, double x, double y,
                              const QuadratureOptions& opt) {
    if (!(x > 0.0) || !(y >= p.mu())) {
        throw DomainError("u_integral requires x > 0 and y >= mu");
    }
    if (y == p.mu() && x <= p.rho()) return {0.0, Method::BoundaryZero, 0.0};

    const AnchorResult anchor = solve_anchor(p, x, y);
    const LevelCurve curve(p, x, y);
    const double beta = p.beta();
    // dz / (beta z g(z)) = dL / (beta g(e^L)) with L = ln z.
    auto integrand = [&](double log_z) { return 1.0 / (beta * curve.height_log(log_z)); };
    const auto pts = log_breakpoints(p, x, y, anchor.log_a, std::log(x), p.mu() / p.rho());
    const auto q = integrate_adaptive(integrand, std::span<const double>(pts), opt);
    return {q.value, Method::Integral, q.error};
}

CriticalTimeResult v_integral(const ModelParams& p, double x, double y,
                              const QuadratureOptions& opt) {
    if (!(x >= p.rho()) || !(y > 0.0)) {
        throw DomainError("v_integral requires x >= gamma/beta and y > 0");
    }
    if (x == p.rho()) return {0.0, Method::BoundaryZero, 0.0};

    const LevelCurve curve(p, x, y);
    const double beta = p.beta();
    auto integrand = [&](double log_z) { return 1.0 / (beta * curve.height_log(log_z)); };
    const auto pts = log_breakpoints(p, x, y, std::log(p.rho()), std::log(x), 1.0);
    const auto q = integrate_adaptive(integrand, std::span<const double>(pts), opt);
    return {q.value, Method::Integral, q.error};
}

double BoundsU::tightest_upper() const {
    return subcritical_upper ? std::min(crude_upper, *subcritical_upper) : crude_upper;
}

double BoundsV::tightest_upper() const { return std::min(upper, crude_upper); }

BoundsU bounds_u(const ModelParams& p, double x, double y) {
    if (!(x >= 0.0) || !(y >= p.mu())) {
        throw DomainError("bounds_u requires x >= 0 and y >= mu");
    }
    BoundsU b{};
    b.lower = std::max(0.0, std::log((x + y) / (p.rho() + p.mu())) / p.gamma());
    b.crude_upper = (x + y) / (p.gamma() * p.mu());
    if (p.beta() * x < p.gamma()) {
        b.subcritical_upper = std::log(y / p.mu()) / (p.gamma() - p.beta() * x);
    }
    return b;
}

BoundsV bounds_v(const ModelParams& p, double x, double y) {
    const double rho = p.rho();
    const double beta = p.beta();
    if (!(x > rho) || !(y > 0.0)) {
        throw DomainError("bounds_v requires x > gamma/beta and y > 0");
    }
    const double log_ratio = std::log(x) - std::log(rho);
    const double log_y = std::log(y);

    const double upper_den = beta * (y + x * (1.0 - rho * log_ratio / (x - rho)));
    if (!(upper_den > kDegenerateDenominator)) {
        throw DomainError("bounds_v: chord-bound denominator degenerates");
    }
    const double upper_num =
        log_ratio - log_y + checked_log(x - rho + y - rho * log_ratio, "bounds_v upper");
    const double lower_num =
        log_ratio - log_y + checked_log(x - rho + y + rho * (rho / x - 1.0), "bounds_v lower");

    return {lower_num / (beta * (x - rho + y)), upper_num / upper_den, log_ratio / (beta * y)};
}

double asymptotic_u(const ModelParams& p, double x, double y) {
    if (!(x >= 0.0) || !(y >= p.mu())) {
        throw DomainError("asymptotic_u requires x >= 0 and y >= mu");
    }
    return std::log((x + y) / p.mu()) / p.gamma();
}

double asymptotic_v(const ModelParams& p, double x, double y) {
    const double rho = p.rho();
    if (!(x > rho) || !(y > 0.0)) {
        throw DomainError("asymptotic_v requires x > gamma/beta and y > 0");
    }
    return std::log((x / rho) * ((x - rho) / y + 1.0)) / (p.beta() * (x - rho + y));
}

}  // namespace sirtimes
