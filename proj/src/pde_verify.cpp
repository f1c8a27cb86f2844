#include "sirtimes/pde_verify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sirtimes/errors.hpp"

namespace sirtimes {

Field u_field(const ModelParams& p, const QuadratureOptions& quad) {
    return {[p, quad](double x, double y) { return u_integral(p, x, y, quad).value; },
            FieldDomain::U};
}

Field v_field(const ModelParams& p, const QuadratureOptions& quad) {
    return {[p, quad](double x, double y) { return v_integral(p, x, y, quad).value; },
            FieldDomain::V};
}

double default_fd_step(double x, double y) {
    return 1e-4 * std::max({1.0, std::abs(x), std::abs(y)});
}

namespace {

bool inside(FieldDomain domain, const ModelParams& p, double x, double y) {
    if (domain == FieldDomain::U) return x > 0.0 && y > p.mu();
    return x > p.rho() && y > 0.0;
}

double central_residual(const Field& field, const ModelParams& p, double x, double y, double h) {
    const double dx = (field.eval(x + h, y) - field.eval(x - h, y)) / (2.0 * h);
    const double dy = (field.eval(x, y + h) - field.eval(x, y - h)) / (2.0 * h);
    return p.beta() * x * y * dx + (p.gamma() - p.beta() * x) * y * dy - 1.0;
}

}  // namespace

ResidualReport pde_residual(const Field& field, const ModelParams& p, double x, double y,
                            double h) {
    if (!(h > 0.0)) throw DomainError("pde_residual: step must be > 0");
    if (!inside(field.domain, p, x - h, y) || !inside(field.domain, p, x, y - h)) {
        throw StencilOutOfDomain("pde_residual: stencil around (" + std::to_string(x) + ", " +
                                 std::to_string(y) + ") with h = " + std::to_string(h) +
                                 " leaves the open domain");
    }
    ResidualReport report{x, y, h, 0.0, 0.0, 0.0, std::nullopt};
    report.residual = central_residual(field, p, x, y, h);
    report.residual_half = central_residual(field, p, x, y, 0.5 * h);
    report.residual_quarter = central_residual(field, p, x, y, 0.25 * h);

    const double extrapolated = (4.0 * report.residual_quarter - report.residual_half) / 3.0;
    const double coarse = std::abs(report.residual - extrapolated);
    const double fine = std::abs(report.residual_half - extrapolated);
    if (coarse > kResidualNoiseFloor && fine > kResidualNoiseFloor) {
        report.order_estimate = std::log2(coarse / fine);
    }
    return report;
}

double check_boundary_u(const ModelParams& p, int n_points, const IntegratorConfig& cfg) {
    if (n_points < 2) throw DomainError("check_boundary_u requires n_points >= 2");
    double worst = 0.0;
    for (int k = 0; k < n_points; ++k) {
        const double x = k == n_points - 1 ? p.rho() : p.rho() * k / (n_points - 1);
        worst = std::max(worst, std::abs(hitting_time_u(p, x, p.mu(), cfg).value));
    }
    return worst;
}

double check_boundary_v(const ModelParams& p, std::span<const double> y_values,
                        const IntegratorConfig& cfg) {
    double worst = 0.0;
    for (double y : y_values) {
        if (!(y > 0.0)) throw DomainError("check_boundary_v requires y > 0");
        worst = std::max(worst, std::abs(hitting_time_v(p, p.rho(), y, cfg).value));
    }
    return worst;
}

double check_characteristic_identity(const ModelParams& p, TimeKind kind, double x, double y,
                                     std::span<const double> fractions,
                                     const IntegratorConfig& cfg, const QuadratureOptions& quad) {
    const bool interior = kind == TimeKind::U ? (x > 0.0 && y > p.mu()) : (x > p.rho() && y > 0.0);
    if (!interior) throw DomainError("check_characteristic_identity: (x, y) is not interior");
    for (double f : fractions) {
        if (!(f >= 0.0 && f < 1.0)) {
            throw DomainError("check_characteristic_identity: fractions must lie in [0, 1)");
        }
    }

    const double total = critical_time(p, kind, Route::Integral, x, y, cfg, quad).value;
    const double t_max = fractions.empty() ? 0.0 : *std::max_element(fractions.begin(), fractions.end()) * total;
    const Trajectory traj = integrate(p, x, y, t_max, cfg);

    double worst = 0.0;
    for (double f : fractions) {
        const double t = f * total;
        const SirState s = f == 0.0 ? traj.initial() : traj.state_at(t);
        const double remaining = critical_time(p, kind, Route::Integral, s.s, s.i, cfg, quad).value;
        worst = std::max(worst, std::abs(remaining - (total - t)) / std::max(1.0, total));
    }
    return worst;
}

}  // namespace sirtimes
