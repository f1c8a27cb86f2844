#include "sirtimes/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "sirtimes/analytic.hpp"
#include "sirtimes/critical_time.hpp"
#include "sirtimes/errors.hpp"
#include "sirtimes/io.hpp"
#include "sirtimes/pde_verify.hpp"

namespace sirtimes {

namespace {

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

// Catches numerical failures so one broken check does not hide the others.
CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        return {name, false, std::string("exception: ") + e.what()};
    }
}

const ModelParams kRefU(2.0, 3.0, 1.0);
const ModelParams kRefV(3.0, 3.0, 1.0);

GridSpec u_reference_grid(bool quick) {
    return {{0.1, 6.0, quick ? 13 : 61}, {1.01, 5.0, quick ? 9 : 41}, Spacing::Linear};
}

GridSpec v_reference_grid(bool quick) {
    return {{1.01, 20.0, quick ? 15 : 77}, {0.5, 5.0, quick ? 7 : 19}, Spacing::Linear};
}

CheckResult conservation_and_mass(const VerifyOptions& opt) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> xs(0.1, 20.0), ys(0.1, 5.0);
    const int trajectories = opt.quick ? 5 : 20;
    double worst_drift = 0.0, worst_mass_rise = 0.0, min_pop = INFINITY;
    for (int k = 0; k < trajectories; ++k) {
        const ModelParams& p = k % 2 == 0 ? kRefU : kRefV;
        const double x = xs(rng), y = ys(rng);
        const Trajectory traj = integrate(p, x, y, 10.0, opt.integrator);
        const double psi0 = psi(p, x, y).value;
        double prev_mass = x + y;
        for (int j = 0; j <= 50; ++j) {
            const SirState s = traj.state_at(10.0 * j / 50);
            worst_drift = std::max(worst_drift,
                                   std::abs(psi(p, s.s, s.i).value - psi0) / std::max(1.0, std::abs(psi0)));
            worst_mass_rise = std::max(worst_mass_rise, (s.s + s.i - prev_mass) / (x + y));
            prev_mass = s.s + s.i;
            min_pop = std::min({min_pop, s.s, s.i});
        }
    }
    const bool ok = worst_drift <= 1e-8 && worst_mass_rise <= 1e-12 && min_pop > 0.0;
    return {"conservation", ok,
            fmt("psi drift %.3g, mass rise %.3g, min population %.3g", worst_drift,
                worst_mass_rise, min_pop)};
}

CheckResult boundaries(const VerifyOptions& opt) {
    const std::array<double, 4> ys{0.1, 1.0, 10.0, 1e6};
    const double bu = check_boundary_u(kRefU, 10, opt.integrator);
    const double bv = check_boundary_v(kRefV, ys, opt.integrator);
    const double corner = u_integral(kRefU, kRefU.rho(), kRefU.mu()).value;
    return {"boundary_conditions", bu == 0.0 && bv == 0.0 && corner == 0.0,
            fmt("max |u(x,mu)| %.3g, max |v(rho,y)| %.3g, corner %.3g", bu, bv, corner)};
}

CheckResult pde_characterization(const std::string& name, const Field& field, const ModelParams& p,
                                 const std::array<double, 3>& xs, const std::array<double, 3>& ys,
                                 bool check_u_boundary) {
    double worst_res = 0.0, min_order = INFINITY, max_order = -INFINITY;
    bool orders_ok = true;
    for (double y : ys) {
        for (double x : xs) {
            const ResidualReport r = pde_residual(field, p, x, y, 1e-3);
            worst_res = std::max(worst_res, std::abs(r.residual_quarter));
            if (!r.order_estimate) {
                orders_ok = false;
                continue;
            }
            min_order = std::min(min_order, *r.order_estimate);
            max_order = std::max(max_order, *r.order_estimate);
        }
    }
    orders_ok = orders_ok && min_order >= 1.7 && max_order <= 2.3;
    double boundary = 0.0;
    if (check_u_boundary) {
        for (int k = 1; k <= 5; ++k) {
            boundary = std::max(boundary, std::abs(field.eval(p.rho() * k / 5, p.mu())));
        }
    } else {
        for (double y : ys) boundary = std::max(boundary, std::abs(field.eval(p.rho(), y)));
    }
    const bool ok = orders_ok && worst_res <= 1e-5 && boundary <= 1e-12;
    return {name, ok,
            fmt("order in [%.3f, %.3f], max residual %.3g, boundary %.3g", min_order, max_order,
                worst_res, boundary)};
}

struct SweepStats {
    double max_discrepancy = 0.0;
    int violations = 0;
    int failures = 0;
};

SweepStats sweep(const ModelParams& p, const GridSpec& grid, TimeKind kind, const VerifyOptions& opt) {
    EvalSettings settings;
    settings.kind = kind;
    settings.method = MethodChoice::Both;
    settings.integrator = opt.integrator;
    SweepStats stats;
    for (const GridRow& row : run_grid(p, grid, settings, opt.threads)) {
        if (!row.ok() || !row.value) {
            ++stats.failures;
            continue;
        }
        stats.max_discrepancy =
            std::max(stats.max_discrepancy, *row.err_estimate / std::max(1.0, *row.value));
        if ((row.lower && *row.value < *row.lower - 1e-9) ||
            (row.upper && *row.value > *row.upper + 1e-9)) {
            ++stats.violations;
        }
    }
    return stats;
}

CheckResult ordering(const VerifyOptions& opt) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> xs(0.0, 6.0), ys(1.0, 5.0);
    const int n = opt.quick ? 40 : 200;
    int violations = 0;
    for (int k = 0; k < n; ++k) {
        const double x = xs(rng), y = ys(rng);
        const double u = hitting_time_u(kRefU, x, y, opt.integrator).value;
        const double v = hitting_time_v(kRefU, x, y, opt.integrator).value;
        if (v > u + 1e-9) ++violations;
    }
    return {"v_le_u", violations == 0, fmt("%d violations at %d points", violations, n)};
}

CheckResult characteristic(const VerifyOptions& opt) {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> ux(0.2, 6.0), uy(1.2, 5.0), vx(1.2, 20.0), vy(0.5, 5.0);
    const std::array<double, 3> fractions{0.25, 0.5, 0.75};
    const int n = opt.quick ? 3 : 10;
    double worst_u = 0.0, worst_v = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = ux(rng), y = uy(rng);
        worst_u = std::max(worst_u, check_characteristic_identity(kRefU, TimeKind::U, x, y, fractions,
                                                                  opt.integrator));
        const double xv = vx(rng), yv = vy(rng);
        worst_v = std::max(worst_v, check_characteristic_identity(kRefV, TimeKind::V, xv, yv,
                                                                  fractions, opt.integrator));
    }
    return {"characteristic_identity", worst_u <= 1e-6 && worst_v <= 1e-6,
            fmt("max rel error u %.3g, v %.3g", worst_u, worst_v)};
}

CheckResult asymptotics(const VerifyOptions&) {
    auto ratio_u = [](double r) {
        return u_integral(kRefU, r / 2, r / 2).value / asymptotic_u(kRefU, r / 2, r / 2);
    };
    const double r3 = ratio_u(1e3), r6 = ratio_u(1e6);
    const double pv = v_integral(kRefV, 1e6, 1.0).value / asymptotic_v(kRefV, 1e6, 1.0);
    const bool ok = std::abs(r6 - 1.0) <= 0.1 && std::abs(r6 - 1.0) < std::abs(r3 - 1.0) &&
                    std::abs(pv - 1.0) <= 0.1;
    return {"asymptotic_ratios", ok,
            fmt("u ratio r=1e3 %.6f, r=1e6 %.6f; v product %.6f", r3, r6, pv)};
}

CheckResult log_inequalities(const VerifyOptions&) {
    int violations = 0;
    for (const ModelParams* p : {&kRefU, &kRefV}) {
        const double rho = p->rho();
        for (int k = 1; k <= 60; ++k) {
            const double x = rho * std::pow(10.0, 0.1 * k);
            const double slope = (std::log(x) - std::log(rho)) / (x - rho);
            if (!(1.0 / x <= slope && slope <= 1.0 / rho)) ++violations;
        }
    }
    return {"log_inequalities", violations == 0, fmt("%d violations", violations)};
}

CheckResult vanishing_v(const VerifyOptions&) {
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double total = 1e4 * std::pow(10.0, 0.1 * k);
        const double y = 0.5 + (total - 0.5) * k / 19.0;
        const double x = total - y;
        worst = std::max(worst, critical_time(kRefV, TimeKind::V, Route::Integral, x, y).value);
    }
    return {"vanishing_v", worst <= 0.05, fmt("max v %.3g", worst)};
}

CheckResult exact_x0(const VerifyOptions& opt) {
    double worst = 0.0;
    for (double f : {2.0, 10.0, 1e3}) {
        const double y = f * kRefU.mu();
        const double exact = exact_u_at_x0(kRefU, y);
        worst = std::max(worst, std::abs(hitting_time_u(kRefU, 0.0, y, opt.integrator).value - exact) / exact);
    }
    return {"exact_x0", worst <= 1e-9, fmt("max rel error %.3g", worst)};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opt) {
    std::vector<CheckResult> out;
    out.push_back(guarded("conservation", [&] { return conservation_and_mass(opt); }));
    out.push_back(guarded("boundary_conditions", [&] { return boundaries(opt); }));

    Field u = u_field(kRefU);
    if (opt.perturb_u != 0.0) {
        u.eval = [base = u.eval, d = opt.perturb_u](double x, double y) { return base(x, y) + d; };
    }
    out.push_back(guarded("pde_characterization_u", [&] {
        return pde_characterization("pde_characterization_u", u, kRefU, {1.0, 3.0, 5.0},
                                    {1.5, 2.75, 4.0}, true);
    }));
    out.push_back(guarded("pde_characterization_v", [&] {
        return pde_characterization("pde_characterization_v", v_field(kRefV), kRefV,
                                    {3.0, 8.0, 15.0}, {1.0, 2.5, 4.0}, false);
    }));

    for (TimeKind kind : {TimeKind::U, TimeKind::V}) {
        const std::string tag(to_string(kind));
        out.push_back(guarded("grid_" + tag, [&] {
            const SweepStats s = kind == TimeKind::U ? sweep(kRefU, u_reference_grid(opt.quick), kind, opt)
                                                     : sweep(kRefV, v_reference_grid(opt.quick), kind, opt);
            return CheckResult{"grid_" + tag,
                               s.failures == 0 && s.max_discrepancy <= 1e-6 && s.violations == 0,
                               fmt("ode/integral discrepancy %.3g, bound violations %d, failures %d",
                                   s.max_discrepancy, s.violations, s.failures)};
        }));
    }
    out.push_back(guarded("v_le_u", [&] { return ordering(opt); }));
    out.push_back(guarded("characteristic_identity", [&] { return characteristic(opt); }));
    out.push_back(guarded("asymptotic_ratios", [&] { return asymptotics(opt); }));
    out.push_back(guarded("log_inequalities", [&] { return log_inequalities(opt); }));
    out.push_back(guarded("vanishing_v", [&] { return vanishing_v(opt); }));
    out.push_back(guarded("exact_x0", [&] { return exact_x0(opt); }));
    return out;
}

}  // namespace sirtimes
