#pragma once

#include <functional>
#include <optional>
#include <span>

#include "sirtimes/critical_time.hpp"

namespace sirtimes {

// Open set on which a critical-time field is smooth:
// U on (0, inf) x (mu, inf), V on (rho, inf) x (0, inf).
enum class FieldDomain { U, V };

struct Field {
    std::function<double(double, double)> eval;
    FieldDomain domain;
};

Field u_field(const ModelParams& p, const QuadratureOptions& quad = {});
Field v_field(const ModelParams& p, const QuadratureOptions& quad = {});

struct ResidualReport {
    double x;
    double y;
    double h;
    // beta x y D_x + (gamma - beta x) y D_y - 1 with central differences at
    // steps h, h/2 and h/4.
    double residual;
    double residual_half;
    double residual_quarter;
    // log2(|r(h) - r*| / |r(h/2) - r*|), r* Richardson-extrapolated from the
    // two finest steps; absent when either difference is below the noise floor.
    std::optional<double> order_estimate;
};

inline constexpr double kResidualNoiseFloor = 1e-11;

double default_fd_step(double x, double y);

// Throws StencilOutOfDomain if any stencil point leaves the field's open domain.
ResidualReport pde_residual(const Field& field, const ModelParams& p, double x, double y,
                            double h);

// max |u(x, mu)| over n_points equispaced x in [0, rho], by the ODE route.
double check_boundary_u(const ModelParams& p, int n_points, const IntegratorConfig& cfg = {});

// max |v(rho, y)| over the given y values, by the ODE route.
double check_boundary_v(const ModelParams& p, std::span<const double> y_values,
                        const IntegratorConfig& cfg = {});

// Along the ODE flow, the remaining time decreases at unit rate:
// T(S(t), I(t)) = T(x, y) - t for t = f T(x, y), with T recomputed by the
// integral route. Returns max |T(S, I) - (T(x, y) - t)| / max(1, T(x, y)).
double check_characteristic_identity(const ModelParams& p, TimeKind kind, double x, double y,
                                     std::span<const double> fractions,
                                     const IntegratorConfig& cfg = {},
                                     const QuadratureOptions& quad = {});

}  // namespace sirtimes
