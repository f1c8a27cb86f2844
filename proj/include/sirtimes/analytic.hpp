#pragma once

#include <optional>

#include "sirtimes/model.hpp"
#include "sirtimes/ode.hpp"
#include "sirtimes/quadrature.hpp"

namespace sirtimes {

// Infected count as a function of the susceptible count z along the
// trajectory through (x, y): g(z) = rho ln z - z + psi(x, y).
class LevelCurve {
public:
    LevelCurve(const ModelParams& p, double x, double y);

    // Evaluated as y + (x - z) + rho ln(z / x), which equals the form above
    // but keeps precision when psi(x, y) is large.
    double height(double z) const;
    // Same function of L = ln z; valid when exp(L) underflows.
    double height_log(double log_z) const;

    // Secant through (rho, g(rho)) and (x, y); g >= chord on [rho, x] by concavity.
    double chord(double z) const;
    // Tangent at z = x; g <= tangent everywhere.
    double tangent(double z) const;

private:
    double rho_;
    double x_;
    double y_;
    double log_x_;
};

struct AnchorResult {
    double a;      // 0 when the root underflows; log_a stays exact
    double log_a;
    double residual;  // |psi(a, mu) - psi(x, y)|
};

// Unique a in (0, rho] with psi(a, mu) = psi(x, y), found in L = ln a.
AnchorResult solve_anchor(const ModelParams& p, double x, double y);

// u(x, y) as the integral of dz / (beta z g(z)) over [a(x, y), x].
CriticalTimeResult u_integral(const ModelParams& p, double x, double y,
                              const QuadratureOptions& opt = {});

// v(x, y) as the same integral over [rho, x].
CriticalTimeResult v_integral(const ModelParams& p, double x, double y,
                              const QuadratureOptions& opt = {});

struct BoundsU {
    double lower;
    double crude_upper;
    std::optional<double> subcritical_upper;  // present iff beta x < gamma

    double tightest_upper() const;
};

struct BoundsV {
    double lower;
    double upper;
    double crude_upper;

    double tightest_upper() const;
};

BoundsU bounds_u(const ModelParams& p, double x, double y);

// Closed forms from the chord and tangent of g, plus the crude
// (ln x - ln rho) / (beta y) bound. Throws DomainError when a logarithm
// argument or the chord-bound denominator degenerates.
BoundsV bounds_v(const ModelParams& p, double x, double y);

// ln((x + y) / mu) / gamma.
double asymptotic_u(const ModelParams& p, double x, double y);

// ln[(x / rho)((x - rho) / y + 1)] / (beta (x - rho + y)).
double asymptotic_v(const ModelParams& p, double x, double y);

}  // namespace sirtimes
