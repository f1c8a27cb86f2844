#pragma once

namespace sirtimes {

// Transmission rate beta, recovery rate gamma and infected threshold mu.
// Validated on construction; immutable afterwards.
class ModelParams {
public:
    ModelParams(double beta, double gamma, double mu = 1.0);

    double beta() const noexcept { return beta_; }
    double gamma() const noexcept { return gamma_; }
    double mu() const noexcept { return mu_; }
    // Critical susceptible level gamma/beta: I decreases exactly when S <= rho.
    double rho() const noexcept { return rho_; }

private:
    double beta_;
    double gamma_;
    double mu_;
    double rho_;
};

// Point in (S, I) population space at time t. R = N - S - I is never stored.
struct SirState {
    double s = 0.0;
    double i = 0.0;
    double t = 0.0;
};

struct Derivative {
    double ds_dt;
    double di_dt;
};

// Constant of motion along a trajectory.
struct LevelSetValue {
    double value;
};

Derivative vector_field(const ModelParams& p, const SirState& state);

// psi(x, y) = x + y - rho ln x. Throws DomainError for x <= 0.
LevelSetValue psi(const ModelParams& p, double x, double y);

// u(0, y) = ln(y / mu) / gamma, since I(t) = y exp(-gamma t) when S = 0.
double exact_u_at_x0(const ModelParams& p, double y);

}  // namespace sirtimes
