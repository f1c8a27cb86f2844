#include "sirtimes/model.hpp"

#include <cmath>
#include <string>

#include "sirtimes/errors.hpp"

namespace sirtimes {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be finite and > 0, got " +
                          std::to_string(value));
    }
}

}  // namespace

ModelParams::ModelParams(double beta, double gamma, double mu)
    : beta_(beta), gamma_(gamma), mu_(mu), rho_(0.0) {
    require_positive(beta, "beta");
    require_positive(gamma, "gamma");
    require_positive(mu, "mu");
    rho_ = gamma_ / beta_;
    if (!std::isfinite(rho_) || !(rho_ > 0.0)) {
        throw DomainError("gamma/beta is not a finite positive number");
    }
}

Derivative vector_field(const ModelParams& p, const SirState& state) {
    const double infection = p.beta() * state.s * state.i;
    return {-infection, infection - p.gamma() * state.i};
}

LevelSetValue psi(const ModelParams& p, double x, double y) {
    if (!(x > 0.0)) {
        throw DomainError("psi is undefined for x <= 0");
    }
    return {x + y - p.rho() * std::log(x)};
}

double exact_u_at_x0(const ModelParams& p, double y) {
    if (!(y >= p.mu())) {
        throw DomainError("exact_u_at_x0 requires y >= mu");
    }
    return std::log(y / p.mu()) / p.gamma();
}

}  // namespace sirtimes
