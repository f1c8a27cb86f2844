#pragma once

#include <array>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "sirtimes/model.hpp"

namespace sirtimes {

struct IntegratorConfig {
    double rel_tol = 1e-10;
    // Zero gives pure relative control, which keeps small populations (and
    // hence rho ln S) accurate once S has collapsed.
    double abs_tol = 0.0;
    double max_step = std::numeric_limits<double>::infinity();
    // Relative width of the bracket around a refined event time.
    double event_time_tol = 1e-12;

    // Throws DomainError unless abs_tol >= 0 and the other fields are positive.
    void validate() const;
};

enum class EventKind { InfectedBelowMu, SusceptibleBelowRho };

struct EventRecord {
    EventKind kind;
    double t;
    SirState state;
};

enum class Method { OdeEvent, Integral, AsymptoticU, AsymptoticV, ExactX0, BoundaryZero };

std::string_view to_string(Method m);
std::string_view to_string(EventKind k);

struct CriticalTimeResult {
    double value;
    Method method;
    double err_estimate;
};

// Dense-output solution of the SIR system on [0, t_end].
class Trajectory {
public:
    const ModelParams& params() const noexcept { return params_; }
    const SirState& initial() const noexcept { return samples_.front(); }
    // Accepted step endpoints, strictly increasing in t.
    std::span<const SirState> samples() const noexcept { return samples_; }
    // Downward crossings of I = mu and S = rho, in time order.
    const std::vector<EventRecord>& events() const noexcept { return events_; }
    double t_end() const noexcept { return samples_.back().t; }

    // Continuous extension of the solution; t must lie in [0, t_end()].
    SirState state_at(double t) const;

private:
    friend Trajectory integrate(const ModelParams&, double, double, double,
                                const IntegratorConfig&);
    explicit Trajectory(const ModelParams& p) : params_(p) {}

    struct DenseSegment {
        double t0;
        double h;
        // Per component (S, I): Hairer's five continuous-output coefficients.
        std::array<std::array<double, 5>, 2> coeffs;
    };

    ModelParams params_;
    std::vector<SirState> samples_;
    std::vector<DenseSegment> segments_;
    std::vector<EventRecord> events_;
};

// Adaptive Dormand-Prince 5(4) integration from S(0) = x, I(0) = y.
// Throws IntegrationStall if the step size underflows.
Trajectory integrate(const ModelParams& p, double x, double y, double t_end,
                     const IntegratorConfig& cfg = {});

// First time I(t) <= mu, by event location on the dense output.
CriticalTimeResult hitting_time_u(const ModelParams& p, double x, double y,
                                  const IntegratorConfig& cfg = {});

// First time S(t) <= gamma/beta. Throws NeverReached when y = 0 < x - rho.
CriticalTimeResult hitting_time_v(const ModelParams& p, double x, double y,
                                  const IntegratorConfig& cfg = {});

}  // namespace sirtimes
