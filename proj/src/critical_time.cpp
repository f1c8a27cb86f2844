#include "sirtimes/critical_time.hpp"

#include "sirtimes/errors.hpp"

namespace sirtimes {

std::string_view to_string(TimeKind k) { return k == TimeKind::U ? "u" : "v"; }
std::string_view to_string(Route r) { return r == Route::Ode ? "ode" : "integral"; }

CriticalTimeResult critical_time(const ModelParams& p, TimeKind kind, Route route, double x,
                                 double y, const IntegratorConfig& cfg,
                                 const QuadratureOptions& quad) {
    if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("initial populations must be >= 0");
    if (kind == TimeKind::U) {
        if (route == Route::Ode) return hitting_time_u(p, x, y, cfg);
        if (y < p.mu() || (y == p.mu() && x <= p.rho())) return {0.0, Method::BoundaryZero, 0.0};
        if (x == 0.0) return {exact_u_at_x0(p, y), Method::ExactX0, 0.0};
        return u_integral(p, x, y, quad);
    }
    if (route == Route::Ode) return hitting_time_v(p, x, y, cfg);
    if (x <= p.rho()) return {0.0, Method::BoundaryZero, 0.0};
    if (y == 0.0) throw NeverReached("v(x, 0) is infinite for x > gamma/beta");
    return v_integral(p, x, y, quad);
}

}  // namespace sirtimes
