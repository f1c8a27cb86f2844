#include "sirtimes/ode.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "sirtimes/errors.hpp"
#include "sirtimes/roots.hpp"

namespace sirtimes {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::OdeEvent: return "OdeEvent";
        case Method::Integral: return "Integral";
        case Method::AsymptoticU: return "AsymptoticU";
        case Method::AsymptoticV: return "AsymptoticV";
        case Method::ExactX0: return "ExactX0";
        case Method::BoundaryZero: return "BoundaryZero";
    }
    return "?";
}

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::InfectedBelowMu: return "InfectedBelowMu";
        case EventKind::SusceptibleBelowRho: return "SusceptibleBelowRho";
    }
    return "?";
}

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0) || !(max_step > 0.0) || !(event_time_tol > 0.0)) {
        throw DomainError("rel_tol, max_step and event_time_tol must be positive, abs_tol non-negative");
    }
}

namespace {

// Weighted error term; a component that is identically zero has zero scale
// and zero error.
double scaled(double e, double scale) {
    if (scale > 0.0) return e / scale;
    return e == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

using Vec = std::array<double, 2>;

// Dormand-Prince 5(4) tableau with Hairer's dense output weights.
namespace dp {
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp

struct Step {
    double t0;
    double h;
    Vec y0;
    Vec y1;
    std::array<std::array<double, 5>, 2> coeffs;

    double eval(int component, double t) const {
        const auto& rc = coeffs[component];
        const double theta = (t - t0) / h;
        const double theta1 = 1.0 - theta;
        return rc[0] + theta * (rc[1] + theta1 * (rc[2] + theta * (rc[3] + theta1 * rc[4])));
    }
};

class Dopri5 {
public:
    Dopri5(const ModelParams& p, const IntegratorConfig& cfg, double x, double y)
        : p_(p), cfg_(cfg), y_{x, y} {
        k1_ = rhs(y_);
        h_ = initial_step();
    }

    double t() const { return t_; }

    // One accepted step ending no later than t_limit.
    Step advance(double t_limit) {
        constexpr int kMaxRejects = 200;
        for (int rejects = 0;; ++rejects) {
            double h = std::min({h_, cfg_.max_step, t_limit - t_});
            const double min_h = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_));
            if (h < min_h && t_limit - t_ > min_h) {
                throw IntegrationStall("step size underflow at t = " + std::to_string(t_), t_);
            }
            if (rejects > kMaxRejects) {
                throw IntegrationStall("too many rejected steps at t = " + std::to_string(t_), t_);
            }

            Vec k2, k3, k4, k5, k6, k7, y1, ystage;
            for (int c = 0; c < 2; ++c) ystage[c] = y_[c] + h * dp::a21 * k1_[c];
            k2 = rhs(ystage);
            for (int c = 0; c < 2; ++c) ystage[c] = y_[c] + h * (dp::a31 * k1_[c] + dp::a32 * k2[c]);
            k3 = rhs(ystage);
            for (int c = 0; c < 2; ++c)
                ystage[c] = y_[c] + h * (dp::a41 * k1_[c] + dp::a42 * k2[c] + dp::a43 * k3[c]);
            k4 = rhs(ystage);
            for (int c = 0; c < 2; ++c)
                ystage[c] = y_[c] + h * (dp::a51 * k1_[c] + dp::a52 * k2[c] + dp::a53 * k3[c] +
                                         dp::a54 * k4[c]);
            k5 = rhs(ystage);
            for (int c = 0; c < 2; ++c)
                ystage[c] = y_[c] + h * (dp::a61 * k1_[c] + dp::a62 * k2[c] + dp::a63 * k3[c] +
                                         dp::a64 * k4[c] + dp::a65 * k5[c]);
            k6 = rhs(ystage);
            for (int c = 0; c < 2; ++c)
                y1[c] = y_[c] + h * (dp::a71 * k1_[c] + dp::a73 * k3[c] + dp::a74 * k4[c] +
                                     dp::a75 * k5[c] + dp::a76 * k6[c]);
            k7 = rhs(y1);

            double err_sq = 0.0;
            for (int c = 0; c < 2; ++c) {
                const double e = h * (dp::e1 * k1_[c] + dp::e3 * k3[c] + dp::e4 * k4[c] +
                                      dp::e5 * k5[c] + dp::e6 * k6[c] + dp::e7 * k7[c]);
                const double scale =
                    cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[c]), std::abs(y1[c]));
                err_sq += scaled(e, scale) * scaled(e, scale);
            }
            const double err = std::sqrt(0.5 * err_sq);

            if (!std::isfinite(err) || err > 1.0) {
                const double shrink = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.1;
                h_ = h * shrink;
                continue;
            }

            Step step{t_, h, y_, y1, {}};
            for (int c = 0; c < 2; ++c) {
                auto& rc = step.coeffs[c];
                rc[0] = y_[c];
                rc[1] = y1[c] - y_[c];
                rc[2] = h * k1_[c] - rc[1];
                rc[3] = rc[1] - h * k7[c] - rc[2];
                rc[4] = h * (dp::d1 * k1_[c] + dp::d3 * k3[c] + dp::d4 * k4[c] + dp::d5 * k5[c] +
                             dp::d6 * k6[c] + dp::d7 * k7[c]);
            }

            const double grow = err == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0);
            const double next = h * (rejects > 0 ? std::min(grow, 1.0) : grow);
            const bool reaches_limit = h >= t_limit - t_;
            h_ = reaches_limit ? std::max(h_, next) : next;
            t_ = reaches_limit ? t_limit : t_ + h;
            step.h = t_ - step.t0;
            y_ = y1;
            k1_ = k7;
            return step;
        }
    }

private:
    Vec rhs(const Vec& y) const {
        const auto d = vector_field(p_, SirState{y[0], y[1], 0.0});
        return {d.ds_dt, d.di_dt};
    }

    double initial_step() const {
        double d0 = 0.0, d1 = 0.0;
        for (int c = 0; c < 2; ++c) {
            const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[c]);
            d0 += scaled(y_[c], sc) * scaled(y_[c], sc);
            d1 += scaled(k1_[c], sc) * scaled(k1_[c], sc);
        }
        d0 = std::sqrt(0.5 * d0);
        d1 = std::sqrt(0.5 * d1);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        Vec y1{y_[0] + h0 * k1_[0], y_[1] + h0 * k1_[1]};
        const Vec k = rhs(y1);
        double d2 = 0.0;
        for (int c = 0; c < 2; ++c) {
            const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[c]);
            d2 += scaled(k[c] - k1_[c], sc) * scaled(k[c] - k1_[c], sc);
        }
        d2 = std::sqrt(0.5 * d2) / h0;
        const double dmax = std::max(d1, d2);
        const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
        return std::min(100.0 * h0, h1);
    }

    const ModelParams& p_;
    const IntegratorConfig& cfg_;
    double t_ = 0.0;
    double h_ = 0.0;
    Vec y_;
    Vec k1_;
};

void require_initial(double x, double y) {
    if (!(x >= 0.0) || !(y >= 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
        throw DomainError("initial populations must be finite and >= 0");
    }
}

// Component index and level of an event function; crossings are downward.
struct EventSpec {
    EventKind kind;
    int component;
    double level;
};

struct RefinedEvent {
    double t;
    double bracket;
    SirState state;
};

std::optional<RefinedEvent> locate(const Step& step, const EventSpec& ev,
                                   const IntegratorConfig& cfg) {
    const double g0 = step.y0[ev.component] - ev.level;
    const double g1 = step.y1[ev.component] - ev.level;
    if (!(g0 > 0.0 && g1 <= 0.0)) return std::nullopt;
    const double t1 = step.t0 + step.h;
    auto g = [&](double t) { return step.eval(ev.component, t) - ev.level; };
    const auto root =
        find_bracketed_root(g, step.t0, t1, g0, g1, cfg.event_time_tol * std::abs(t1));
    return RefinedEvent{root.root, root.hi - root.lo,
                        SirState{step.eval(0, root.root), step.eval(1, root.root), root.root}};
}

CriticalTimeResult first_crossing(const ModelParams& p, double x, double y, const EventSpec& ev,
                                  double cap, const IntegratorConfig& cfg) {
    Dopri5 solver(p, cfg, x, y);
    while (solver.t() < cap) {
        const Step step = solver.advance(cap);
        if (auto hit = locate(step, ev, cfg)) {
            return {hit->t, Method::OdeEvent, hit->bracket + cfg.rel_tol * hit->t};
        }
    }
    throw TimeCapExceeded("no " + std::string(to_string(ev.kind)) +
                              " crossing before the a-priori cap t = " + std::to_string(cap),
                          cap);
}

}  // namespace

SirState Trajectory::state_at(double t) const {
    if (!(t >= 0.0) || t > t_end()) {
        throw DomainError("state_at: t outside [0, t_end]");
    }
    if (segments_.empty()) return samples_.front();
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double value, const DenseSegment& s) { return value < s.t0; });
    const DenseSegment& seg = *std::prev(it);
    const double theta = (t - seg.t0) / seg.h;
    const double theta1 = 1.0 - theta;
    std::array<double, 2> out{};
    for (int c = 0; c < 2; ++c) {
        const auto& rc = seg.coeffs[c];
        out[c] = rc[0] + theta * (rc[1] + theta1 * (rc[2] + theta * (rc[3] + theta1 * rc[4])));
    }
    return {out[0], out[1], t};
}

Trajectory integrate(const ModelParams& p, double x, double y, double t_end,
                     const IntegratorConfig& cfg) {
    cfg.validate();
    require_initial(x, y);
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw DomainError("integrate: t_end must be finite and >= 0");
    }
    Trajectory traj(p);
    traj.samples_.push_back({x, y, 0.0});
    const std::array<EventSpec, 2> specs = {
        EventSpec{EventKind::InfectedBelowMu, 1, p.mu()},
        EventSpec{EventKind::SusceptibleBelowRho, 0, p.rho()}};

    Dopri5 solver(p, cfg, x, y);
    while (solver.t() < t_end) {
        const Step step = solver.advance(t_end);
        traj.samples_.push_back({step.y1[0], step.y1[1], step.t0 + step.h});
        traj.segments_.push_back({step.t0, step.h, step.coeffs});
        std::vector<EventRecord> found;
        for (const auto& spec : specs) {
            if (auto hit = locate(step, spec, cfg)) found.push_back({spec.kind, hit->t, hit->state});
        }
        std::sort(found.begin(), found.end(),
                  [](const EventRecord& a, const EventRecord& b) { return a.t < b.t; });
        traj.events_.insert(traj.events_.end(), found.begin(), found.end());
    }
    return traj;
}

CriticalTimeResult hitting_time_u(const ModelParams& p, double x, double y,
                                  const IntegratorConfig& cfg) {
    cfg.validate();
    require_initial(x, y);
    // y == mu with x > rho is not a boundary point: I rises first and the
    // time is the continuous extension from y > mu.
    if (y < p.mu() || (y == p.mu() && x <= p.rho())) {
        return {0.0, Method::BoundaryZero, 0.0};
    }
    const double cap = (x + y) / (p.gamma() * p.mu()) * (1.0 + 1e-6);
    return first_crossing(p, x, y, {EventKind::InfectedBelowMu, 1, p.mu()}, cap, cfg);
}

CriticalTimeResult hitting_time_v(const ModelParams& p, double x, double y,
                                  const IntegratorConfig& cfg) {
    cfg.validate();
    require_initial(x, y);
    if (x <= p.rho()) return {0.0, Method::BoundaryZero, 0.0};
    if (y == 0.0) {
        throw NeverReached("v(x, 0) is infinite for x > gamma/beta: S never decreases");
    }
    const double cap = (std::log(x) - std::log(p.rho())) / (p.beta() * y) * (1.0 + 1e-6);
    return first_crossing(p, x, y, {EventKind::SusceptibleBelowRho, 0, p.rho()}, cap, cfg);
}

}  // namespace sirtimes
