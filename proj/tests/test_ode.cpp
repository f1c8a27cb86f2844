#include <doctest.h>

#include <cmath>
#include <random>

#include "sirtimes/analytic.hpp"
#include "sirtimes/errors.hpp"
#include "sirtimes/ode.hpp"

using namespace sirtimes;
using doctest::Approx;

namespace {
const ModelParams kRefU(2.0, 3.0, 1.0);
const ModelParams kRefV(3.0, 3.0, 1.0);
}  // namespace

TEST_CASE("integrate: pure decay when S = 0") {
    const ModelParams p(2.0, 3.0);
    const Trajectory traj = integrate(p, 0.0, 5.0, 4.0);
    CHECK(traj.samples().size() > 2);
    for (const SirState& s : traj.samples()) {
        CHECK(s.s == 0.0);
        CHECK(s.i == Approx(5.0 * std::exp(-3.0 * s.t)).epsilon(1e-8));
    }
    // Dense output between samples.
    for (double t : {0.013, 0.77, 2.5, 3.999}) {
        CHECK(traj.state_at(t).i == Approx(5.0 * std::exp(-3.0 * t)).epsilon(1e-8));
    }
}

TEST_CASE("integrate: samples increase, psi conserved, mass decreases") {
    const Trajectory traj = integrate(kRefU, 4.0, 1.0, 10.0);
    const double psi0 = psi(kRefU, 4.0, 1.0).value;
    double prev_t = -1.0;
    for (const SirState& s : traj.samples()) {
        CHECK(s.t > prev_t);
        prev_t = s.t;
        CHECK(psi(kRefU, s.s, s.i).value == Approx(psi0).epsilon(1e-8));
    }
    CHECK(traj.t_end() == 10.0);

    const Trajectory t2 = integrate(kRefU, 3.0, 2.0, 10.0);
    const SirState end = t2.samples().back();
    CHECK(end.s + end.i < 5.0);
}

TEST_CASE("integrate: events satisfy their defining equality") {
    const Trajectory traj = integrate(kRefU, 4.0, 2.0, 5.0);
    REQUIRE(traj.events().size() == 2);
    CHECK(traj.events()[0].kind == EventKind::SusceptibleBelowRho);
    CHECK(traj.events()[1].kind == EventKind::InfectedBelowMu);
    CHECK(std::abs(traj.events()[0].state.s - kRefU.rho()) <= 1e-9 * 6.0);
    CHECK(std::abs(traj.events()[1].state.i - kRefU.mu()) <= 1e-9 * 6.0);
    CHECK(traj.events()[0].t == Approx(hitting_time_v(kRefU, 4.0, 2.0).value).epsilon(1e-12));
    CHECK(traj.events()[1].t == Approx(hitting_time_u(kRefU, 4.0, 2.0).value).epsilon(1e-12));
}

TEST_CASE("integrate: argument validation") {
    CHECK_THROWS_AS(integrate(kRefU, -1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(integrate(kRefU, 1.0, 1.0, -1.0), DomainError);
    IntegratorConfig bad;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate(kRefU, 1.0, 1.0, 1.0, bad), DomainError);
    const Trajectory empty = integrate(kRefU, 1.0, 1.0, 0.0);
    CHECK(empty.samples().size() == 1);
    CHECK(empty.state_at(0.0).i == 1.0);
    CHECK_THROWS_AS(empty.state_at(0.5), DomainError);
}

TEST_CASE("integrate: step-size underflow signals IntegrationStall") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-300;
    cfg.abs_tol = 0.0;
    try {
        integrate(kRefU, 4.0, 2.0, 1.0, cfg);
        FAIL("expected IntegrationStall");
    } catch (const IntegrationStall& e) {
        CHECK(e.reached_time >= 0.0);
        CHECK(e.reached_time < 1.0);
    }
}

TEST_CASE("hitting_time_u") {
    const auto boundary = hitting_time_u(kRefU, 1.2, 1.0);
    CHECK(boundary.value == 0.0);
    CHECK(boundary.method == Method::BoundaryZero);
    CHECK(hitting_time_u(kRefU, 3.0, 0.5).value == 0.0);

    const auto x0 = hitting_time_u(kRefU, 0.0, std::exp(3.0));
    CHECK(x0.value == Approx(1.0).epsilon(1e-9));
    CHECK(x0.method == Method::OdeEvent);

    const auto r = hitting_time_u(kRefU, 4.0, 2.0);
    CHECK(r.value == Approx(u_integral(kRefU, 4.0, 2.0).value).epsilon(1e-6));
    CHECK(r.err_estimate >= 0.0);
    CHECK(r.err_estimate < 1e-8);
}

TEST_CASE("hitting_time_u at y = mu above the critical level is the continuous extension") {
    // I rises first, so the time is the limit from y > mu, not zero.
    const double at = hitting_time_u(kRefU, 4.0, 1.0).value;
    const double near = hitting_time_u(kRefU, 4.0, 1.0 + 1e-9).value;
    CHECK(at > 0.5);
    CHECK(at == Approx(near).epsilon(1e-7));
    CHECK(at == Approx(u_integral(kRefU, 4.0, 1.0).value).epsilon(1e-8));
}

TEST_CASE("hitting_time_v") {
    CHECK(hitting_time_v(kRefV, 1.0, 2.0).value == 0.0);
    CHECK(hitting_time_v(kRefV, 1.0, 2.0).method == Method::BoundaryZero);
    CHECK(hitting_time_v(kRefV, 0.5, 0.1).value == 0.0);
    CHECK(hitting_time_v(kRefV, 5.0, 1.0).value ==
          Approx(v_integral(kRefV, 5.0, 1.0).value).epsilon(1e-6));
    CHECK_THROWS_AS(hitting_time_v(kRefV, 5.0, 0.0), NeverReached);
    CHECK(hitting_time_v(kRefV, 0.5, 0.0).value == 0.0);
}

TEST_CASE("max_step bounds the steps without changing the result") {
    IntegratorConfig cfg;
    cfg.max_step = 1e-3;
    CHECK(hitting_time_u(kRefU, 4.0, 2.0, cfg).value ==
          Approx(hitting_time_u(kRefU, 4.0, 2.0).value).epsilon(1e-9));
}

TEST_CASE("properties over random initial data") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> xs(0.0, 8.0), ys(1.0, 6.0);
    for (int k = 0; k < 60; ++k) {
        const double x = xs(rng), y = ys(rng);
        CAPTURE(x);
        CAPTURE(y);
        const double u = hitting_time_u(kRefU, x, y).value;
        const double v = hitting_time_v(kRefU, x, y).value;
        CHECK(v <= u + 1e-9);
        CHECK(u >= 0.0);
        CHECK(u <= (x + y) / (kRefU.gamma() * kRefU.mu()));
        if (x > kRefU.rho()) {
            CHECK(v <= (std::log(x) - std::log(kRefU.rho())) / (kRefU.beta() * y));
            // I increases up to v, then decreases.
            const Trajectory traj = integrate(kRefU, x, y, u);
            CHECK(traj.state_at(v).i >= y);
            double prev = traj.state_at(v).i;
            for (int j = 1; j <= 20; ++j) {
                const double i = traj.state_at(j == 20 ? u : v + (u - v) * j / 20).i;
                CHECK(i <= prev + 1e-12);
                prev = i;
            }
            CHECK(std::abs(traj.state_at(v).s - kRefU.rho()) <= 1e-9 * (x + y));
        }
        const Trajectory at_u = integrate(kRefU, x, y, u);
        CHECK(std::abs(at_u.state_at(u).i - kRefU.mu()) <= 1e-9 * (x + y));
    }
}

TEST_CASE("u depends smoothly on the initial data") {
    const double base = hitting_time_u(kRefU, 3.0, 2.0).value;
    const double d1 = std::abs(hitting_time_u(kRefU, 3.0 + 1e-3, 2.0).value - base);
    const double d2 = std::abs(hitting_time_u(kRefU, 3.0 + 5e-4, 2.0).value - base);
    CHECK(d1 > 0.0);
    CHECK(d1 / d2 == Approx(2.0).epsilon(0.05));
}
