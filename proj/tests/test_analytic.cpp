#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "sirtimes/analytic.hpp"
#include "sirtimes/errors.hpp"

using namespace sirtimes;
using doctest::Approx;

namespace {

const ModelParams kRefU(2.0, 3.0, 1.0);
const ModelParams kRefV(3.0, 3.0, 1.0);

// Plain bisection for psi(a, mu) = psi(x, y) on (0, rho], where the left
// side is strictly decreasing in a.
double bisect_anchor(const ModelParams& p, double x, double y) {
    const double target = x + y - p.rho() * std::log(x);
    auto phi = [&](double z) { return z + p.mu() - p.rho() * std::log(z) - target; };
    double lo = 1e-300, hi = p.rho();
    for (int k = 0; k < 2000 && hi - lo > 1e-15 * hi; ++k) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Same in L = ln a for anchors below the double range.
double bisect_log_anchor(const ModelParams& p, double x, double y) {
    const double target = x + y - p.rho() * std::log(x);
    auto phi = [&](double l) { return std::exp(l) + p.mu() - p.rho() * l - target; };
    double lo = -1e7, hi = std::log(p.rho());
    for (int k = 0; k < 400; ++k) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("solve_anchor") {
    SUBCASE("boundary point is its own anchor") {
        const auto a = solve_anchor(kRefU, 1.2, 1.0);
        CHECK(a.a == 1.2);
        CHECK(a.residual == 0.0);
    }
    SUBCASE("interior point against bisection") {
        const auto a = solve_anchor(kRefU, 1.5, 2.0);
        CHECK(a.a < 1.5);
        CHECK(a.a == Approx(bisect_anchor(kRefU, 1.5, 2.0)).epsilon(1e-13));
        CHECK(a.residual <= 1e-12 * std::max(1.0, psi(kRefU, 1.5, 2.0).value));
    }
    SUBCASE("astronomically small anchor") {
        const double psi_xy = psi(kRefU, 100.0, 100.0).value;
        const auto a = solve_anchor(kRefU, 100.0, 100.0);
        CHECK(a.a > 0.0);
        CHECK(a.log_a == Approx(bisect_log_anchor(kRefU, 100.0, 100.0)).epsilon(1e-13));
        CHECK(a.log_a / (-kRefU.beta() * psi_xy / kRefU.gamma()) == Approx(1.0).epsilon(0.01));
        CHECK(a.residual <= 1e-12 * psi_xy);
    }
    SUBCASE("anchor below the double range") {
        const auto a = solve_anchor(kRefU, 5e5, 5e5);
        CHECK(a.a == 0.0);
        CHECK(a.log_a == Approx(bisect_log_anchor(kRefU, 5e5, 5e5)).epsilon(1e-12));
        CHECK(a.residual <= 1e-12 * psi(kRefU, 5e5, 5e5).value);
    }
    SUBCASE("anchor lies left of x off the boundary") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> xs(0.01, 10.0), ys(1.0, 10.0);
        for (int k = 0; k < 100; ++k) {
            const double x = xs(rng), y = ys(rng);
            const auto a = solve_anchor(kRefU, x, y);
            CHECK(a.a > 0.0);
            CHECK(a.a <= kRefU.rho());
            CHECK(a.a < x);
            CHECK(a.residual <= 1e-12 * std::max(1.0, std::abs(psi(kRefU, x, y).value)));
        }
    }
    CHECK_THROWS_AS(solve_anchor(kRefU, 0.0, 2.0), DomainError);
    CHECK_THROWS_AS(solve_anchor(kRefU, 1.0, 0.5), DomainError);
}

TEST_CASE("u_integral") {
    const auto zero = u_integral(kRefU, 1.0, 1.0);
    CHECK(zero.value == 0.0);
    CHECK(zero.method == Method::BoundaryZero);
    CHECK(u_integral(kRefU, kRefU.rho(), 1.0).value == 0.0);

    const auto r = u_integral(kRefU, 4.0, 2.0);
    CHECK(r.method == Method::Integral);
    CHECK(r.value == Approx(hitting_time_u(kRefU, 4.0, 2.0).value).epsilon(1e-6));
    CHECK(r.err_estimate <= 1e-12);

    // Tends to the x = 0 closed form.
    CHECK(u_integral(kRefU, 1e-12, 5.0).value ==
          Approx(exact_u_at_x0(kRefU, 5.0)).epsilon(1e-9));
    CHECK_THROWS_AS(u_integral(kRefU, 0.0, 2.0), DomainError);
    CHECK_THROWS_AS(u_integral(kRefU, 2.0, 0.5), DomainError);
}

TEST_CASE("v_integral") {
    CHECK(v_integral(kRefV, 1.0, 2.0).value == 0.0);
    CHECK(v_integral(kRefV, 5.0, 1.0).value ==
          Approx(hitting_time_v(kRefV, 5.0, 1.0).value).epsilon(1e-6));
    CHECK_THROWS_AS(v_integral(kRefV, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(v_integral(kRefV, 5.0, 0.0), DomainError);
}

TEST_CASE("integral and ODE routes agree over both reference domains") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.05, 6.0), uy(1.0, 5.0), vx(1.0, 20.0), vy(0.5, 5.0);
    for (int k = 0; k < 40; ++k) {
        const double x = ux(rng), y = uy(rng);
        const double ode = hitting_time_u(kRefU, x, y).value;
        CHECK(std::abs(u_integral(kRefU, x, y).value - ode) <= 1e-6 * std::max(1.0, ode));
        const double xv = vx(rng), yv = vy(rng);
        const double odev = hitting_time_v(kRefV, xv, yv).value;
        CHECK(std::abs(v_integral(kRefV, xv, yv).value - odev) <= 1e-6 * std::max(1.0, odev));
    }
}

TEST_CASE("integral and ODE routes agree for large populations") {
    // The anchor sits tens of thousands of units below ln x in L, while the
    // descent from the peak of g occupies an O(1) window near the top.
    for (double r : {3e4, 1e5, 1e6}) {
        CAPTURE(r);
        CHECK(u_integral(kRefU, r / 2, r / 2).value ==
              Approx(hitting_time_u(kRefU, r / 2, r / 2).value).epsilon(1e-9));
        CHECK(v_integral(kRefV, r, 1.0).value ==
              Approx(hitting_time_v(kRefV, r, 1.0).value).epsilon(1e-9));
    }
}

TEST_CASE("integrand stays above mu at quadrature nodes") {
    for (auto [x, y] : std::vector<std::pair<double, double>>{{4.0, 2.0}, {0.3, 4.0}, {6.0, 1.01}}) {
        const auto anchor = solve_anchor(kRefU, x, y);
        const LevelCurve curve(kRefU, x, y);
        int nodes = 0, below = 0;
        auto observed = [&](double l) {
            const double g = curve.height_log(l);
            ++nodes;
            if (!(g > kRefU.mu())) ++below;
            return 1.0 / (kRefU.beta() * g);
        };
        integrate_adaptive(observed, anchor.log_a, std::log(x));
        CHECK(nodes > 0);
        CHECK(below == 0);
    }
}

TEST_CASE("chord and tangent sandwich the level curve") {
    for (auto [x, y] : std::vector<std::pair<double, double>>{{5.0, 1.0}, {20.0, 0.5}, {1.2, 3.0}}) {
        const LevelCurve curve(kRefV, x, y);
        const double rho = kRefV.rho();
        for (int k = 0; k <= 50; ++k) {
            const double z = rho + (x - rho) * k / 50.0;
            CHECK(curve.chord(z) <= curve.height(z) + 1e-12);
            CHECK(curve.height(z) <= curve.tangent(z) + 1e-12);
        }
        CHECK(curve.height(x) == Approx(y).epsilon(1e-14));
    }
}

TEST_CASE("log-slope inequalities") {
    for (const ModelParams* p : {&kRefU, &kRefV}) {
        const double rho = p->rho();
        for (int k = 1; k <= 80; ++k) {
            const double x = rho * std::pow(10.0, 0.1 * k);
            const double slope = (std::log(x) - std::log(rho)) / (x - rho);
            CHECK(1.0 / x <= slope);
            CHECK(slope <= p->beta() / p->gamma());
        }
    }
}

TEST_CASE("bounds_u") {
    SUBCASE("x = 0 attains the subcritical upper bound") {
        const auto b = bounds_u(kRefU, 0.0, std::exp(3.0));
        CHECK(b.lower == Approx(1.0 - std::log(2.5) / 3.0).epsilon(1e-14));
        CHECK(b.lower == Approx(0.6945697560).epsilon(1e-9));
        REQUIRE(b.subcritical_upper);
        CHECK(*b.subcritical_upper == Approx(1.0).epsilon(1e-15));
        CHECK(exact_u_at_x0(kRefU, std::exp(3.0)) == Approx(*b.subcritical_upper).epsilon(1e-15));
    }
    SUBCASE("crude upper") {
        const auto b = bounds_u(kRefU, 3.0, 2.0);
        CHECK(b.crude_upper == Approx(5.0 / 3.0).epsilon(1e-15));
        CHECK_FALSE(b.subcritical_upper);
    }
    SUBCASE("lower bound clamps at the corner") {
        CHECK(bounds_u(kRefU, 1.5, 1.0).lower == 0.0);
        CHECK(bounds_u(kRefU, 0.2, 1.0).lower == 0.0);
    }
    SUBCASE("sandwich on random points") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> xs(0.0, 6.0), ys(1.0, 5.0);
        for (int k = 0; k < 50; ++k) {
            const double x = xs(rng), y = ys(rng);
            const auto b = bounds_u(kRefU, x, y);
            const double u = x == 0.0 ? exact_u_at_x0(kRefU, y) : u_integral(kRefU, x, y).value;
            CHECK(b.lower <= u + 1e-9);
            CHECK(u <= b.tightest_upper() + 1e-9);
        }
    }
    CHECK_THROWS_AS(bounds_u(kRefU, 1.0, 0.5), DomainError);
}

TEST_CASE("bounds_v") {
    SUBCASE("sandwich against quadrature") {
        for (auto [x, y] : std::vector<std::pair<double, double>>{{5.0, 1.0}, {20.0, 0.5}, {1.01, 5.0}}) {
            const auto b = bounds_v(kRefV, x, y);
            const double v = v_integral(kRefV, x, y).value;
            CHECK(b.lower <= v + 1e-9);
            CHECK(v <= b.upper + 1e-9);
            CHECK(v <= b.crude_upper + 1e-9);
        }
    }
    SUBCASE("all bounds vanish as x approaches rho") {
        const auto b = bounds_v(kRefV, 1.0 + 1e-7, 1.0);
        CHECK(std::abs(b.lower) < 1e-6);
        CHECK(std::abs(b.upper) < 1e-6);
        CHECK(std::abs(b.crude_upper) < 1e-6);
    }
    CHECK_THROWS_AS(bounds_v(kRefV, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(bounds_v(kRefV, 2.0, 0.0), DomainError);
}

TEST_CASE("asymptotic_u") {
    for (double y : {1.0, 3.0, 250.0}) {
        CHECK(exact_u_at_x0(kRefU, y) == asymptotic_u(kRefU, 0.0, y));
    }
    const double u = u_integral(kRefU, 5e5, 5e5).value;
    CHECK(std::abs(u / asymptotic_u(kRefU, 5e5, 5e5) - 1.0) <= 0.1);

    double prev = INFINITY;
    for (double r : {1e3, 1e4, 1e5, 1e6}) {
        const double dist = std::abs(u_integral(kRefU, r / 2, r / 2).value / asymptotic_u(kRefU, r / 2, r / 2) - 1.0);
        CHECK(dist <= prev);
        prev = dist;
    }
}

TEST_CASE("asymptotic_v") {
    const double large_x = v_integral(kRefV, 1e6, 1.0).value;
    CHECK(std::abs(large_x / asymptotic_v(kRefV, 1e6, 1.0) - 1.0) <= 0.1);

    const double large_y = v_integral(kRefV, 2.0, 1e6).value;
    CHECK(large_y < 1e-6);
    CHECK(std::abs(large_y / asymptotic_v(kRefV, 2.0, 1e6) - 1.0) <= 0.1);

    // First-order expansion of the logarithm just above rho.
    const double dx = 1e-5, y = 2.0, rho = kRefV.rho();
    const double approx = dx * (1.0 / rho + 1.0 / y) / (kRefV.beta() * (dx + y));
    CHECK(asymptotic_v(kRefV, rho + dx, y) == Approx(approx).epsilon(1e-4));
    CHECK_THROWS_AS(asymptotic_v(kRefV, 1.0, 1.0), DomainError);
}

TEST_CASE("v vanishes for large populations with y bounded below") {
    for (int k = 0; k < 20; ++k) {
        const double total = 1e4 * std::pow(10.0, 0.15 * k);
        const double y = 0.5 + (total - 0.5) * (k % 5) / 4.0;
        const double x = total - y;
        const double v = x <= kRefV.rho() ? 0.0 : v_integral(kRefV, x, y).value;
        CHECK(v <= 0.05);
    }
}
