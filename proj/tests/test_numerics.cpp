#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sirtimes/errors.hpp"
#include "sirtimes/quadrature.hpp"
#include "sirtimes/roots.hpp"

using namespace sirtimes;
using doctest::Approx;

TEST_CASE("bracketed root converges to adjacent doubles") {
    auto f = [](double x) { return std::cos(x) - x; };
    const auto r = find_bracketed_root(f, 0.0, 1.0, f(0.0), f(1.0), 0.0);
    CHECK(r.root == Approx(0.7390851332151607).epsilon(1e-15));
    CHECK(r.hi - r.lo <= 2e-16);
    CHECK(r.iterations < 100);
}

TEST_CASE("bracketed root handles flat-sided functions") {
    // Regula falsi alone stalls on this; the bisection fallback must kick in.
    auto f = [](double x) { return std::pow(x, 9) - 1e-3; };
    const auto r = find_bracketed_root(f, 0.0, 4.0, f(0.0), f(4.0), 1e-14);
    CHECK(r.root == Approx(std::pow(1e-3, 1.0 / 9)).epsilon(1e-13));
    CHECK(r.iterations < 150);
}

TEST_CASE("bracketed root rejects a non-bracket") {
    auto f = [](double x) { return x * x + 1.0; };
    CHECK_THROWS_AS(find_bracketed_root(f, -1.0, 1.0, f(-1.0), f(1.0), 1e-12), DomainError);
}

TEST_CASE("adaptive quadrature on known integrals") {
    SUBCASE("polynomial is exact") {
        const auto q = integrate_adaptive([](double x) { return x * x * x - 2.0 * x; }, -1.0, 2.0);
        CHECK(q.value == Approx(0.75).epsilon(1e-15));
        CHECK(q.intervals == 1);
    }
    SUBCASE("peaked integrand") {
        // arctan(100 (x - 0.3)) / 100 antiderivative
        auto f = [](double x) { return 1.0 / (1.0 + 1e4 * (x - 0.3) * (x - 0.3)); };
        const double exact = (std::atan(100.0 * 0.7) + std::atan(100.0 * 0.3)) / 100.0;
        const auto q = integrate_adaptive(f, 0.0, 1.0);
        CHECK(q.value == Approx(exact).epsilon(1e-13));
        CHECK(q.error <= 1e-12);
    }
    SUBCASE("reversed limits flip the sign") {
        const auto q = integrate_adaptive([](double x) { return std::exp(x); }, 1.0, 0.0);
        CHECK(q.value == Approx(1.0 - std::numbers::e).epsilon(1e-14));
    }
    SUBCASE("empty interval") {
        CHECK(integrate_adaptive([](double) { return 1.0; }, 2.0, 2.0).value == 0.0);
    }
}

TEST_CASE("adaptive quadrature reports non-convergence") {
    QuadratureOptions opt;
    opt.max_intervals = 8;
    auto f = [](double x) { return std::sin(1.0 / x); };
    try {
        integrate_adaptive(f, 1e-3, 1.0, opt);
        FAIL("expected QuadratureFailure");
    } catch (const QuadratureFailure& e) {
        CHECK(std::isfinite(e.estimate));
        CHECK(e.error_bound > 0.0);
    }
}

TEST_CASE("breakpoints expose narrow features on long intervals") {
    // Unit-mass bump of width 1e-3 near the right end of [-1e4, 1].
    auto bump = [](double t) {
        const double s = (t - 0.5) / 1e-3;
        return std::exp(-0.5 * s * s) / (1e-3 * std::sqrt(2.0 * M_PI));
    };
    const std::vector<double> pts{-1e4, 0.0, 0.49, 0.51, 1.0};
    const auto r = integrate_adaptive(bump, std::span<const double>(pts));
    CHECK(r.value == Approx(1.0).epsilon(1e-10));

    const std::vector<double> unsorted{0.0, 2.0, 1.0};
    CHECK_THROWS_AS(integrate_adaptive(bump, std::span<const double>(unsorted)), DomainError);
    const std::vector<double> repeated{1.0, 1.0};
    CHECK(integrate_adaptive(bump, std::span<const double>(repeated)).value == 0.0);
}
