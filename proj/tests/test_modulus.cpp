#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "ellab/modulus.hpp"

using namespace ellab;

TEST_CASE("pointwise evaluation of the built-in families") {
    CHECK(Modulus::power(1.0).eval(0.25) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(Modulus::power(0.5).eval(0.09) == doctest::Approx(0.3).epsilon(1e-12));

    // closed form 1/ln^2 r at r = 1/4
    const double expect = 1.0 / std::pow(std::log(0.25), 2);
    CHECK(expect == doctest::Approx(0.5203424).epsilon(1e-6));
    CHECK(Modulus::inv_log_sq().eval(0.25) == doctest::Approx(expect).epsilon(1e-13));

    CHECK(Modulus::inv_log().eval(0.25) ==
          doctest::Approx(1.0 / std::abs(std::log(0.25))).epsilon(1e-13));

    const auto mx = Modulus::max_of({Modulus::power(1.0), Modulus::inv_log_sq()});
    CHECK(mx.eval(0.25) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(mx.radius() == doctest::Approx(0.5));

    CHECK(Modulus::scaled(Modulus::power(1.0), 3.0).eval(0.1) ==
          doctest::Approx(0.3).epsilon(1e-13));
}

TEST_CASE("domain errors on evaluation") {
    const auto m = Modulus::power(1.0);
    CHECK_THROWS_AS(m.eval(0.0), DomainError);
    CHECK_THROWS_AS(m.eval(-0.1), DomainError);
    CHECK_THROWS_AS(m.eval(1.5), DomainError);
    CHECK_THROWS_AS(Modulus::inv_log_sq(1.5), DomainError);
    CHECK_THROWS_AS(Modulus::power(-1.0), DomainError);
    CHECK_THROWS_AS(Modulus::scaled(Modulus::power(1.0), 0.0), DomainError);
}

TEST_CASE("table modulus: interpolation, extension, invariants") {
    const auto t = Modulus::table({{0.1, 0.2}, {0.2, 0.2}, {0.4, 0.5}});
    CHECK(t.radius() == doctest::Approx(0.4));
    CHECK(t.eval(0.1) == doctest::Approx(0.2));
    CHECK(t.eval(0.15) == doctest::Approx(0.2));
    CHECK(t.eval(0.3) == doctest::Approx(0.35));
    // linear ramp to zero below the first knot
    CHECK(t.eval(0.05) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(t.eval(1e-8) == doctest::Approx(0.2e-7).epsilon(1e-9));

    CHECK_THROWS_AS(Modulus::table({{0.2, 0.1}, {0.1, 0.2}}), DomainError);  // radii not increasing
    CHECK_THROWS_AS(Modulus::table({{0.1, 0.3}, {0.2, 0.2}}), DomainError);  // values decreasing
    CHECK_THROWS_AS(Modulus::table({{-0.1, 0.0}, {0.2, 0.2}}), DomainError);
}

TEST_CASE("nondecreasing and nonnegative by sampling") {
    const std::vector<Modulus> mods = {
        Modulus::power(0.25), Modulus::power(1.0), Modulus::inv_log_sq(), Modulus::inv_log(),
        Modulus::table({{0.01, 0.05}, {0.2, 0.3}, {0.5, 0.3}}),
        Modulus::max_of({Modulus::power(1.0), Modulus::inv_log_sq()}),
        Modulus::scaled(Modulus::inv_log_sq(), 2.5)};
    for (const auto& m : mods) {
        double prev = -1.0;
        for (int i = 1; i <= 400; ++i) {
            const double r = m.radius() * i / 400.0;
            const double v = m.eval(r);
            CHECK(v >= 0.0);
            CHECK(v >= prev - 1e-13);
            prev = v;
        }
    }
}

TEST_CASE("dini integral: analytic oracles") {
    // antiderivative of 1/(r ln^2 r) is -1/ln r: integral over (0, 1/2] = 1/ln 2
    const auto v = dini_integral(Modulus::inv_log_sq(), 0.5, 1e-6);
    CHECK(v.is_dini);
    CHECK(v.integral_estimate == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-5));

    // power families: closed form r0^alpha / alpha
    for (double alpha : {0.25, 0.5, 1.0}) {
        for (double r0 : {0.3, 0.8, 1.0}) {
            const auto p = dini_integral(Modulus::power(alpha), r0, 1e-10);
            CHECK(p.is_dini);
            CHECK(p.integral_estimate ==
                  doctest::Approx(std::pow(r0, alpha) / alpha).epsilon(1e-8));
        }
    }
}

TEST_CASE("dini integral: divergence detection for 1/|ln r|") {
    for (double r0 : {0.5, 0.25, 0.1, 0.01}) {
        const auto v = dini_integral(Modulus::inv_log(), r0, 1e-6);
        CHECK_FALSE(v.is_dini);
        CHECK(v.witness_growth > 1.0);
        CHECK(v.witness_eps_hi > v.witness_eps_lo);
        CHECK(v.witness_eps_hi <= 1e-6 * 1.0001);
    }
    // table moduli are always Dini: the linear extension below the first knot
    // integrates like r itself
    const auto tab = dini_integral(Modulus::table({{0.001, 0.2}, {0.5, 0.2}}), 0.5, 1e-6);
    CHECK(tab.is_dini);
    const double expect = 0.2 + 0.2 * std::log(0.5 / 0.001);  // ramp + flat plateau
    CHECK(tab.integral_estimate == doctest::Approx(expect).epsilon(1e-4));
}

TEST_CASE("dini integral: additivity, monotonicity, dominance, scaling") {
    const std::vector<Modulus> mods = {Modulus::power(0.5), Modulus::inv_log_sq(),
                                       Modulus::table({{0.05, 0.1}, {0.5, 0.4}})};
    for (const auto& m : mods) {
        const double R = m.radius();
        const double a = 0.1 * R, b = 0.45 * R, c = 0.9 * R;
        const double ab = dini_integral_between(m, a, b);
        const double bc = dini_integral_between(m, b, c);
        const double ac = dini_integral_between(m, a, c);
        CHECK(ab + bc == doctest::Approx(ac).epsilon(1e-10));

        double prev = 0.0;
        for (double frac : {0.2, 0.4, 0.6, 0.8, 1.0}) {
            const double val = dini_integral(m, frac * R, 1e-8).integral_estimate;
            CHECK(val >= prev - 1e-9);
            prev = val;
        }

        const double base = dini_integral(m, 0.9 * R, 1e-8).integral_estimate;
        const double scl = dini_integral(Modulus::scaled(m, 3.0), 0.9 * R, 1e-8).integral_estimate;
        CHECK(scl == doctest::Approx(3.0 * base).epsilon(1e-6));
    }

    const auto m1 = Modulus::power(0.5);
    const auto m2 = Modulus::inv_log_sq();
    const double s1 = dini_integral(m1, 0.5, 1e-8).integral_estimate;
    const double s2 = dini_integral(m2, 0.5, 1e-8).integral_estimate;
    const double smax =
        dini_integral(Modulus::max_of({m1, m2}), 0.5, 1e-8).integral_estimate;
    CHECK(smax <= s1 + s2 + 1e-8);
    CHECK(smax >= std::max(s1, s2) - 1e-8);
}

TEST_CASE("rescale_radius: closed-form anchors") {
    // tail of 1/(s ln^2 s) over (0, r] is 1/|ln r|; solving 1/|ln r| = 0.01
    const double r_log = rescale_radius(Modulus::inv_log_sq(), 0.01);
    CHECK(r_log == doctest::Approx(std::exp(-100.0)).epsilon(1e-3));

    CHECK(rescale_radius(Modulus::power(1.0), 0.01) == doctest::Approx(0.01).epsilon(1e-6));
    CHECK(rescale_radius(Modulus::scaled(Modulus::power(1.0), 2.0), 0.01) ==
          doctest::Approx(0.005).epsilon(1e-6));

    // both constraints hold at the returned radius
    const auto m = Modulus::inv_log_sq();
    const double c0 = 0.05;
    const double r1 = rescale_radius(m, c0);
    CHECK(m.eval(r1) <= c0 * (1.0 + 1e-9));
    CHECK(dini_tail(m, r1, c0) <= c0 * (1.0 + 1e-6));

    CHECK_THROWS_AS(rescale_radius(Modulus::inv_log(), 0.01), PreconditionError);
    CHECK_THROWS_AS(rescale_radius(Modulus::power(1.0), -0.5), DomainError);
}

TEST_CASE("csv loading") {
    const char* path = "modulus_test_tmp.csv";
    {
        std::ofstream out(path);
        out << "# radius,value\n0.1,0.05\n0.2,0.010e1\n0.5,0.3\n";
    }
    const auto m = Modulus::from_csv(path);
    CHECK(m.radius() == doctest::Approx(0.5));
    CHECK(m.eval(0.2) == doctest::Approx(0.1));
    CHECK(m.eval(0.35) == doctest::Approx(0.2).epsilon(1e-12));
    std::remove(path);

    CHECK_THROWS_AS(Modulus::from_csv("does_not_exist.csv"), Error);
}
