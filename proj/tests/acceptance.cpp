// Acceptance suite: one test case per criterion, each printing a PASS/FAIL
// line with the measured quantities.  Run via ctest or directly.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "ellab/scenarios.hpp"

using namespace ellab;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int criterion, const char* title, bool pass, const Stopwatch& sw) {
    std::printf("[ACCEPTANCE] criterion %2d (%s): %s  [%.1fs]\n", criterion, title,
                pass ? "PASS" : "FAIL", sw.seconds());
    std::fflush(stdout);
}

/// Harmonic solve on the log-domain shared by criteria 8 and 9.
struct LogDomainField {
    GridDomain dom;
    GridFunction u;
};

const LogDomainField& log_domain_field() {
    static const LogDomainField field = [] {
        const auto dom2d = GraphDomain2D::log_example();
        const auto shape = Shape::graph(dom2d, dom2d.radius);
        GridDomain dom = build_domain(shape, std::pow(2.0, -10.0));
        SolveOptions opts;
        opts.tol = 1e-8;
        auto [u, rep] = solve(dom, OpMode::Laplace, Ellipticity{1.0, 1.0}, nullptr,
                              BoundaryData::flat0_outer1(shape), opts);
        REQUIRE(rep.converged);
        return LogDomainField{std::move(dom), std::move(u)};
    }();
    return field;
}

}  // namespace

TEST_CASE("criterion 1: Dini calculus") {
    Stopwatch sw;
    bool pass = true;

    const auto v = dini_integral(Modulus::inv_log_sq(), 0.5, 1e-6);
    pass &= v.is_dini;
    pass &= std::abs(v.integral_estimate - 1.0 / std::log(2.0)) <= 1e-5;
    CHECK(v.is_dini);
    CHECK(std::abs(v.integral_estimate - 1.0 / std::log(2.0)) <= 1e-5);

    for (double alpha : {0.25, 0.5, 1.0}) {
        for (double r0 : {0.5, 1.0}) {
            const auto p = dini_integral(Modulus::power(alpha), r0, 1e-10);
            const double expect = std::pow(r0, alpha) / alpha;
            pass &= p.is_dini && std::abs(p.integral_estimate - expect) <= 1e-8;
            CHECK(std::abs(p.integral_estimate - expect) <= 1e-8);
        }
    }

    const auto nd = dini_integral(Modulus::inv_log(), 0.5, 1e-6);
    pass &= !nd.is_dini;
    CHECK_FALSE(nd.is_dini);

    report(1, "Dini calculus", pass, sw);
    CHECK(pass);
}

TEST_CASE("criterion 2: extremal-operator algebra") {
    Stopwatch sw;
    bool pass = true;
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> entry(-5.0, 5.0);
    std::uniform_real_distribution<double> uang(0.0, M_PI);

    for (const auto [lam, Lam] : {std::pair{1.0, 2.0}, std::pair{0.5, 4.0}}) {
        const Ellipticity e{lam, Lam};
        std::uniform_real_distribution<double> uspec(lam, Lam);
        for (int i = 0; i < 500; ++i) {
            SymMat m(2);
            m.set(0, 0, entry(rng));
            m.set(1, 1, entry(rng));
            m.set(0, 1, entry(rng));
            const auto ev = m.eigenvalues();

            // brute force over a 200^2 grid of eigenvalue pairs in the eigenframe
            double bs = -kInf, bi = kInf;
            for (int a = 0; a < 200; ++a) {
                const double va = lam + (Lam - lam) * a / 199.0;
                for (int b = 0; b < 200; ++b) {
                    const double vb = lam + (Lam - lam) * b / 199.0;
                    const double tr = va * ev[0] + vb * ev[1];
                    bs = std::max(bs, tr);
                    bi = std::min(bi, tr);
                }
            }
            const double sup = pucci_sup(m, e), inf = pucci_inf(m, e);
            pass &= std::abs(sup - bs) <= 1e-3 && std::abs(inf - bi) <= 1e-3;

            // the five invariants
            SymMat n(2);
            n.set(0, 0, entry(rng));
            n.set(1, 1, entry(rng));
            n.set(0, 1, entry(rng));
            pass &= inf <= sup + 1e-12;
            pass &= std::abs(pucci_sup(m * -1.0, e) + inf) <= 1e-12;
            pass &= std::abs(pucci_sup(m * 3.0, e) - 3.0 * sup) <= 1e-11;
            pass &= pucci_sup(m + n, e) <= sup + pucci_sup(n, e) + 1e-11;
            pass &= pucci_inf(m + n, e) >= inf + pucci_inf(n, e) - 1e-11;
            const SymMat A = SymMat::rotated2(uspec(rng), uspec(rng), uang(rng));
            const double tram =
                A(0, 0) * m(0, 0) + 2.0 * A(0, 1) * m(0, 1) + A(1, 1) * m(1, 1);
            pass &= tram <= sup + 1e-10 && tram >= inf - 1e-10;
        }
    }
    report(2, "extremal-operator algebra", pass, sw);
    CHECK(pass);
}

TEST_CASE("criterion 3: discrete monotonicity and consistency") {
    Stopwatch sw;
    bool pass = true;
    const Ellipticity e{1.0, 2.0};
    const auto S = StencilSet::make(3);
    const double h = 0.05;

    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(S.pairs.size()) - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    int violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        double values[7][7];
        for (auto& row : values)
            for (double& v : row) v = u(rng);
        auto value_at = [&](int di, int dj) { return values[di + 3][dj + 3]; };
        const PucciMode mode = coin(rng) ? PucciMode::Sup : PucciMode::Inf;
        const double before = discrete_pucci_from(value_at, h, e, S, mode);
        const auto& p = S.pairs[pick(rng)];
        const bool first = coin(rng) != 0;
        const int bi = first ? p.vx : p.wx, bj = first ? p.vy : p.wy;
        const int sgn = coin(rng) ? 1 : -1;
        values[sgn * bi + 3][sgn * bj + 3] += 0.75;
        if (discrete_pucci_from(value_at, h, e, S, mode) < before) ++violations;
    }
    pass &= violations == 0;
    CHECK(violations == 0);

    const SymMat M = SymMat::rotated2(3.0, -1.0, M_PI / 8.0);
    auto field = [&](int di, int dj) {
        const double x = di * h, y = dj * h;
        return 0.5 * (M(0, 0) * x * x + 2.0 * M(0, 1) * x * y + M(1, 1) * y * y);
    };
    const double exact = pucci_sup(M, e);
    double prev_gap = kInf;
    for (int w : {1, 2, 3}) {
        const double gap =
            exact - discrete_pucci_from(field, h, e, StencilSet::make(w), PucciMode::Sup);
        pass &= gap <= prev_gap + 1e-12;
        if (w == 3) pass &= std::abs(gap) <= 0.1 * M.max_abs_eigenvalue();
        prev_gap = gap;
    }
    report(3, "discrete monotonicity and consistency", pass, sw);
    CHECK(pass);
}

TEST_CASE("criterion 4: solver exactness and comparison principle") {
    Stopwatch sw;
    bool pass = true;

    {
        const auto dom = build_domain(Shape::half_disc(1.0), 1.0 / 64.0);
        SolveOptions opts;
        opts.tol = 1e-9;
        auto [u, rep] = solve(dom, OpMode::Laplace, Ellipticity{1.0, 1.0}, nullptr,
                              BoundaryData::linear_y(), opts);
        double err = 0.0;
        for (auto [i, j] : dom.inside_nodes)
            err = std::max(err, std::abs(u.at(i, j) - dom.pos(i, j).y));
        pass &= rep.converged && err <= 1e-6;
        CHECK(err <= 1e-6);
    }

    {
        const auto dom = build_domain(Shape::half_disc(1.0), 1.0 / 32.0);
        std::mt19937 rng(13);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        int ordered = 0;
        for (int trial = 0; trial < 20; ++trial) {
            const double a = coef(rng), b = coef(rng), c = coef(rng);
            const double df = std::abs(coef(rng)) + 0.05, dg = std::abs(coef(rng)) + 0.05;
            auto g2 = BoundaryData::ambient(
                [=](Vec2 p) { return a * p.x + b * p.y + c * std::sin(3.0 * p.x); }, "g2");
            auto g1 = BoundaryData::ambient([=](Vec2 p) { return g2.fn(p) - dg; }, "g1");
            auto f2 = [=](Vec2 p) { return b * std::cos(2.0 * p.y); };
            auto f1 = [=](Vec2 p) { return f2(p) + df; };
            SolveOptions opts;
            opts.tol = 1e-9;
            auto [u1, r1] = solve(dom, OpMode::Sup, Ellipticity{1.0, 2.0}, f1, g1, opts);
            auto [u2, r2] = solve(dom, OpMode::Sup, Ellipticity{1.0, 2.0}, f2, g2, opts);
            bool ok = r1.converged && r2.converged;
            for (auto [i, j] : dom.inside_nodes) ok = ok && u1.at(i, j) <= u2.at(i, j) + 1e-6;
            if (ok) ++ordered;
        }
        pass &= ordered == 20;
        CHECK(ordered == 20);
    }
    report(4, "solver exactness and comparison principle", pass, sw);
    CHECK(pass);
}

TEST_CASE("criterion 5: box barrier lower bound") {
    Stopwatch sw;
    bool pass = true;
    double c1_coarse = 0.0, c1_fine = 0.0;
    for (double h : {1.0 / 64.0, 1.0 / 128.0}) {
        const auto shape = Shape::half_cube(1.0);
        const auto dom = build_domain(shape, h);
        SolveOptions opts;
        opts.tol = 1e-8;
        auto [u, rep] = solve(dom, OpMode::Inf, Ellipticity{1.0, 2.0}, nullptr,
                              BoundaryData::box_top1(shape), opts);
        REQUIRE(rep.converged);
        double c1 = kInf;
        for (auto [i, j] : dom.inside_nodes) {
            const Vec2 p = dom.pos(i, j);
            if (p.norm() <= 0.25) c1 = std::min(c1, u.at(i, j) / p.y);
        }
        (h == 1.0 / 64.0 ? c1_coarse : c1_fine) = c1;
    }
    pass &= c1_fine > 0.0 && c1_coarse > 0.0;
    pass &= std::abs(c1_coarse - c1_fine) <= 0.2 * c1_fine;
    std::printf("    barrier slope: c1(h=1/64) = %.5f, c1(h=1/128) = %.5f\n", c1_coarse,
                c1_fine);
    CHECK(c1_fine > 0.0);
    CHECK(std::abs(c1_coarse - c1_fine) <= 0.2 * c1_fine);
    report(5, "box barrier lower bound", pass, sw);
    CHECK(pass);
}

TEST_CASE("criterion 6: flat-boundary expansion of the extremal solve") {
    Stopwatch sw;
    const auto shape = Shape::half_disc(1.0);
    const auto dom = build_domain(shape, 1.0 / 128.0);
    SolveOptions opts;
    opts.tol = 1e-8;
    auto [u, rep] = solve(dom, OpMode::Sup, Ellipticity{1.0, 2.0}, nullptr,
                          BoundaryData::flat0_outer1(shape), opts);
    REQUIRE(rep.converged);
    const auto fit =
        c1alpha_fit(u, dom, {1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0});
    const bool pass = fit.a > 0.0 && fit.alpha_hat > 0.05;
    std::printf("    expansion fit: a = %.5f, alpha_hat = %.3f\n", fit.a, fit.alpha_hat);
    CHECK(fit.a > 0.0);
    CHECK(fit.alpha_hat > 0.05);
    report(6, "flat-boundary expansion probe", pass, sw);
    CHECK(pass);
}

TEST_CASE("criterion 7: log-domain geometry certificates") {
    Stopwatch sw;
    bool pass = true;
    const auto dom = GraphDomain2D::log_example();

    const auto cert = check_reifenberg(dom, Modulus::inv_log_sq(), Side::Exterior, 0.5, 11);
    pass &= cert.pass;
    CHECK(cert.pass);
    REQUIRE(cert.frames[1].scale == doctest::Approx(0.25));
    const double slack_bound = 1.0 / std::pow(std::log(0.25), 2);
    pass &= cert.frames[1].slack <= slack_bound + 1e-4;
    CHECK(cert.frames[1].slack <= slack_bound + 1e-4);
    const double drift_bound = std::log(2.0) / std::pow(std::log(0.25), 2) + 1e-3;
    pass &= cert.drifts[1] <= drift_bound;
    CHECK(cert.drifts[1] <= drift_bound);

    const auto lin = check_reifenberg(dom, Modulus::power(1.0, 0.5), Side::Exterior, 0.5, 11);
    pass &= !lin.pass;
    for (std::size_t k = 7; k < lin.scale_pass.size(); ++k) {
        pass &= !lin.scale_pass[k];
        CHECK_FALSE(lin.scale_pass[k]);
    }
    report(7, "log-domain geometry certificates", pass, sw);
    CHECK(pass);
}

TEST_CASE("criterion 8: boundedness of the Lipschitz quotients") {
    Stopwatch sw;
    const auto& field = log_domain_field();
    std::vector<double> scales;
    for (int k = 2; k <= 7; ++k) scales.push_back(std::pow(2.0, -k));
    std::sort(scales.begin(), scales.end());
    const auto table = lipschitz_probe(field.u, field.dom, scales);
    std::vector<double> qs;
    for (const auto& [r, q] : table.rows) {
        std::printf("    q(%.5f) = %.5f\n", r, q);
        qs.push_back(q);
    }
    std::sort(qs.begin(), qs.end());
    const double median = qs[qs.size() / 2];
    const bool pass = table.lipschitz_constant <= 1.5 * median;
    CHECK(table.lipschitz_constant <= 1.5 * median);
    report(8, "Lipschitz quotient boundedness", pass, sw);
    CHECK(pass);
}

TEST_CASE("criterion 9: directional lower bound at the boundary point") {
    Stopwatch sw;
    bool pass = true;
    const auto& field = log_domain_field();
    const double t_lo = std::pow(2.0, -8.0), t_hi = std::pow(2.0, -3.0);

    const auto along_e2 = hopf_probe(field.u, field.dom, {0.0, 1.0}, t_lo, t_hi);
    const auto along_diag =
        hopf_probe(field.u, field.dom, Vec2{1.0, 1.0}.normalized(), t_lo, t_hi);
    pass &= along_e2.c_min > 0.0 && along_diag.c_min > 0.0;
    std::printf("    c_min(e2) = %.5f, c_min(diag) = %.5f\n", along_e2.c_min,
                along_diag.c_min);
    CHECK(along_e2.c_min > 0.0);
    CHECK(along_diag.c_min > 0.0);

    auto u7 = field.u;
    for (double& v : u7.v) v *= 7.0;
    const auto scaled = hopf_probe(u7, field.dom, {0.0, 1.0}, t_lo, t_hi);
    pass &= std::abs(scaled.c_min - along_e2.c_min) <= 1e-10;
    CHECK(std::abs(scaled.c_min - along_e2.c_min) <= 1e-10);

    report(9, "directional lower bound", pass, sw);
    CHECK(pass);
}

TEST_CASE("criterion 10: constant machinery") {
    Stopwatch sw;
    bool pass = true;

    // defaults plus randomized inputs
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> uc(0.5, 20.0);
    std::uniform_real_distribution<double> uk(1.0, 50.0);
    std::uniform_real_distribution<double> ua(0.1, 0.9);
    for (int trial = 0; trial < 51; ++trial) {
        ProofInputs in = ProofInputs::with_constant_K(trial == 0 ? 1.0 : uk(rng),
                                                      Modulus::inv_log_sq());
        if (trial > 0) {
            in.C1 = uc(rng);
            in.C2 = uc(rng);
            in.C3 = uc(rng);
            in.alpha = ua(rng);
        }
        const auto pl = select_constants_lipschitz(in);
        for (const auto& s : recheck_lipschitz(in, pl)) pass &= s.ok;
        const auto ph = select_constants_hopf(in, 0.25, 0.3);
        for (const auto& s : recheck_hopf(in, ph)) pass &= s.ok;
    }
    CHECK(pass);

    // scale sequences for built-in Dini moduli
    for (const auto& m : {Modulus::power(1.0), Modulus::power(0.5), Modulus::power(0.25),
                          Modulus::inv_log_sq()}) {
        const double eta = 0.05, alpha0 = 0.25, c0 = 0.01;
        const auto seq = scale_sequence(m, eta, alpha0, c0, 200);
        pass &= seq.proviso_holds && seq.sum_within_bound;
        const double ea = std::pow(eta, alpha0);
        for (int k = 0; k < 200; ++k) {
            pass &= seq.omega_at[k] <= seq.A[k] + 1e-15;
            pass &= seq.A[k] <= seq.A[k + 1] / ea + 1e-15;
        }
    }
    report(10, "constant machinery", pass, sw);
    CHECK(pass);
}

TEST_CASE("criterion 11: end-to-end demo chain") {
    Stopwatch sw;
    const OutputDir out("");
    const auto res = scenario_demo_log_domain(std::pow(2.0, -9.0), out);
    const bool pass = res.exit_code == 0;
    std::printf("    demo verdict: %s\n", res.verdict.c_str());
    CHECK(res.exit_code == 0);
    report(11, "end-to-end demo chain", pass, sw);
    CHECK(pass);
}
