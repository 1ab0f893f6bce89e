#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ellab/common.hpp"
#include "ellab/grid.hpp"
#include "ellab/modulus.hpp"

namespace ellab {

// ---------------------------------------------------------------------------
// Pointwise Lipschitz quotients at the origin
// ---------------------------------------------------------------------------

struct LipschitzTable {
    std::vector<std::pair<double, double>> rows;  // (r, q(r))
    double lipschitz_constant = 0.0;              // max over rows
};

/// q(r) = sup over inside nodes of |u - u(0)| / r within each ball B_r.
inline LipschitzTable lipschitz_probe(const GridFunction& u, const GridDomain& dom,
                                      std::vector<double> scales) {
    const auto [oi, oj] = dom.origin_node();
    if (dom.at(oi, oj) != NodeState::Band)
        throw PreconditionError("lipschitz_probe: 0 must be a boundary node");
    const double u0 = u.at(oi, oj);
    std::sort(scales.begin(), scales.end());
    for (double r : scales)
        if (r < 3.0 * dom.h - 1e-12)
            throw ResolutionError("lipschitz_probe: scale below 3h");

    LipschitzTable out;
    for (double r : scales) {
        double q = 0.0;
        for (auto [i, j] : dom.inside_nodes) {
            const Vec2 p = dom.pos(i, j);
            if (p.norm() <= r) q = std::max(q, std::abs(u.at(i, j) - u0) / r);
        }
        out.rows.emplace_back(r, q);
        out.lipschitz_constant = std::max(out.lipschitz_constant, q);
    }
    return out;
}

// ---------------------------------------------------------------------------
// First-order expansion with power-type remainder at a flat boundary point
// ---------------------------------------------------------------------------

struct C1AlphaFit {
    double a = 0.0;          // slope of the linear term a * y
    double alpha_hat = 0.0;  // remainder exponent from the sup-residual decay
    double C_hat = 0.0;      // remainder prefactor
    std::vector<std::pair<double, double>> residuals;  // (r, sup |u - u0 - a y|)
    bool machine_residuals = false;
};

/// Fit u ~ u(0) + a y + C y^{1+alpha} near the origin of a flat-boundary
/// domain.  Initial a is the least-squares slope of u against y on the
/// smallest scale; (a, C, alpha) are then refined jointly (1-D search over
/// alpha with linear least squares inside), and alpha_hat / C_hat are read
/// off the log-log decay of the sup-residuals of the refined linear part.
inline C1AlphaFit c1alpha_fit(const GridFunction& u, const GridDomain& dom,
                              std::vector<double> scales) {
    const std::string& nm = dom.shape.name();
    if (nm != "half_disc" && nm != "half_cube")
        throw PreconditionError("c1alpha_fit needs a flat-boundary domain");
    if (scales.size() < 3) throw ResolutionError("c1alpha_fit needs at least 3 scales");
    std::sort(scales.begin(), scales.end());
    if (scales.front() < 3.0 * dom.h - 1e-12)
        throw ResolutionError("c1alpha_fit: smallest scale below 3h");

    const auto [oi, oj] = dom.origin_node();
    const double u0 = u.at(oi, oj);
    const double r_min = scales.front(), r_max = scales.back();

    // stage 1: least-squares slope on the smallest scale
    double syy = 0.0, syu = 0.0;
    for (auto [i, j] : dom.inside_nodes) {
        const Vec2 p = dom.pos(i, j);
        if (p.norm() > r_min) continue;
        syy += p.y * p.y;
        syu += p.y * (u.at(i, j) - u0);
    }
    if (syy == 0.0) throw ResolutionError("c1alpha_fit: no nodes below the smallest scale");
    double a = syu / syy;

    // stage 2: refine (a, C) against the model a y + C y^{1+alpha} with a 1-D
    // search over alpha.  Candidates whose remainder term dwarfs the field at
    // the outermost scale are rejected: those are the nearly-collinear fits
    // (y vs y^{1+alpha} with alpha ~ 0) where least squares degenerates.  The
    // refined slope replaces the smallest-scale estimate only when the model
    // fits essentially exactly; on genuinely two-dimensional fields the
    // smallest-scale estimate is the stable one.
    std::vector<Vec2> pts;
    std::vector<double> vals;
    double field_scale = 0.0, sum_sq = 0.0;
    for (auto [i, j] : dom.inside_nodes) {
        const Vec2 p = dom.pos(i, j);
        if (p.norm() <= r_max) {
            pts.push_back(p);
            vals.push_back(u.at(i, j) - u0);
            field_scale = std::max(field_scale, std::abs(vals.back()));
            sum_sq += vals.back() * vals.back();
        }
    }
    auto ls_for = [&](double alpha, double* a_out, double* c_out) {
        double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double y = pts[k].y;
            const double t = std::pow(y, 1.0 + alpha);
            s11 += y * y;
            s12 += y * t;
            s22 += t * t;
            b1 += y * vals[k];
            b2 += t * vals[k];
        }
        const double det = s11 * s22 - s12 * s12;
        double af, cf;
        if (std::abs(det) < 1e-14 * s11 * s22) {
            af = s11 > 0 ? b1 / s11 : 0.0;
            cf = 0.0;
        } else {
            af = (s22 * b1 - s12 * b2) / det;
            cf = (s11 * b2 - s12 * b1) / det;
        }
        double sse = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double y = pts[k].y;
            const double r = vals[k] - af * y - cf * std::pow(y, 1.0 + alpha);
            sse += r * r;
        }
        if (a_out) *a_out = af;
        if (c_out) *c_out = cf;
        return sse;
    };
    auto gated_sse = [&](double alpha) {
        double af, cf;
        const double sse = ls_for(alpha, &af, &cf);
        const bool degenerate =
            std::abs(cf) * std::pow(r_max, 1.0 + alpha) > 4.0 * std::max(field_scale, 1e-300);
        return degenerate ? kInf : sse;
    };
    double alpha_star = 0.0, best_sse = kInf;
    for (int g = 0; g <= 48; ++g) {
        const double alpha = 0.05 * std::pow(1.6 / 0.05, g / 48.0);
        const double sse = gated_sse(alpha);
        if (sse < best_sse) {
            best_sse = sse;
            alpha_star = alpha;
        }
    }
    if (std::isfinite(best_sse)) {
        alpha_star = golden_min(gated_sse, std::max(0.05, alpha_star / 1.3),
                                std::min(1.8, alpha_star * 1.3), 100);
        double a_vp = a, c_ls = 0.0;
        const double sse_star = ls_for(alpha_star, &a_vp, &c_ls);
        if (sse_star <= 1e-12 * sum_sq) a = a_vp;  // the model is exact here
    }
    // otherwise keep the smallest-scale least-squares slope

    // stage 3: sup-residual decay of the refined linear part
    C1AlphaFit out;
    out.a = a;
    double scale_u = 0.0;
    for (double v : vals) scale_u = std::max(scale_u, std::abs(v));
    std::vector<double> lr, ls;
    for (double r : scales) {
        double s = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k)
            if (pts[k].norm() <= r) s = std::max(s, std::abs(vals[k] - a * pts[k].y));
        out.residuals.emplace_back(r, s);
        if (s > 1e-12 * std::max(1.0, scale_u)) {
            lr.push_back(std::log(r));
            ls.push_back(std::log(s));
        }
    }
    if (lr.size() < 2) {
        out.machine_residuals = true;
        out.alpha_hat = 1.0;
        out.C_hat = 0.0;
        return out;
    }
    const LineFit lf = fit_line(lr, ls);
    out.alpha_hat = lf.slope - 1.0;
    out.C_hat = std::exp(lf.intercept);
    return out;
}

// ---------------------------------------------------------------------------
// Directional lower bound at the origin (Hopf-type ray probe)
// ---------------------------------------------------------------------------

struct HopfTable {
    std::vector<std::pair<double, double>> rows;  // (t, u(t l) / t)
    double anchor_value = 0.0;                    // u at (R/2) e_2
    double c_min = 0.0;                           // min row / anchor_value
};

namespace detail {

inline double bilinear(const GridDomain& dom, const GridFunction& u, Vec2 p) {
    const double fx = (p.x - dom.x0) / dom.h, fy = (p.y - dom.y0) / dom.h;
    const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
    if (!dom.in_range(i, j) || !dom.in_range(i + 1, j + 1))
        throw GeometryError("interpolation point outside the grid");
    for (int dj = 0; dj <= 1; ++dj)
        for (int di = 0; di <= 1; ++di)
            if (!dom.has_value(i + di, j + dj))
                throw GeometryError("interpolation stencil leaves the domain");
    const double ax = fx - i, ay = fy - j;
    return (1 - ax) * (1 - ay) * u.at(i, j) + ax * (1 - ay) * u.at(i + 1, j) +
           (1 - ax) * ay * u.at(i, j + 1) + ax * ay * u.at(i + 1, j + 1);
}

}  // namespace detail

/// Ratios u(t l)/t along the ray direction l for t log-spaced in
/// [t_lo, t_hi], normalized by the anchor value u((R/2) e_2).
inline HopfTable hopf_probe(const GridFunction& u, const GridDomain& dom, Vec2 l, double t_lo,
                            double t_hi, int points = 33) {
    if (std::abs(l.norm() - 1.0) > 1e-9) throw PreconditionError("hopf_probe needs |l| = 1");
    if (!(t_lo > 0.0 && t_hi > t_lo)) throw PreconditionError("hopf_probe needs 0 < t_lo < t_hi");
    if (points < 2) throw PreconditionError("hopf_probe needs at least 2 points");

    HopfTable out;
    const Vec2 anchor{0.0, dom.nominal_radius / 2.0};
    out.anchor_value = detail::bilinear(dom, u, anchor);
    if (!(out.anchor_value > 0.0))
        throw PreconditionError("hopf_probe: anchor value is not positive");

    double cmin_raw = kInf;
    for (int k = 0; k < points; ++k) {
        const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(k) / (points - 1));
        const Vec2 p = t * l;
        if (!dom.shape.inside(p)) throw GeometryError("hopf_probe: ray leaves the domain");
        const double val = detail::bilinear(dom, u, p);
        if (val < -1e-9 * std::max(1.0, std::abs(out.anchor_value)))
            throw PreconditionError("hopf_probe needs u >= 0 along the ray");
        out.rows.emplace_back(t, val / t);
        cmin_raw = std::min(cmin_raw, val / t);
    }
    out.c_min = cmin_raw / out.anchor_value;
    return out;
}

// ---------------------------------------------------------------------------
// Scale modulus of a right-hand side: L^2 mass in B_r over total L^2 mass
// ---------------------------------------------------------------------------

/// omega_f(r) = ||f||_{L^2(Omega ∩ B_r)} / ||f||_{L^2(Omega)} as a table
/// modulus over the given scales (grid dimension n = 2).  f == 0 yields the
/// zero modulus.
inline Modulus f_modulus(const GridFunction& f, const GridDomain& dom,
                         std::vector<double> scales) {
    if (scales.empty()) throw PreconditionError("f_modulus needs scales");
    std::sort(scales.begin(), scales.end());
    const double h2 = dom.h * dom.h;
    double total = 0.0;
    for (auto [i, j] : dom.inside_nodes) total += f.at(i, j) * f.at(i, j) * h2;
    std::vector<std::pair<double, double>> knots;
    if (total == 0.0) {
        for (double r : scales) knots.emplace_back(r, 0.0);
        return Modulus::table(std::move(knots));
    }
    for (double r : scales) {
        double mass = 0.0;
        for (auto [i, j] : dom.inside_nodes) {
            const Vec2 p = dom.pos(i, j);
            if (p.norm() <= r) mass += f.at(i, j) * f.at(i, j) * h2;
        }
        knots.emplace_back(r, std::sqrt(mass / total));
    }
    for (std::size_t k = 1; k < knots.size(); ++k)  // guard against float jitter
        knots[k].second = std::max(knots[k].second, knots[k - 1].second);
    return Modulus::table(std::move(knots));
}

}  // namespace ellab
