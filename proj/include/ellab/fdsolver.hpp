#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ellab/common.hpp"
#include "ellab/grid.hpp"
#include "ellab/pucci.hpp"

namespace ellab {

enum class OpMode { Sup, Inf, Laplace };

inline const char* to_string(OpMode m) {
    switch (m) {
        case OpMode::Sup: return "sup";
        case OpMode::Inf: return "inf";
        case OpMode::Laplace: return "laplace";
    }
    return "?";
}

struct SolveOptions {
    double tol = 0.0;       // sup-residual tolerance; <= 0 means 1e-8 * data scale
    int max_sweeps = 200000;
    double omega = 0.0;     // 0 = choose from mode and grid size
    StencilSet stencil = StencilSet::make(3);  // ignored in Laplace mode
    int check_every = 8;    // sweeps between residual evaluations
};

struct SolveReport {
    int sweeps = 0;
    double final_residual = kInf;
    std::vector<double> residual_history;
    double omega_used = 1.0;
    bool converged = false;
};

/// Discrete extremal operator at one grid node, with every stencil neighbor
/// required to carry a value (inside or Dirichlet band).
inline double discrete_pucci(const GridFunction& u, const GridDomain& dom, int i, int j,
                             const Ellipticity& e, const StencilSet& S, PucciMode mode) {
    for (const auto& p : S.pairs)
        for (const auto [di, dj] : {std::pair{p.vx, p.vy}, std::pair{p.wx, p.wy}})
            if (!dom.has_value(i + di, j + dj) || !dom.has_value(i - di, j - dj) ||
                !dom.has_value(i, j))
                throw NeedsBoundaryError("stencil reaches nodes without values");
    return discrete_pucci_from([&](int di, int dj) { return u.at(i + di, j + dj); }, dom.h, e,
                               S, mode);
}

namespace detail {

/// Evaluate the discrete operator at an inside node of u.
inline double node_operator(const GridDomain& dom, const GridFunction& u, int i, int j,
                            OpMode mode, const Ellipticity& e, const StencilSet& S) {
    if (mode == OpMode::Laplace) {
        return e.lambda *
               (u.at(i + 1, j) + u.at(i - 1, j) + u.at(i, j + 1) + u.at(i, j - 1) -
                4.0 * u.at(i, j)) /
               (dom.h * dom.h);
    }
    const PucciMode pm = mode == OpMode::Sup ? PucciMode::Sup : PucciMode::Inf;
    return discrete_pucci_from(
        [&](int di, int dj) { return u.at(i + di, j + dj); }, dom.h, e, S, pm);
}

/// Solve  P q1+ + N q1- + P q2+ + N q2- = rhs  in z, where
/// q_k = (b_k - 2 z) / c_k; strictly decreasing piecewise-linear in z.
inline double pair_point_solve(double b1, double c1, double b2, double c2, double P, double N,
                               double rhs) {
    auto F = [&](double z) {
        const double q1 = (b1 - 2.0 * z) / c1;
        const double q2 = (b2 - 2.0 * z) / c2;
        return P * pos_part(q1) + N * neg_part(q1) + P * pos_part(q2) + N * neg_part(q2);
    };
    const double zl = std::min(b1, b2) / 2.0, zh = std::max(b1, b2) / 2.0;
    double a1, a2;  // effective slopes on the interval containing the root
    if (rhs >= F(zl)) {          // z <= zl: both differences nonnegative
        a1 = P; a2 = P;
    } else if (rhs <= F(zh)) {   // z >= zh: both nonpositive
        a1 = N; a2 = N;
    } else {                     // between: the larger-b direction is still positive
        a1 = b1 >= b2 ? P : N;
        a2 = b2 > b1 ? P : N;
    }
    return (a1 * b1 / c1 + a2 * b2 / c2 - rhs) / (2.0 * (a1 / c1 + a2 / c2));
}

/// Exact solution of the one-point equation (operator at node = rhs) in the
/// node value, every neighbor frozen.
inline double node_point_solve(const GridDomain& dom, const GridFunction& u, int i, int j,
                               OpMode mode, const Ellipticity& e, const StencilSet& S,
                               double rhs) {
    const double h2 = dom.h * dom.h;
    if (mode == OpMode::Laplace) {
        return (u.at(i + 1, j) + u.at(i - 1, j) + u.at(i, j + 1) + u.at(i, j - 1) -
                h2 * rhs / e.lambda) /
               4.0;
    }
    const double P = mode == OpMode::Sup ? e.Lambda : e.lambda;
    const double N = mode == OpMode::Sup ? e.lambda : e.Lambda;
    double best = mode == OpMode::Sup ? -kInf : kInf;
    for (const auto& p : S.pairs) {
        const double cv = h2 * (static_cast<double>(p.vx) * p.vx + static_cast<double>(p.vy) * p.vy);
        const double cw = h2 * (static_cast<double>(p.wx) * p.wx + static_cast<double>(p.wy) * p.wy);
        const double bv = u.at(i + p.vx, j + p.vy) + u.at(i - p.vx, j - p.vy);
        const double bw = u.at(i + p.wx, j + p.wy) + u.at(i - p.wx, j - p.wy);
        const double z = pair_point_solve(bv, cv, bw, cw, P, N, rhs);
        best = mode == OpMode::Sup ? std::max(best, z) : std::min(best, z);
    }
    return best;
}

}  // namespace detail

/// Dirichlet solve of (discrete extremal operator)(u) = f by nonlinear
/// Gauss-Seidel with exact one-point updates, optional over-relaxation, and
/// alternating sweep order.  Deterministic for fixed inputs.
inline std::pair<GridFunction, SolveReport> solve(const GridDomain& dom, OpMode mode,
                                                  const Ellipticity& e,
                                                  const std::function<double(Vec2)>& rhs,
                                                  const BoundaryData& g,
                                                  SolveOptions opts = {}) {
    const StencilSet& S = opts.stencil;
    const int reach = mode == OpMode::Laplace ? 1 : S.max_reach();
    if (reach > dom.band_width)
        throw NeedsBoundaryError("stencil reach exceeds the domain's boundary band");

    GridFunction u(dom.nx, dom.ny);
    fill_band(dom, u, g);
    for (auto [i, j] : dom.inside_nodes) u.at(i, j) = 0.0;

    // sampled right-hand side
    std::vector<double> f(dom.inside_nodes.size(), 0.0);
    if (rhs)
        for (std::size_t k = 0; k < dom.inside_nodes.size(); ++k)
            f[k] = rhs(dom.pos(dom.inside_nodes[k].first, dom.inside_nodes[k].second));

    double tol = opts.tol;
    if (!(tol > 0.0)) {
        double data_scale = 0.0;
        for (int j = 0; j < dom.ny; ++j)
            for (int i = 0; i < dom.nx; ++i)
                if (dom.state[dom.idx(i, j)] == NodeState::Band)
                    data_scale = std::max(data_scale, std::abs(u.at(i, j)));
        for (double fv : f) data_scale = std::max(data_scale, std::abs(fv));
        tol = 1e-8 * std::max(data_scale, std::numeric_limits<double>::min());
    }

    const BBox bb = dom.shape.bbox();
    const double extent = std::max(bb.xhi - bb.xlo, bb.yhi - bb.ylo);
    double omega = opts.omega;
    if (omega <= 0.0)
        omega =
            std::min(1.995, 2.0 / (1.0 + std::sin(M_PI * dom.h / std::max(extent, dom.h))));

    SolveReport rep;
    rep.omega_used = omega;

    auto residual = [&]() {
        double r = 0.0;
        for (std::size_t k = 0; k < dom.inside_nodes.size(); ++k) {
            auto [i, j] = dom.inside_nodes[k];
            r = std::max(r, std::abs(detail::node_operator(dom, u, i, j, mode, e, S) - f[k]));
        }
        return r;
    };

    double best_res = kInf, first_res = kInf;
    int checks_since_best = 0;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        const bool forward = (sweep % 2 == 0);
        const std::size_t n = dom.inside_nodes.size();
        for (std::size_t t = 0; t < n; ++t) {
            const std::size_t k = forward ? t : n - 1 - t;
            auto [i, j] = dom.inside_nodes[k];
            const double z = detail::node_point_solve(dom, u, i, j, mode, e, S, f[k]);
            u.at(i, j) += omega * (z - u.at(i, j));
        }
        rep.sweeps = sweep + 1;
        if ((sweep + 1) % opts.check_every == 0 || sweep + 1 == opts.max_sweeps) {
            const double res = residual();
            rep.residual_history.push_back(res);
            if (res <= tol) {
                rep.final_residual = res;
                rep.converged = true;
                return {std::move(u), std::move(rep)};
            }
            // Near-optimal over-relaxation has long oscillatory transients;
            // back off only on outright blow-up or genuinely sustained
            // stagnation, and then gently.
            if (!std::isfinite(first_res) && std::isfinite(res)) first_res = res;
            if (!std::isfinite(res) || res > 1e10 * std::max(first_res, 1.0)) {
                omega = 1.0;  // safe mode: plain monotone sweeps
                rep.omega_used = omega;
                checks_since_best = 0;
            } else if (res < best_res) {
                best_res = res;
                checks_since_best = 0;
            } else if (++checks_since_best >= 40 && omega > 1.0) {
                omega = 1.0 + 0.8 * (omega - 1.0);
                rep.omega_used = omega;
                checks_since_best = 0;
            }
        }
    }
    rep.final_residual = rep.residual_history.empty() ? kInf : rep.residual_history.back();
    throw NonconvergenceError("solve: sweep budget exhausted (residual " +
                                  std::to_string(rep.final_residual) + ")",
                              rep.residual_history);
}

}  // namespace ellab
