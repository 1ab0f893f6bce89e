#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ellab/common.hpp"
#include "ellab/geometry.hpp"
#include "ellab/grid.hpp"
#include "ellab/modulus.hpp"
#include "ellab/pucci.hpp"

namespace ellab {

// ---------------------------------------------------------------------------
// Inputs shared by both constant selections
// ---------------------------------------------------------------------------

/// Floating-comparison slack floor: an inequality holds when its slack is no
/// worse than -kSlackFloor (reported raw).
inline constexpr double kSlackFloor = 1e-12;

struct ProofInputs {
    Ellipticity e{1.0, 2.0};
    double alpha = 0.5;                 // flat-boundary expansion exponent, in (0, 1)
    double C1 = 1.0;                    // flat-boundary approximation constant
    double C2 = 1.0;                    // flat-boundary slope constant
    double C3 = 1.0;                    // sup-norm (ABP-type) constant
    std::function<double(double)> K;    // scale-drift bound K(eta) >= 1
    Modulus omega = Modulus::power(1.0);  // combined modulus max(omega_domain, omega_g, omega_f)

    static ProofInputs with_constant_K(double k, Modulus m) {
        ProofInputs in;
        in.K = [k](double) { return k; };
        in.omega = std::move(m);
        in.validate();
        return in;
    }

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw PreconditionError("alpha must be in (0,1)");
        if (!(C1 > 0.0 && C2 > 0.0 && C3 > 0.0))
            throw PreconditionError("C1, C2, C3 must be positive");
        if (!K) throw PreconditionError("K(eta) must be supplied");
    }

    double K_at(double eta) const {
        const double k = K(eta);
        if (!(k >= 1.0)) throw PreconditionError("K(eta) must be >= 1");
        return k;
    }
};

struct ConstraintSlack {
    std::string name;
    double lhs = 0.0;    // quantity required to stay at or below rhs
    double rhs = 0.0;
    double slack = 0.0;  // rhs - lhs
    bool ok = false;     // slack >= -kSlackFloor
};

inline ConstraintSlack make_slack(std::string name, double lhs, double rhs) {
    ConstraintSlack s;
    s.name = std::move(name);
    s.lhs = lhs;
    s.rhs = rhs;
    s.slack = rhs - lhs;
    s.ok = s.slack >= -kSlackFloor;
    return s;
}

enum class ProofKind { Lipschitz, Hopf };

struct ProofConstants {
    ProofKind kind = ProofKind::Lipschitz;
    double alpha0 = 0.0;  // alpha / 2
    double eta = 0.0;
    double c0 = 0.0;
    double Cbar = 0.0;
    double Chat = 0.0;
    double K_eta = 1.0;
    // Hopf-only extras
    double a_tilde = 0.0;
    double c2 = 0.0;
    double delta1 = 0.0;
    double c_tilde = 0.0;
    std::vector<ConstraintSlack> slacks;
    bool feasible = false;
};

namespace detail {

/// Largest eta in (0, eta_cap] with (1 - eta^a0)(1 - eta) >= 1/2, by bisection.
inline double geometric_smallness_root(double a0, double eta_cap = 0.999999) {
    auto ok = [&](double eta) { return (1.0 - std::pow(eta, a0)) * (1.0 - eta) >= 0.5; };
    if (ok(eta_cap)) return eta_cap;
    double lo = 1e-300, hi = eta_cap;
    if (!ok(lo)) throw InfeasibleError("no eta satisfies the geometric smallness condition");
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = std::sqrt(lo * hi);  // geometric bisection: roots can be tiny
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Constant selection, boundary Lipschitz scheme
//
// Staged search in the scheme's order: eta first (largest admissible, halved
// once for margin), then c0 (same rule, with K evaluated at the chosen eta),
// then Chat (smallest admissible, doubled once for margin).
// ---------------------------------------------------------------------------

inline std::vector<ConstraintSlack> recheck_lipschitz(const ProofInputs& in,
                                                      const ProofConstants& pc) {
    const double a0 = pc.alpha0, eta = pc.eta, c0 = pc.c0, Cb = pc.Cbar, Ch = pc.Chat;
    const double K = pc.K_eta;
    std::vector<ConstraintSlack> out;
    out.push_back(make_slack("C1*eta^a0 <= 1/6", in.C1 * std::pow(eta, a0), 1.0 / 6.0));
    out.push_back(make_slack("(1-eta^a0)(1-eta) >= 1/2", 0.5,
                             (1.0 - std::pow(eta, a0)) * (1.0 - eta)));
    out.push_back(make_slack("c0 <= 1/4", c0, 0.25));
    out.push_back(make_slack("c0*K(eta) < 1/4", c0 * K, 0.25 - kSlackFloor));
    out.push_back(make_slack("C2*K(eta)*c0/eta^(1+a0) <= 1/6",
                             in.C2 * K * c0 / std::pow(eta, 1.0 + a0), 1.0 / 6.0));
    out.push_back(
        make_slack("3*c0*Cbar/eta^(1+a0) <= 1/6", 3.0 * c0 * Cb / std::pow(eta, 1.0 + a0),
                   1.0 / 6.0));
    out.push_back(make_slack("3*c0*K(eta)*Cbar/eta^a0 <= 1/3",
                             3.0 * c0 * K * Cb / std::pow(eta, a0), 1.0 / 3.0));
    out.push_back(make_slack("Chat*c0 >= 1", 1.0, Ch * c0));
    out.push_back(make_slack("(C3+1)/(Chat*eta^(1+a0)) <= 1/6",
                             (in.C3 + 1.0) / (Ch * std::pow(eta, 1.0 + a0)), 1.0 / 6.0));
    const double cbar_def = in.C2 / std::pow(eta, a0);
    out.push_back(make_slack("Cbar = C2/eta^a0 (definition)",
                             std::abs(Cb - cbar_def) / std::max(1.0, cbar_def), kSlackFloor));
    return out;
}

inline ProofConstants select_constants_lipschitz(const ProofInputs& in) {
    in.validate();
    ProofConstants pc;
    pc.kind = ProofKind::Lipschitz;
    pc.alpha0 = in.alpha / 2.0;

    const double eta_c1 = std::pow(1.0 / (6.0 * in.C1), 1.0 / pc.alpha0);
    const double eta_geom = detail::geometric_smallness_root(pc.alpha0);
    pc.eta = 0.5 * std::min({eta_c1, eta_geom, 0.999999});
    if (!(pc.eta > 0.0)) throw InfeasibleError("eta selection collapsed to zero");

    pc.K_eta = in.K_at(pc.eta);
    pc.Cbar = in.C2 / std::pow(pc.eta, pc.alpha0);

    const double b_quarter = 0.25;
    const double b_K = 0.25 / pc.K_eta;
    const double b_vK = std::pow(pc.eta, 1.0 + pc.alpha0) / (6.0 * in.C2 * pc.K_eta);
    const double b_w = std::pow(pc.eta, 1.0 + pc.alpha0) / (18.0 * pc.Cbar);
    const double b_drift = std::pow(pc.eta, pc.alpha0) / (9.0 * pc.K_eta * pc.Cbar);
    pc.c0 = 0.5 * std::min({b_quarter, b_K, b_vK, b_w, b_drift});
    if (!(pc.c0 > 0.0)) throw InfeasibleError("c0 selection collapsed to zero");

    pc.Chat = 2.0 * std::max(1.0 / pc.c0,
                             6.0 * (in.C3 + 1.0) / std::pow(pc.eta, 1.0 + pc.alpha0));

    pc.slacks = recheck_lipschitz(in, pc);
    pc.feasible = std::all_of(pc.slacks.begin(), pc.slacks.end(),
                              [](const ConstraintSlack& s) { return s.ok; });
    if (!pc.feasible) throw InfeasibleError("selected Lipschitz constants failed the recheck");
    return pc;
}

// ---------------------------------------------------------------------------
// Constant selection, Hopf scheme (eta, then Chat, then c0 last)
// ---------------------------------------------------------------------------

inline std::vector<ConstraintSlack> recheck_hopf(const ProofInputs& in,
                                                 const ProofConstants& pc) {
    const double a0 = pc.alpha0, eta = pc.eta, c0 = pc.c0, Cb = pc.Cbar, Ch = pc.Chat;
    const double K = pc.K_eta;
    std::vector<ConstraintSlack> out;
    out.push_back(make_slack("eta <= delta1", eta, pc.delta1));
    out.push_back(make_slack("C1*eta^a0 <= 1/6", in.C1 * std::pow(eta, a0), 1.0 / 6.0));
    out.push_back(make_slack("(1-eta^a0)(1-eta) >= 1/2", 0.5,
                             (1.0 - std::pow(eta, a0)) * (1.0 - eta)));
    out.push_back(make_slack("c0 <= 1/4", c0, 0.25));
    out.push_back(make_slack("(K(eta)+1)/(Chat*eta^a0) <= 1/3",
                             (K + 1.0) / (Ch * std::pow(eta, a0)), 1.0 / 3.0));
    out.push_back(make_slack("3*c0*Cbar*Chat <= a_tilde/2", 3.0 * c0 * Cb * Ch,
                             pc.a_tilde / 2.0));
    out.push_back(make_slack("C2*c0*K(eta)/eta <= 1/6", in.C2 * c0 * K / eta, 1.0 / 6.0));
    const double cbar_def = in.C2 / std::pow(eta, 1.0 + a0);
    out.push_back(make_slack("Cbar = C2/eta^(1+a0) (definition)",
                             std::abs(Cb - cbar_def) / std::max(1.0, cbar_def), kSlackFloor));
    return out;
}

/// delta1 and c2 come from the box barrier scenario (or are supplied); the
/// linear-growth coefficient a_tilde is set to c2.
inline ProofConstants select_constants_hopf(const ProofInputs& in, double delta1, double c2) {
    in.validate();
    if (!(delta1 > 0.0 && c2 > 0.0))
        throw PreconditionError("select_constants_hopf needs delta1, c2 > 0");
    ProofConstants pc;
    pc.kind = ProofKind::Hopf;
    pc.alpha0 = in.alpha / 2.0;
    pc.delta1 = delta1;
    pc.c2 = c2;
    pc.a_tilde = c2;

    const double eta_c1 = std::pow(1.0 / (6.0 * in.C1), 1.0 / pc.alpha0);
    const double eta_geom = detail::geometric_smallness_root(pc.alpha0);
    pc.eta = 0.5 * std::min({eta_c1, eta_geom, delta1, 0.999999});
    if (!(pc.eta > 0.0)) throw InfeasibleError("eta selection collapsed to zero");

    pc.K_eta = in.K_at(pc.eta);
    pc.Cbar = in.C2 / std::pow(pc.eta, 1.0 + pc.alpha0);
    pc.Chat = 2.0 * 3.0 * (pc.K_eta + 1.0) / std::pow(pc.eta, pc.alpha0);

    const double b_quarter = 0.25;
    const double b_sum = pc.a_tilde / (6.0 * pc.Cbar * pc.Chat);
    const double b_drift = pc.eta / (6.0 * in.C2 * pc.K_eta);
    pc.c0 = 0.5 * std::min({b_quarter, b_sum, b_drift});
    if (!(pc.c0 > 0.0)) throw InfeasibleError("c0 selection collapsed to zero");

    pc.slacks = recheck_hopf(in, pc);
    pc.feasible = std::all_of(pc.slacks.begin(), pc.slacks.end(),
                              [](const ConstraintSlack& s) { return s.ok; });
    if (!pc.feasible) throw InfeasibleError("selected Hopf constants failed the recheck");
    return pc;
}

// ---------------------------------------------------------------------------
// Scale sequence A_k and its summability bound
// ---------------------------------------------------------------------------

struct ScaleSequence {
    double eta = 0.0, alpha0 = 0.0, c0 = 0.0;
    double rescale_r1 = 1.0;  // radius normalized to 1 (when normalized)
    bool normalized = true;
    std::vector<double> A;             // A_0 .. A_kmax
    std::vector<double> a;             // optional affine coefficients a_k
    std::vector<double> omega_at;      // omega(eta^k) in the working coordinates
    std::vector<double> partial_sums;  // running sums of A
    bool proviso_holds = false;        // (1 - eta^a0)(1 - eta) >= 1/2
    double sum_bound = 0.0;            // 3 c0
    bool sum_within_bound = false;     // meaningful only when proviso_holds

    /// Attach an affine-coefficient sequence, enforcing a_0 = 0 and the
    /// per-step increment bound |a_k - a_{k-1}| <= cap_factor * A_k
    /// (cap_factor = Cbar * Chat * M).
    void attach_coefficients(std::vector<double> coeffs, double cap_factor) {
        if (coeffs.size() > A.size())
            throw PreconditionError("coefficient sequence longer than the scale sequence");
        double prev = 0.0;
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            if (std::abs(coeffs[k] - prev) > cap_factor * A[k] + kSlackFloor)
                throw PreconditionError("coefficient increment violates the A_k cap");
            prev = coeffs[k];
        }
        a = std::move(coeffs);
    }
};

/// A_0 = c0, A_k = max(omega(eta^k), eta^a0 A_{k-1}).  With normalize = true
/// the modulus is first rescaled so that its smallness radius for c0 becomes
/// 1; with false it is evaluated at the raw scales eta^k * R (grid-facing
/// sanity checks).
inline ScaleSequence scale_sequence(const Modulus& m, double eta, double alpha0, double c0,
                                    int k_max, bool normalize = true) {
    if (!(eta > 0.0 && eta < 1.0)) throw PreconditionError("scale_sequence needs eta in (0,1)");
    if (!(alpha0 > 0.0 && alpha0 < 1.0))
        throw PreconditionError("scale_sequence needs alpha0 in (0,1)");
    if (!(c0 > 0.0)) throw PreconditionError("scale_sequence needs c0 > 0");
    if (k_max < 0) throw PreconditionError("scale_sequence needs k_max >= 0");

    ScaleSequence seq;
    seq.eta = eta;
    seq.alpha0 = alpha0;
    seq.c0 = c0;
    seq.normalized = normalize;
    seq.sum_bound = 3.0 * c0;
    seq.proviso_holds = (1.0 - std::pow(eta, alpha0)) * (1.0 - eta) >= 0.5;

    const double log_eta = -std::log(eta);  // positive
    double t_shift;                         // omega argument is exp(-(k*log_eta + t_shift))
    if (normalize) {
        t_shift = rescale_radius_log(m, c0);
        seq.rescale_r1 = std::exp(-t_shift);  // may underflow; t_shift is what matters
    } else {
        seq.rescale_r1 = m.radius();
        t_shift = -std::log(m.radius());
    }

    double prev = c0;
    double sum = 0.0;
    for (int k = 0; k <= k_max; ++k) {
        const double w = m.eval_log(k * log_eta + t_shift);
        seq.omega_at.push_back(w);
        const double Ak = k == 0 ? c0 : std::max(w, std::pow(eta, alpha0) * prev);
        seq.A.push_back(Ak);
        prev = Ak;
        sum += Ak;
        seq.partial_sums.push_back(sum);
    }
    seq.sum_within_bound = seq.proviso_holds && sum <= seq.sum_bound + kSlackFloor;
    return seq;
}

// ---------------------------------------------------------------------------
// Grid-facing check of the per-scale induction inequality
// ---------------------------------------------------------------------------

struct InductionRow {
    int k = 0;
    double r = 0.0;      // scale eta^k * R
    double A_k = 0.0;
    double a_k = 0.0;    // fitted affine coefficient
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;  // >= 0 means the inequality holds at this scale
    bool skipped = false;
    std::string note;
};

struct InductionReport {
    ProofKind kind = ProofKind::Lipschitz;
    double M = 1.0;
    std::vector<InductionRow> rows;
    bool all_checked_pass = false;
};

/// Check the per-scale affine-approximation inequality on a solved field,
/// using the certificate's frames:
///   Lipschitz:  sup_{Omega ∩ B_{r_k}} (u - a_k n_k . x) <= Chat M r_k A_k
///   Hopf:       inf over Omega ∩ B_{r_{k+1}} ∩ {x . n_{k+1} > 0} of
///               (u - (a_tilde - a_k) n_k . x) >= -Chat r_k A_k
/// a_k is fitted greedily per scale with increments clamped to Cbar Chat M A_k.
/// A numerical sanity check, not a proof.
inline InductionReport verify_induction(const GridFunction& u, const GridDomain& dom,
                                        const ReifenbergCertificate& cert,
                                        const ProofConstants& pc, const ScaleSequence& seq,
                                        ProofKind mode, double M) {
    if (!(M > 0.0)) throw PreconditionError("verify_induction needs M > 0");
    InductionReport rep;
    rep.kind = mode;
    rep.M = M;

    const int k_top = std::min(static_cast<int>(cert.frames.size()) - 1,
                               static_cast<int>(seq.A.size()) - 1);
    double a_prev = 0.0;
    bool all_pass = true;

    for (int k = 0; k <= k_top; ++k) {
        InductionRow row;
        row.k = k;
        row.A_k = seq.A[k];
        const double r_k = cert.frames[k].scale;
        row.r = r_k;

        const bool hopf = mode == ProofKind::Hopf;
        if (hopf && k + 1 > k_top) {
            row.skipped = true;
            row.note = "no frame at scale k+1";
            rep.rows.push_back(row);
            continue;
        }
        const double r_region = hopf ? cert.frames[k + 1].scale : r_k;
        if (r_region < 3.0 * dom.h) {
            row.skipped = true;
            row.note = "scale below 3h";
            rep.rows.push_back(row);
            continue;
        }

        const Vec2 n_k = cert.frames[k].normal;
        const Vec2 n_region = hopf ? cert.frames[k + 1].normal : n_k;
        std::vector<std::pair<double, double>> samples;  // (n_k . x, u)
        for (auto [i, j] : dom.inside_nodes) {
            const Vec2 p = dom.pos(i, j);
            if (p.norm() > r_region) continue;
            if (hopf && p.dot(n_region) <= 0.0) continue;
            samples.emplace_back(p.dot(n_k), u.at(i, j));
        }
        if (samples.empty()) {
            row.skipped = true;
            row.note = "no grid nodes in the region";
            rep.rows.push_back(row);
            continue;
        }

        const double cap = pc.Cbar * pc.Chat * M * seq.A[k];
        double a_lo = std::max(0.0, a_prev - cap);
        double a_hi = a_prev + cap;
        if (hopf) a_hi = std::min(a_hi, pc.a_tilde / 2.0);
        if (a_hi < a_lo) a_hi = a_lo;

        // fit the affine coefficient by minimum absolute deviation (the raw
        // one-sided sup is monotone in a and would run to the clamp), then
        // report the one-sided quantity the inequality controls
        if (!hopf) {
            auto dev_at = [&](double a) {
                double s = 0.0;
                for (const auto& [nx, uv] : samples) s = std::max(s, std::abs(uv - a * nx));
                return s;
            };
            const double a_k = golden_min(dev_at, a_lo, a_hi, 120);
            double sup = -kInf;
            for (const auto& [nx, uv] : samples) sup = std::max(sup, uv - a_k * nx);
            row.a_k = a_k;
            row.lhs = sup;
            row.rhs = pc.Chat * M * r_k * seq.A[k];
            row.slack = row.rhs - row.lhs;
        } else {
            auto dev_at = [&](double a) {
                double s = 0.0;
                for (const auto& [nx, uv] : samples)
                    s = std::max(s, std::abs(uv - (pc.a_tilde - a) * nx));
                return s;
            };
            const double a_k = golden_min(dev_at, a_lo, a_hi, 120);
            double inf = kInf;
            for (const auto& [nx, uv] : samples)
                inf = std::min(inf, uv - (pc.a_tilde - a_k) * nx);
            row.a_k = a_k;
            row.lhs = inf;
            row.rhs = -pc.Chat * r_k * seq.A[k];
            row.slack = row.lhs - row.rhs;
        }
        a_prev = row.a_k;
        if (row.slack < 0.0) all_pass = false;
        rep.rows.push_back(row);
    }
    rep.all_checked_pass = all_pass;
    return rep;
}

}  // namespace ellab
