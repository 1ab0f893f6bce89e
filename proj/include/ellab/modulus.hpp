#pragma once

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ellab/common.hpp"

namespace ellab {

// ---------------------------------------------------------------------------
// Modulus of continuity omega(r), nondecreasing and nonnegative on (0, R].
//
// All quadrature against 1/r weights runs in log coordinates t = -ln r, so
// the integrand omega(e^{-t}) stays evaluable far below the smallest radius
// representable as a double.
// ---------------------------------------------------------------------------

class Modulus {
  public:
    enum class Family { Power, InvLogSq, InvLog, Table, MaxOf, Scaled };

    /// omega(r) = r^exponent on (0, radius].
    static Modulus power(double exponent, double radius = 1.0) {
        if (!(exponent > 0.0)) throw DomainError("power modulus needs exponent > 0");
        check_radius(radius);
        Modulus m(Family::Power, radius);
        m.param_ = exponent;
        return m;
    }

    /// omega(r) = 1 / ln^2 r, defined for r in (0, 1).
    static Modulus inv_log_sq(double radius = 0.5) {
        if (!(radius > 0.0 && radius < 1.0))
            throw DomainError("inv_log_sq modulus needs radius in (0, 1)");
        return Modulus(Family::InvLogSq, radius);
    }

    /// omega(r) = 1 / |ln r|, defined for r in (0, 1).  Not Dini.
    static Modulus inv_log(double radius = 0.5) {
        if (!(radius > 0.0 && radius < 1.0))
            throw DomainError("inv_log modulus needs radius in (0, 1)");
        return Modulus(Family::InvLog, radius);
    }

    /// Piecewise-linear table (r_i, w_i); radii strictly increasing, values
    /// nondecreasing.  Below the first knot the value drops linearly to 0.
    static Modulus table(std::vector<std::pair<double, double>> knots) {
        if (knots.empty()) throw DomainError("table modulus needs at least one knot");
        for (std::size_t i = 0; i < knots.size(); ++i) {
            if (!(knots[i].first > 0.0)) throw DomainError("table radii must be positive");
            if (!(knots[i].second >= 0.0)) throw DomainError("table values must be nonnegative");
            if (i > 0) {
                if (!(knots[i].first > knots[i - 1].first))
                    throw DomainError("table radii must be strictly increasing");
                if (!(knots[i].second >= knots[i - 1].second))
                    throw DomainError("table values must be nondecreasing");
            }
        }
        Modulus m(Family::Table, knots.back().first);
        m.knots_ = std::move(knots);
        return m;
    }

    static Modulus zero(double radius = 1.0) { return table({{radius, 0.0}}); }

    /// Pointwise maximum of the parts, on the smallest common radius.
    static Modulus max_of(std::vector<Modulus> parts) {
        if (parts.empty()) throw DomainError("max_of needs at least one part");
        double radius = parts.front().radius();
        for (const auto& p : parts) radius = std::min(radius, p.radius());
        Modulus m(Family::MaxOf, radius);
        m.parts_ = std::move(parts);
        return m;
    }

    /// factor * base(r).
    static Modulus scaled(Modulus base, double factor) {
        if (!(factor > 0.0)) throw DomainError("scaled modulus needs factor > 0");
        Modulus m(Family::Scaled, base.radius());
        m.param_ = factor;
        m.parts_.push_back(std::move(base));
        return m;
    }

    /// Two-column CSV (radius, value); '#' lines are comments.
    static Modulus from_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open modulus CSV: " + path);
        std::vector<std::pair<double, double>> knots;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            double r, w;
            if (!(row >> r >> w)) throw DomainError("bad modulus CSV row: " + line);
            knots.emplace_back(r, w);
        }
        return table(std::move(knots));
    }

    Family family() const { return family_; }
    double radius() const { return radius_; }

    /// omega(r) for r in (0, R].
    double eval(double r) const {
        if (!(r > 0.0) || r > radius_ * (1.0 + 1e-12))
            throw DomainError("modulus evaluated outside (0, R]");
        return eval_log(-std::log(r));
    }

    /// omega(e^{-t}), valid for all t >= -ln R.  Stays finite/evaluable for
    /// arbitrarily large t (arbitrarily small radii).
    double eval_log(double t) const {
        switch (family_) {
            case Family::Power:
                return std::exp(-param_ * t);
            case Family::InvLogSq:
                return 1.0 / (t * t);
            case Family::InvLog:
                return 1.0 / t;
            case Family::Table: {
                const double t1 = -std::log(knots_.front().first);
                if (t > t1) {
                    // linear ramp to 0 below the first knot: w1 * r / r1
                    return knots_.front().second * std::exp(t1 - t);
                }
                const double r = std::exp(-t);
                auto it = std::lower_bound(
                    knots_.begin(), knots_.end(), r,
                    [](const std::pair<double, double>& k, double v) { return k.first < v; });
                if (it == knots_.begin()) return knots_.front().second;
                if (it == knots_.end()) return knots_.back().second;
                const auto& [rb, wb] = *it;
                const auto& [ra, wa] = *(it - 1);
                const double u = (r - ra) / (rb - ra);
                return wa + u * (wb - wa);
            }
            case Family::MaxOf: {
                double v = 0.0;
                for (const auto& p : parts_) v = std::max(v, p.eval_log(t));
                return v;
            }
            case Family::Scaled:
                return param_ * parts_.front().eval_log(t);
        }
        throw Error("unreachable modulus family");
    }

    std::string describe() const {
        switch (family_) {
            case Family::Power: {
                std::ostringstream os;
                os << "power(" << param_ << ")";
                return os.str();
            }
            case Family::InvLogSq:
                return "inv_log_sq";
            case Family::InvLog:
                return "inv_log";
            case Family::Table: {
                std::ostringstream os;
                os << "table[" << knots_.size() << "]";
                return os.str();
            }
            case Family::MaxOf: {
                std::string s = "max_of[";
                for (std::size_t i = 0; i < parts_.size(); ++i)
                    s += (i ? "," : "") + parts_[i].describe();
                return s + "]";
            }
            case Family::Scaled: {
                std::ostringstream os;
                os << "scaled(" << parts_.front().describe() << "," << param_ << ")";
                return os.str();
            }
        }
        return "?";
    }

    const std::vector<std::pair<double, double>>& knots() const { return knots_; }
    double param() const { return param_; }
    const std::vector<Modulus>& parts() const { return parts_; }

  private:
    Modulus(Family f, double radius) : family_(f), radius_(radius) {}

    static void check_radius(double r) {
        if (!(r > 0.0)) throw DomainError("modulus radius must be positive");
    }

    Family family_;
    double radius_;
    double param_ = 0.0;  // exponent (Power) or factor (Scaled)
    std::vector<std::pair<double, double>> knots_;
    std::vector<Modulus> parts_;
};

// ---------------------------------------------------------------------------
// Dini condition: integral of omega(r)/r dr near r = 0
// ---------------------------------------------------------------------------

struct DiniVerdict {
    bool is_dini = false;
    /// Converged integral estimate, or the accumulated lower bound when the
    /// growth test fires.
    double integral_estimate = 0.0;
    /// Deepest cutoff epsilon reached (may underflow to 0; see log_cutoff).
    double cutoff_used = 0.0;
    double log_cutoff = 0.0;  // -ln(cutoff_used), always finite
    /// Divergence witness: integral(eps_lo) - integral(eps_hi) = growth > threshold,
    /// with eps_hi > eps_lo.
    double witness_eps_hi = 0.0;
    double witness_eps_lo = 0.0;
    double witness_growth = 0.0;
};

namespace detail {

/// Integral of omega(e^{-t}) over [ta, tb] by composite Gauss panels.  The
/// subpanel count is capped: long stretches only occur deep in the tail where
/// every family is smooth, and there 24-point panels converge spectrally.
inline double log_integral(const Modulus& m, double ta, double tb) {
    if (tb <= ta) return 0.0;
    const int n = std::clamp(static_cast<int>(std::ceil((tb - ta) / 0.5)), 4, 64);
    double acc = 0.0;
    const double step = (tb - ta) / n;
    for (int i = 0; i < n; ++i)
        acc += gauss_panel([&](double t) { return m.eval_log(t); }, ta + i * step,
                           ta + (i + 1) * step);
    return acc;
}

}  // namespace detail

/// Integral of omega(r)/r dr over [a, b], 0 < a <= b <= R.
inline double dini_integral_between(const Modulus& m, double a, double b) {
    if (!(a > 0.0) || !(b >= a) || b > m.radius() * (1.0 + 1e-12))
        throw DomainError("dini_integral_between needs 0 < a <= b <= R");
    return detail::log_integral(m, -std::log(b), -std::log(a));
}

/// Classify the Dini condition for omega by adaptive deepening of the cutoff.
///
/// The cutoff sequence is geometric in t = -ln(eps).  Convergent: one panel
/// contributes less than tol.  Divergent: the integral grows by more than 1.0
/// between cutoffs t_a and t_b >= 100 t_a with eps_a below 1e-6 (two decades
/// of log-cutoff beyond 1e-6).
inline DiniVerdict dini_integral(const Modulus& m, double r0, double tol) {
    if (!(r0 > 0.0) || r0 > m.radius() * (1.0 + 1e-12))
        throw DomainError("dini_integral needs r0 in (0, R]");
    if (!(tol > 0.0)) throw DomainError("dini_integral needs tol > 0");

    constexpr double kGrowthThreshold = 1.0;
    const double t_watch = -std::log(1e-6);

    const double t0 = -std::log(r0);
    double t_end = std::max(t0 + 0.5, t0 * (t0 > 0 ? 1.0625 : 1.0));
    double len = t_end - t0;

    std::vector<std::pair<double, double>> history;  // (t, I(t))
    double total = detail::log_integral(m, t0, t_end);
    history.emplace_back(t_end, total);

    DiniVerdict v;
    for (int panel = 0; panel < 200; ++panel) {
        // Divergence scan against the earliest eligible record.
        for (const auto& [ta, Ia] : history) {
            if (ta >= t_watch && t_end >= 100.0 * ta && total - Ia > kGrowthThreshold) {
                v.is_dini = false;
                v.integral_estimate = total;
                v.cutoff_used = std::exp(-t_end);
                v.log_cutoff = t_end;
                v.witness_eps_hi = std::exp(-ta);
                v.witness_eps_lo = std::exp(-t_end);
                v.witness_growth = total - Ia;
                return v;
            }
        }
        len *= 2.0;
        const double t_next = t_end + len;
        const double contribution = detail::log_integral(m, t_end, t_next);
        total += contribution;
        t_end = t_next;
        history.emplace_back(t_end, total);
        if (contribution < tol && t_end >= t_watch) {
            v.is_dini = true;
            v.integral_estimate = total;
            v.cutoff_used = std::exp(-t_end);
            v.log_cutoff = t_end;
            return v;
        }
    }
    throw Error("dini_integral: classification did not terminate (modulus decays too slowly "
                "for the requested tol)");
}

/// Tail integral of omega(s)/s over (0, e^{-t0}], working purely in log
/// coordinates so radii far below double range stay reachable.
inline double dini_tail_log(const Modulus& m, double t0, double accuracy) {
    double t_end = std::max(t0 + 0.5, t0 * (t0 > 0 ? 1.0625 : 1.0));
    double len = t_end - t0;
    double total = detail::log_integral(m, t0, t_end);
    const double tol = std::max(accuracy * 1e-6, 1e-16);
    for (int panel = 0; panel < 200; ++panel) {
        len *= 2.0;
        const double c = detail::log_integral(m, t_end, t_end + len);
        t_end += len;
        total += c;
        if (c < tol) return total;
        if (total > 1e6) return kInf;
    }
    return total;
}

inline double dini_tail(const Modulus& m, double r, double accuracy) {
    if (!(r > 0.0)) throw DomainError("dini_tail needs r > 0");
    return dini_tail_log(m, -std::log(r), accuracy);
}

/// -ln r1 for the largest r1 <= R with omega(r1) <= c0 and tail integral over
/// (0, r1] <= c0.  The log form stays meaningful when r1 underflows doubles
/// (slowly decaying moduli with small c0).
inline double rescale_radius_log(const Modulus& m, double c0) {
    if (!(c0 > 0.0)) throw DomainError("rescale_radius needs c0 > 0");
    if (!dini_integral(m, m.radius(), std::max(1e-12, 1e-6 * c0)).is_dini)
        throw PreconditionError("rescale_radius: modulus is not Dini");

    auto admissible = [&](double t) {
        return m.eval_log(t) <= c0 && dini_tail_log(m, t, c0) <= c0;
    };

    const double tR = -std::log(m.radius());
    if (admissible(tR)) return tR;

    // March outward to bracket, then bisect; |dt| tolerance 1e-9 equals the
    // requested relative tolerance in r (floored at the double resolution of
    // t itself when the admissible radius lies absurdly deep).
    double t_lo = tR, t_hi = tR + 1.0;
    double step = 1.0;
    while (!admissible(t_hi)) {
        t_lo = t_hi;
        step *= 2.0;
        t_hi += step;
        if (t_hi > 1e15) throw Error("rescale_radius: no admissible radius found");
    }
    const double dt_tol =
        std::max(1e-9, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(t_hi));
    for (int it = 0; it < 200 && t_hi - t_lo > dt_tol; ++it) {
        const double mid = 0.5 * (t_lo + t_hi);
        (admissible(mid) ? t_hi : t_lo) = mid;
    }
    return t_hi;
}

/// Largest r1 <= R with omega(r1) <= c0 and the tail integral over (0, r1]
/// also <= c0.  This is the radius both scale iterations normalize to 1.
/// May underflow to 0 for extreme inputs; rescale_radius_log never does.
inline double rescale_radius(const Modulus& m, double c0) {
    return std::exp(-rescale_radius_log(m, c0));
}

}  // namespace ellab
