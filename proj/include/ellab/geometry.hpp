#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ellab/common.hpp"
#include "ellab/modulus.hpp"

namespace ellab {

// ---------------------------------------------------------------------------
// Planar graph domains  Omega = B_R ∩ { y > f(x) },  f(0) = 0, optionally
// carried through a rigid rotation about the origin.
// ---------------------------------------------------------------------------

struct GraphDomain2D {
    std::function<double(double)> profile;  // f(x) on [-R, R], f(0) = 0
    double radius = 1.0;
    double rotation = 0.0;  // rigid rotation of the whole region about 0
    std::string name = "custom";

    static GraphDomain2D flat(double R = 1.0) {
        return {[](double) { return 0.0; }, R, 0.0, "flat"};
    }

    static GraphDomain2D tilted(double slope, double R = 1.0) {
        std::ostringstream nm;
        nm << "tilted(" << slope << ")";
        return {[slope](double x) { return slope * x; }, R, 0.0, nm.str()};
    }

    /// f(x) = x / ln|x| on (-1/2, 1/2): at each scale the boundary hugs the
    /// slowly rotating line y = x/ln r.
    static GraphDomain2D log_example() {
        auto f = [](double x) { return x == 0.0 ? 0.0 : x / std::log(std::abs(x)); };
        return {f, 0.5, 0.0, "log_example"};
    }

    /// f(x) = |x|^{1+alpha}: boundary touching its tangent at rate r^alpha.
    static GraphDomain2D power_cusp(double alpha, double R = 1.0) {
        if (!(alpha > 0.0)) throw DomainError("power_cusp needs alpha > 0");
        std::ostringstream nm;
        nm << "power_cusp(" << alpha << ")";
        return {[alpha](double x) { return std::pow(std::abs(x), 1.0 + alpha); }, R, 0.0,
                nm.str()};
    }

    /// Two-column CSV (x, f(x)); linear interpolation.  Must bracket x = 0
    /// with f interpolating to 0 there.
    static GraphDomain2D from_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open profile CSV: " + path);
        auto pts = std::make_shared<std::vector<std::pair<double, double>>>();
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream row(line);
            double x, y;
            if (!(row >> x >> y)) throw DomainError("bad profile CSV row: " + line);
            pts->emplace_back(x, y);
        }
        if (pts->size() < 2) throw DomainError("profile CSV needs at least two points");
        std::sort(pts->begin(), pts->end());
        if (pts->front().first > 0.0 || pts->back().first < 0.0)
            throw DomainError("profile CSV must bracket x = 0");
        auto f = [pts](double x) {
            auto it = std::lower_bound(pts->begin(), pts->end(), std::make_pair(x, -kInf));
            if (it == pts->begin()) return it->second;
            if (it == pts->end()) return (it - 1)->second;
            const auto& [xb, yb] = *it;
            const auto& [xa, ya] = *(it - 1);
            if (xb == xa) return ya;
            const double u = (x - xa) / (xb - xa);
            return ya + u * (yb - ya);
        };
        const double R = std::min(-pts->front().first, pts->back().first);
        GraphDomain2D d{f, R, 0.0, "csv"};
        if (std::abs(d.profile_at(0.0)) > 1e-9 * std::max(1.0, R))
            throw DomainError("profile CSV does not pass through the origin");
        return d;
    }

    GraphDomain2D rotated(double angle) const {
        GraphDomain2D d = *this;
        d.rotation += angle;
        d.name += "+rot";
        return d;
    }

    /// Dilation x -> s x maps the region to s * Omega.
    GraphDomain2D dilated(double s) const {
        if (!(s > 0.0)) throw DomainError("dilation factor must be positive");
        auto base = profile;
        GraphDomain2D d = *this;
        d.profile = [base, s](double x) { return s * base(x / s); };
        d.radius = s * radius;
        d.name += "+dilated";
        return d;
    }

    double profile_at(double x) const { return profile(x); }

    /// Point of the (rotated) boundary graph over parameter x.
    Vec2 curve_point(double x) const { return rotate(Vec2{x, profile(x)}, rotation); }

    bool inside(Vec2 p) const {
        if (p.norm2() >= radius * radius) return false;
        const Vec2 q = rotate(p, -rotation);
        if (std::abs(q.x) > radius) return false;
        return q.y > profile(q.x);
    }

    /// f(0) = 0 and continuity via dense sampling against a jump threshold.
    void validate(int samples = 4096) const {
        if (std::abs(profile(0.0)) > 1e-9 * std::max(1.0, radius))
            throw DomainError("graph profile must vanish at 0");
        std::vector<double> steps;
        steps.reserve(samples);
        double prev = profile(-radius);
        for (int i = 1; i <= samples; ++i) {
            const double x = -radius + 2.0 * radius * i / samples;
            const double v = profile(std::min(x, radius));
            steps.push_back(std::abs(v - prev));
            prev = v;
        }
        std::vector<double> sorted = steps;
        std::sort(sorted.begin(), sorted.end());
        const double median = sorted[sorted.size() / 2];
        const double jump = 0.02 * radius + 30.0 * median;
        for (double s : steps)
            if (s > jump) throw DomainError("graph profile fails the continuity sampling check");
    }
};

// ---------------------------------------------------------------------------
// Per-scale supporting planes
// ---------------------------------------------------------------------------

enum class Side { Exterior, Interior };

inline const char* to_string(Side s) { return s == Side::Exterior ? "exterior" : "interior"; }

/// Supporting plane through the origin at one scale: the unit normal and the
/// worst one-sided violation, measured in units of r.
struct HyperplaneFrame {
    double scale = 0.0;
    Vec2 normal{0.0, 1.0};
    double slack = 0.0;  // defect / r
};

namespace detail {

struct SampleCloud {
    std::vector<Vec2> pts;
};

/// Points of Omega ∩ B_r (exterior side) or Omega^c ∩ B_r (interior side):
/// the boundary graph itself plus a uniform fill of the region.
inline SampleCloud sample_region(const GraphDomain2D& dom, double r, Side side,
                                 int curve_samples = 4096, int fill = 128) {
    SampleCloud cloud;
    const double xmax = std::min(r, dom.radius);
    for (int i = 0; i <= curve_samples; ++i) {
        const double x = -xmax + 2.0 * xmax * i / curve_samples;
        const Vec2 p = dom.curve_point(x);
        if (p.norm() <= r) cloud.pts.push_back(p);
    }
    for (int i = 0; i <= fill; ++i) {
        for (int j = 0; j <= fill; ++j) {
            const Vec2 p{-r + 2.0 * r * i / fill, -r + 2.0 * r * j / fill};
            if (p.norm() > r) continue;
            const bool in = dom.inside(p);
            if ((side == Side::Exterior && in) || (side == Side::Interior && !in))
                cloud.pts.push_back(p);
        }
    }
    return cloud;
}

inline double defect(const SampleCloud& cloud, Vec2 n, Side side) {
    if (side == Side::Exterior) {
        double lo = kInf;
        for (const Vec2& p : cloud.pts) lo = std::min(lo, p.dot(n));
        return -lo;
    }
    double hi = -kInf;
    for (const Vec2& p : cloud.pts) hi = std::max(hi, p.dot(n));
    return hi;
}

}  // namespace detail

/// Fit the supporting plane of Omega (exterior) or Omega^c (interior) in B_r:
/// coarse sweep of `samples` normal angles, then golden-section refinement of
/// the one-sided defect.
inline HyperplaneFrame fit_supporting_plane(const GraphDomain2D& dom, double r, Side side,
                                            int samples = 512) {
    if (!(r > 0.0) || r > dom.radius * (1.0 + 1e-12))
        throw DomainError("fit_supporting_plane needs 0 < r <= R");
    if (samples < 64) throw PreconditionError("fit_supporting_plane needs samples >= 64");

    const auto cloud = detail::sample_region(dom, r, side);
    bool any_region = false;
    for (const Vec2& p : cloud.pts)
        if (side == Side::Exterior ? dom.inside(p) : true) {
            any_region = true;
            break;
        }
    if (cloud.pts.empty() || !any_region)
        throw DegenerateDomainError("no sample points for supporting-plane fit");

    auto defect_at = [&](double phi) { return detail::defect(cloud, unit_from_angle(phi), side); };

    double best_phi = 0.0, best = kInf;
    const double two_pi = 2.0 * M_PI;
    for (int i = 0; i < samples; ++i) {
        const double phi = two_pi * i / samples;
        const double d = defect_at(phi);
        if (d < best) {
            best = d;
            best_phi = phi;
        }
    }
    const double delta = two_pi / samples;
    const double phi = golden_min(defect_at, best_phi - delta, best_phi + delta, 160);
    const double refined = defect_at(phi);
    HyperplaneFrame frame;
    frame.scale = r;
    if (refined <= best) {
        frame.normal = unit_from_angle(phi);
        frame.slack = refined / r;
    } else {
        frame.normal = unit_from_angle(best_phi);
        frame.slack = best / r;
    }
    return frame;
}

// ---------------------------------------------------------------------------
// Reifenberg certificate across dyadic-type scales
// ---------------------------------------------------------------------------

struct ReifenbergCertificate {
    Side side = Side::Exterior;
    double eta_geo = 0.5;
    std::string domain_name;
    std::string modulus_name;
    std::vector<HyperplaneFrame> frames;   // scales R * eta^k, k = 0..k_max
    std::vector<double> omega_values;      // omega(r_k)
    std::vector<bool> scale_pass;          // slack_k <= omega(r_k)
    std::vector<double> drifts;            // |n_k - n_{k+1}|, size k_max
    double fitted_K = 0.0;                 // max_k drift_k / omega(r_k)
    bool pass = false;
};

/// Exact-flatness tolerance when omega(r_k) vanishes.
inline constexpr double kFlatSlackTol = 1e-9;

inline ReifenbergCertificate check_reifenberg(const GraphDomain2D& dom, const Modulus& m,
                                              Side side, double eta_geo, int k_max,
                                              int samples = 512) {
    if (!(eta_geo > 0.0 && eta_geo < 1.0))
        throw PreconditionError("check_reifenberg needs 0 < eta_geo < 1");
    if (k_max < 4) throw PreconditionError("check_reifenberg needs k_max >= 4");
    if (dom.radius > m.radius() * (1.0 + 1e-12))
        throw DomainError("modulus not defined up to the domain radius");

    ReifenbergCertificate cert;
    cert.side = side;
    cert.eta_geo = eta_geo;
    cert.domain_name = dom.name;
    cert.modulus_name = m.describe();

    for (int k = 0; k <= k_max; ++k) {
        const double r = dom.radius * std::pow(eta_geo, k);
        cert.frames.push_back(fit_supporting_plane(dom, r, side, samples));
        const double w = m.eval(r);
        cert.omega_values.push_back(w);
        const double slack = cert.frames.back().slack;
        cert.scale_pass.push_back(w > 0.0 ? slack <= w + 1e-12 : slack <= kFlatSlackTol);
    }
    double K = 0.0;
    bool K_finite = true;
    for (int k = 0; k < k_max; ++k) {
        const double drift = (cert.frames[k].normal - cert.frames[k + 1].normal).norm();
        cert.drifts.push_back(drift);
        const double w = cert.omega_values[k];
        if (w > 0.0)
            K = std::max(K, drift / w);
        else if (drift > kFlatSlackTol)
            K_finite = false;
    }
    cert.fitted_K = K_finite ? K : kInf;
    cert.pass = K_finite && std::all_of(cert.scale_pass.begin(), cert.scale_pass.end(),
                                        [](bool b) { return b; });
    return cert;
}

// ---------------------------------------------------------------------------
// Limit of the per-scale normals
// ---------------------------------------------------------------------------

struct LimitNormal {
    Vec2 normal{0.0, 1.0};
    struct TailEntry {
        int k = 0;
        double sup_difference = 0.0;  // sup_l |n_k - n_{k+l}|
        double bound = 0.0;           // fitted_K * sum_{i>=k} omega(r_i)
        bool within_bound = true;
    };
    std::vector<TailEntry> cauchy_tail;
};

inline LimitNormal limit_normal(const ReifenbergCertificate& cert) {
    if (!cert.pass) throw PreconditionError("limit_normal needs a passing certificate");
    LimitNormal out;
    out.normal = cert.frames.back().normal;
    const int k_max = static_cast<int>(cert.frames.size()) - 1;
    std::vector<double> omega_tail(k_max + 2, 0.0);
    for (int k = k_max; k >= 0; --k) omega_tail[k] = omega_tail[k + 1] + cert.omega_values[k];
    for (int k = 0; k < k_max; ++k) {
        LimitNormal::TailEntry e;
        e.k = k;
        for (int l = 1; k + l <= k_max; ++l)
            e.sup_difference = std::max(
                e.sup_difference, (cert.frames[k].normal - cert.frames[k + l].normal).norm());
        e.bound = cert.fitted_K * omega_tail[k];
        e.within_bound = e.sup_difference <= e.bound + 1e-9;
        out.cauchy_tail.push_back(e);
    }
    return out;
}

/// Drift-versus-modulus ratio K(theta) over a sweep of scale ratios; the
/// certificate itself only reports K at theta = eta_geo.
inline std::vector<std::pair<double, double>> k_theta_sweep(const GraphDomain2D& dom,
                                                            const Modulus& m, Side side,
                                                            const std::vector<double>& thetas,
                                                            int k_scales = 8, int samples = 512) {
    std::vector<std::pair<double, double>> out;
    for (double theta : thetas) {
        if (!(theta > 0.0 && theta < 1.0)) throw DomainError("theta sweep needs theta in (0,1)");
        double K = 0.0;
        for (int k = 0; k < k_scales; ++k) {
            const double r = dom.radius * std::pow(0.5, k);
            const auto a = fit_supporting_plane(dom, r, side, samples);
            const auto b = fit_supporting_plane(dom, theta * r, side, samples);
            const double w = m.eval(r);
            if (w > 0.0) K = std::max(K, (a.normal - b.normal).norm() / w);
        }
        out.emplace_back(theta, K);
    }
    return out;
}

}  // namespace ellab
