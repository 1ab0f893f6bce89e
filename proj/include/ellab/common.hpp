#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ellab {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

/// Base class for all failures raised by the lab.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Argument lies outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

/// A declared precondition does not hold.
struct PreconditionError : Error {
    using Error::Error;
};

/// Discretized domain is empty or disconnected at the requested resolution.
struct DegenerateDomainError : Error {
    using Error::Error;
};

/// Requested scale is below what the grid can resolve.
struct ResolutionError : Error {
    using Error::Error;
};

/// A probe ray or interpolation stencil leaves the region where values exist.
struct GeometryError : Error {
    using Error::Error;
};

/// Stencil reaches past the padded grid; boundary values are missing.
struct NeedsBoundaryError : Error {
    using Error::Error;
};

/// Iterative solve exhausted its sweep budget.
struct NonconvergenceError : Error {
    NonconvergenceError(const std::string& msg, std::vector<double> history)
        : Error(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

/// Constraint system admits no solution for the given inputs.
struct InfeasibleError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Small planar vector
// ---------------------------------------------------------------------------

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }

    Vec2 normalized() const {
        const double n = norm();
        if (n == 0.0) throw DomainError("cannot normalize zero vector");
        return {x / n, y / n};
    }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

inline Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline Vec2 unit_from_angle(double phi) { return {std::cos(phi), std::sin(phi)}; }

// ---------------------------------------------------------------------------
// Scalar helpers
// ---------------------------------------------------------------------------

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double pos_part(double v) { return v > 0.0 ? v : 0.0; }
inline double neg_part(double v) { return v < 0.0 ? v : 0.0; }  // signed: min(v, 0)

/// Golden-section minimizer for a continuous scalar function on [lo, hi].
/// Assumes the function is unimodal on the bracket (or nearly so); returns
/// the abscissa of the best point seen.
template <class F>
double golden_min(F&& f, double lo, double hi, int iters = 120) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && (b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc < fd ? c : d;
}

/// Least-squares straight line y = intercept + slope * x.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
};

inline LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw PreconditionError("fit_line needs at least two matched samples");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) throw DomainError("fit_line: degenerate abscissas");
    LineFit out;
    out.slope = (n * sxy - sx * sy) / det;
    out.intercept = (sy - out.slope * sx) / n;
    return out;
}

/// 24-point Gauss-Legendre nodes/weights on [-1, 1].
struct GaussLegendre24 {
    static const std::vector<double>& nodes() {
        static const std::vector<double> x = {
            -0.9951872199970213, -0.9747285559713095, -0.9382745520027328,
            -0.8864155270044011, -0.8200019859739029, -0.7401241915785544,
            -0.6480936519369755, -0.5454214713888396, -0.4337935076260451,
            -0.3150426796961634, -0.1911188674736163, -0.0640568928626056,
            0.0640568928626056,  0.1911188674736163,  0.3150426796961634,
            0.4337935076260451,  0.5454214713888396,  0.6480936519369755,
            0.7401241915785544,  0.8200019859739029,  0.8864155270044011,
            0.9382745520027328,  0.9747285559713095,  0.9951872199970213};
        return x;
    }
    static const std::vector<double>& weights() {
        static const std::vector<double> w = {
            0.0123412297999872, 0.0285313886289337, 0.0442774388174198,
            0.0592985849154368, 0.0733464814110803, 0.0861901615319533,
            0.0976186521041139, 0.1074442701159656, 0.1155056680537256,
            0.1216704729278034, 0.1258374563468283, 0.1279381953467522,
            0.1279381953467522, 0.1258374563468283, 0.1216704729278034,
            0.1155056680537256, 0.1074442701159656, 0.0976186521041139,
            0.0861901615319533, 0.0733464814110803, 0.0592985849154368,
            0.0442774388174198, 0.0285313886289337, 0.0123412297999872};
        return w;
    }
};

/// Integrate a smooth function over [a, b] with one 24-point panel.
template <class F>
double gauss_panel(F&& f, double a, double b) {
    const auto& xs = GaussLegendre24::nodes();
    const auto& ws = GaussLegendre24::weights();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) acc += ws[i] * f(mid + half * xs[i]);
    return acc * half;
}

}  // namespace ellab
