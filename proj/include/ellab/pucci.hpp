#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ellab/common.hpp"

namespace ellab {

// ---------------------------------------------------------------------------
// Uniform ellipticity window [lambda, Lambda]
// ---------------------------------------------------------------------------

struct Ellipticity {
    double lambda = 1.0;
    double Lambda = 1.0;

    Ellipticity(double lam, double Lam) : lambda(lam), Lambda(Lam) {
        if (!(lambda > 0.0) || !(Lambda >= lambda))
            throw DomainError("ellipticity needs 0 < lambda <= Lambda");
    }
};

// ---------------------------------------------------------------------------
// Dense symmetric matrix, upper triangle stored
// ---------------------------------------------------------------------------

class SymMat {
  public:
    explicit SymMat(int n) : n_(n), a_(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0) {
        if (n < 1) throw DomainError("SymMat needs n >= 1");
    }

    static SymMat diag(const std::vector<double>& d) {
        SymMat m(static_cast<int>(d.size()));
        for (int i = 0; i < m.n_; ++i) m.set(i, i, d[i]);
        return m;
    }

    /// 2x2 matrix R(angle) * diag(d0, d1) * R(angle)^T.
    static SymMat rotated2(double d0, double d1, double angle) {
        const double c = std::cos(angle), s = std::sin(angle);
        SymMat m(2);
        m.set(0, 0, d0 * c * c + d1 * s * s);
        m.set(1, 1, d0 * s * s + d1 * c * c);
        m.set(0, 1, (d0 - d1) * s * c);
        return m;
    }

    int n() const { return n_; }

    double operator()(int i, int j) const { return a_[index(i, j)]; }
    void set(int i, int j, double v) { a_[index(i, j)] = v; }

    double trace() const {
        double t = 0.0;
        for (int i = 0; i < n_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs_eigenvalue() const {
        double m = 0.0;
        for (double e : eigenvalues()) m = std::max(m, std::abs(e));
        return m;
    }

    SymMat operator+(const SymMat& o) const {
        if (o.n_ != n_) throw DomainError("SymMat size mismatch");
        SymMat r = *this;
        for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] += o.a_[k];
        return r;
    }

    SymMat operator*(double s) const {
        SymMat r = *this;
        for (double& v : r.a_) v *= s;
        return r;
    }

    SymMat operator-() const { return (*this) * -1.0; }

    /// Eigenvalues, ascending.  2x2 closed form; cyclic Jacobi otherwise.
    std::vector<double> eigenvalues() const {
        if (n_ == 1) return {(*this)(0, 0)};
        if (n_ == 2) {
            const double a = (*this)(0, 0), b = (*this)(0, 1), d = (*this)(1, 1);
            const double mean = 0.5 * (a + d);
            const double disc = std::hypot(0.5 * (a - d), b);
            return {mean - disc, mean + disc};
        }
        return jacobi_eigenvalues();
    }

  private:
    std::size_t index(int i, int j) const {
        if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DomainError("SymMat index out of range");
        if (i > j) std::swap(i, j);
        // row-major upper triangle: i*n - i(i-1)/2 + (j - i)
        return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2 +
               static_cast<std::size_t>(j - i);
    }

    std::vector<double> jacobi_eigenvalues() const {
        const int n = n_;
        std::vector<double> a(static_cast<std::size_t>(n) * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a[i * n + j] = (*this)(std::min(i, j), std::max(i, j));
        for (int sweep = 0; sweep < 100; ++sweep) {
            double off = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
            if (off < 1e-30) break;
            for (int p = 0; p < n; ++p) {
                for (int q = p + 1; q < n; ++q) {
                    const double apq = a[p * n + q];
                    if (std::abs(apq) < 1e-300) continue;
                    const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    const double t = (theta >= 0 ? 1.0 : -1.0) /
                                     (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    for (int k = 0; k < n; ++k) {
                        const double akp = a[k * n + p], akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for (int k = 0; k < n; ++k) {
                        const double apk = a[p * n + k], aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        std::vector<double> ev(n);
        for (int i = 0; i < n; ++i) ev[i] = a[i * n + i];
        std::sort(ev.begin(), ev.end());
        return ev;
    }

    int n_;
    std::vector<double> a_;
};

// ---------------------------------------------------------------------------
// Extremal operators: envelopes of tr(A M) over spectra in [lambda, Lambda]
// ---------------------------------------------------------------------------

inline double pucci_sup(const SymMat& M, const Ellipticity& e) {
    double v = 0.0;
    for (double ev : M.eigenvalues()) v += ev > 0.0 ? e.Lambda * ev : e.lambda * ev;
    return v;
}

inline double pucci_inf(const SymMat& M, const Ellipticity& e) {
    double v = 0.0;
    for (double ev : M.eigenvalues()) v += ev > 0.0 ? e.lambda * ev : e.Lambda * ev;
    return v;
}

// ---------------------------------------------------------------------------
// Wide stencils: orthogonal pairs of primitive lattice directions
// ---------------------------------------------------------------------------

struct StencilPair {
    int vx, vy;  // direction v
    int wx, wy;  // v rotated by 90 degrees
};

struct StencilSet {
    std::vector<StencilPair> pairs;
    int width = 1;

    /// Axis pair only: the classical 5-point neighborhood.
    static StencilSet axis() {
        StencilSet s;
        s.width = 1;
        s.pairs.push_back({1, 0, 0, 1});
        return s;
    }

    /// All orthogonal pairs of primitive directions with max|component| <= w.
    /// One representative per pair, chosen with angle in [0, 90) degrees, so
    /// the axis pair is always first.
    static StencilSet make(int w) {
        if (w < 1) throw DomainError("stencil width must be >= 1");
        StencilSet s;
        s.width = w;
        // One representative (a, b) per orthogonal pair, angle in [0, 90):
        // a >= 1, b >= 0, primitive.  gcd(a, 0) = a keeps only (1, 0) on the axis.
        std::vector<std::pair<double, StencilPair>> tmp;
        for (int a = 1; a <= w; ++a)
            for (int b = 0; b <= w; ++b) {
                if (std::gcd(a, b) != 1) continue;
                tmp.push_back({std::atan2(static_cast<double>(b), static_cast<double>(a)),
                               StencilPair{a, b, -b, a}});
            }
        std::sort(tmp.begin(), tmp.end(),
                  [](const auto& l, const auto& r) { return l.first < r.first; });
        for (auto& [ang, p] : tmp) s.pairs.push_back(p);
        return s;
    }

    int max_reach() const {
        int m = 0;
        for (const auto& p : pairs)
            m = std::max({m, std::abs(p.vx), std::abs(p.vy), std::abs(p.wx), std::abs(p.wy)});
        return m;
    }
};

enum class PucciMode { Sup, Inf };

/// One orthogonal pair's contribution: directional second differences pushed
/// through the eigenvalue envelope with the pair treated as an eigenframe.
inline double pucci_pair_value(double d2v, double d2w, const Ellipticity& e, PucciMode mode) {
    if (mode == PucciMode::Sup)
        return e.Lambda * pos_part(d2v) + e.lambda * neg_part(d2v) + e.Lambda * pos_part(d2w) +
               e.lambda * neg_part(d2w);
    return e.lambda * pos_part(d2v) + e.Lambda * neg_part(d2v) + e.lambda * pos_part(d2w) +
           e.Lambda * neg_part(d2w);
}

/// Monotone discrete extremal operator from second differences along each
/// stencil pair: max over pairs in Sup mode, min in Inf mode.  `value(di,dj)`
/// must return u at the node offset by (di, dj); `h` is the grid spacing.
template <class ValueFn>
double discrete_pucci_from(ValueFn&& value, double h, const Ellipticity& e, const StencilSet& S,
                           PucciMode mode) {
    if (S.pairs.empty()) throw DomainError("empty stencil");
    const double u0 = value(0, 0);
    double best = mode == PucciMode::Sup ? -kInf : kInf;
    for (const auto& p : S.pairs) {
        const double lv = static_cast<double>(p.vx) * p.vx + static_cast<double>(p.vy) * p.vy;
        const double lw = static_cast<double>(p.wx) * p.wx + static_cast<double>(p.wy) * p.wy;
        const double d2v =
            (value(p.vx, p.vy) + value(-p.vx, -p.vy) - 2.0 * u0) / (h * h * lv);
        const double d2w =
            (value(p.wx, p.wy) + value(-p.wx, -p.wy) - 2.0 * u0) / (h * h * lw);
        const double val = pucci_pair_value(d2v, d2w, e, mode);
        best = mode == PucciMode::Sup ? std::max(best, val) : std::min(best, val);
    }
    return best;
}

}  // namespace ellab
