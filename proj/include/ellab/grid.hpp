#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "ellab/common.hpp"
#include "ellab/geometry.hpp"

namespace ellab {

// ---------------------------------------------------------------------------
// Continuous solve regions
// ---------------------------------------------------------------------------

struct BBox {
    double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
};

/// A region with an inside test and a nearest-boundary-point map; the grid
/// builder consumes nothing else.
class Shape {
  public:
    /// B_r ∩ {y > 0}.
    static Shape half_disc(double r) {
        if (!(r > 0.0)) throw DomainError("half_disc needs r > 0");
        Shape s;
        s.name_ = "half_disc";
        s.radius_ = r;
        s.bbox_ = {-r, r, 0.0, r};
        s.inside_ = [r](Vec2 p) { return p.y > 0.0 && p.norm2() < r * r; };
        s.nearest_ = [r](Vec2 p) { return nearest_half_disc(p, r); };
        s.on_outer_ = [r](Vec2 b) { return b.norm() > r * (1.0 - 1e-9); };
        return s;
    }

    /// Q_r ∩ {y > 0} with the side-length convention: (-r/2, r/2) x (0, r/2).
    static Shape half_cube(double r) {
        if (!(r > 0.0)) throw DomainError("half_cube needs r > 0");
        Shape s;
        s.name_ = "half_cube";
        s.radius_ = r;
        const double w = r / 2.0;
        s.bbox_ = {-w, w, 0.0, w};
        s.inside_ = [w](Vec2 p) {
            return p.x > -w && p.x < w && p.y > 0.0 && p.y < w;
        };
        s.nearest_ = [w](Vec2 p) { return nearest_rect(p, -w, w, 0.0, w); };
        s.on_outer_ = [w](Vec2 b) { return b.y > w * (1.0 - 1e-9); };  // top face
        return s;
    }

    /// B_r ∩ {above the graph}, for a (possibly rotated) graph domain.
    static Shape graph(const GraphDomain2D& dom, double r) {
        if (!(r > 0.0) || r > dom.radius * (1.0 + 1e-12))
            throw DomainError("graph shape needs 0 < r <= domain radius");
        Shape s;
        s.name_ = "graph:" + dom.name;
        s.radius_ = r;
        s.bbox_ = {-r, r, -r, r};
        auto dcopy = std::make_shared<GraphDomain2D>(dom);
        s.inside_ = [dcopy, r](Vec2 p) { return p.norm2() < r * r && dcopy->inside(p); };
        auto curve = std::make_shared<std::vector<Vec2>>();
        const int N = 16384;
        const double xmax = std::min(r * (1.0 + 1e-12), dom.radius);
        for (int i = 0; i <= N; ++i) {
            const Vec2 p = dcopy->curve_point(-xmax + 2.0 * xmax * i / N);
            if (p.norm() <= r * (1.0 + 1e-9)) curve->push_back(p);
        }
        if (curve->empty()) throw DegenerateDomainError("graph boundary misses the ball");
        s.nearest_ = [curve, dcopy, r](Vec2 p) {
            Vec2 best = curve->front();
            double bd = kInf;
            for (const Vec2& q : *curve) {
                const double d = (p - q).norm2();
                if (d < bd) {
                    bd = d;
                    best = q;
                }
            }
            // arc candidate: the part of the circle |x| = r above the graph
            if (p.norm() > 1e-12) {
                const Vec2 arc = p * (r / p.norm());
                if (dcopy->inside(arc * (1.0 - 1e-9)) && (p - arc).norm2() < bd) best = arc;
            }
            return best;
        };
        s.on_outer_ = [r](Vec2 b) { return b.norm() > r * (1.0 - 1e-6); };
        return s;
    }

    /// Half-disc of radius r oriented along `normal`, with the flat side
    /// pushed to {x . normal = -offset}: { |x + offset n| < r, x . n > -offset }.
    static Shape shifted_half_disc(double r, Vec2 normal, double offset) {
        if (!(r > 0.0)) throw DomainError("shifted_half_disc needs r > 0");
        const Vec2 n = normal.normalized();
        Shape s;
        s.name_ = "shifted_half_disc";
        s.radius_ = r;
        s.bbox_ = {-r - std::abs(offset), r + std::abs(offset), -r - std::abs(offset),
                   r + std::abs(offset)};
        const double ang = std::atan2(n.y, n.x) - M_PI / 2.0;  // frame with n = e2
        s.inside_ = [n, r, offset, ang](Vec2 p) {
            const Vec2 w = rotate(p + offset * n, -ang);
            return w.y > 0.0 && w.norm2() < r * r;
        };
        s.nearest_ = [n, r, offset, ang](Vec2 p) {
            const Vec2 w = rotate(p + offset * n, -ang);
            const Vec2 q = nearest_half_disc(w, r);
            return rotate(q, ang) - offset * n;
        };
        s.on_outer_ = [n, r, offset, ang](Vec2 b) {
            return rotate(b + offset * n, -ang).norm() > r * (1.0 - 1e-9);
        };
        return s;
    }

    bool inside(Vec2 p) const { return inside_(p); }
    Vec2 nearest_boundary(Vec2 p) const { return nearest_(p); }
    /// True when a boundary point sits on the outer (curved/top) part rather
    /// than the flat/graph part through the origin.
    bool on_outer_boundary(Vec2 b) const { return on_outer_(b); }
    const BBox& bbox() const { return bbox_; }
    double nominal_radius() const { return radius_; }
    const std::string& name() const { return name_; }

  private:
    static Vec2 nearest_half_disc(Vec2 p, double r) {
        // candidates: flat diameter segment and the upper arc
        const Vec2 seg{std::clamp(p.x, -r, r), 0.0};
        Vec2 arc;
        if (p.norm() < 1e-12)
            arc = {0.0, r};
        else if (p.y <= 0.0)
            arc = {p.x >= 0.0 ? r : -r, 0.0};
        else
            arc = p * (r / p.norm());
        return (p - seg).norm2() <= (p - arc).norm2() ? seg : arc;
    }

    static Vec2 nearest_rect(Vec2 p, double xlo, double xhi, double ylo, double yhi) {
        const double cx = std::clamp(p.x, xlo, xhi);
        const double cy = std::clamp(p.y, ylo, yhi);
        if (cx != p.x || cy != p.y) return {cx, cy};  // outside: clamp projects
        // inside: push to the closest face
        const double dx = std::min(p.x - xlo, xhi - p.x);
        const double dy = std::min(p.y - ylo, yhi - p.y);
        if (dx < dy) return {p.x - xlo < xhi - p.x ? xlo : xhi, p.y};
        return {p.x, p.y - ylo < yhi - p.y ? ylo : yhi};
    }

    std::string name_;
    double radius_ = 1.0;
    BBox bbox_;
    std::function<bool(Vec2)> inside_;
    std::function<Vec2(Vec2)> nearest_;
    std::function<bool(Vec2)> on_outer_;
};

// ---------------------------------------------------------------------------
// Gridded domain: inside mask plus Dirichlet band
// ---------------------------------------------------------------------------

enum class NodeState : unsigned char { Outside = 0, Inside = 1, Band = 2 };

struct GridDomain {
    double h = 0.0;
    double x0 = 0.0, y0 = 0.0;  // position of node (0, 0)
    int nx = 0, ny = 0;
    int band_width = 3;
    std::vector<NodeState> state;
    std::vector<Vec2> nearest;  // nearest boundary point, band nodes only
    std::vector<std::pair<int, int>> inside_nodes;  // lexicographic (i, then j)
    Shape shape{Shape::half_disc(1.0)};
    double nominal_radius = 1.0;

    std::size_t idx(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    Vec2 pos(int i, int j) const { return {x0 + i * h, y0 + j * h}; }
    bool in_range(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
    NodeState at(int i, int j) const {
        return in_range(i, j) ? state[idx(i, j)] : NodeState::Outside;
    }
    bool has_value(int i, int j) const { return at(i, j) != NodeState::Outside; }

    /// Grid index of the spatial origin; throws if 0 is not a lattice node.
    std::pair<int, int> origin_node() const {
        const double fi = -x0 / h, fj = -y0 / h;
        const int i = static_cast<int>(std::lround(fi)), j = static_cast<int>(std::lround(fj));
        if (std::abs(fi - i) > 1e-6 || std::abs(fj - j) > 1e-6 || !in_range(i, j))
            throw GeometryError("origin is not a grid node");
        return {i, j};
    }
};

/// Values over a grid: finite on inside and band nodes, NaN elsewhere.
struct GridFunction {
    int nx = 0, ny = 0;
    std::vector<double> v;

    GridFunction() = default;
    GridFunction(int nx_, int ny_) : nx(nx_), ny(ny_), v(static_cast<std::size_t>(nx_) * ny_, kNaN) {}

    double& at(int i, int j) { return v[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j) const { return v[static_cast<std::size_t>(j) * nx + i]; }
};

/// Sample a continuous field on inside and band nodes.
inline GridFunction sample_on(const GridDomain& dom, const std::function<double(Vec2)>& f) {
    GridFunction g(dom.nx, dom.ny);
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            if (dom.state[dom.idx(i, j)] != NodeState::Outside) g.at(i, j) = f(dom.pos(i, j));
    return g;
}

inline GridDomain build_domain(const Shape& shape, double h, int band_width = 3) {
    if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
    if (band_width < 1) throw DomainError("band width must be >= 1");

    GridDomain dom;
    dom.h = h;
    dom.band_width = band_width;
    dom.shape = shape;
    dom.nominal_radius = shape.nominal_radius();

    const BBox bb = shape.bbox();
    const double pad = (band_width + 1) * h;
    const int i_lo = static_cast<int>(std::floor((bb.xlo - pad) / h)) - 1;
    const int i_hi = static_cast<int>(std::ceil((bb.xhi + pad) / h)) + 1;
    const int j_lo = static_cast<int>(std::floor((bb.ylo - pad) / h)) - 1;
    const int j_hi = static_cast<int>(std::ceil((bb.yhi + pad) / h)) + 1;
    dom.x0 = i_lo * h;
    dom.y0 = j_lo * h;
    dom.nx = i_hi - i_lo + 1;
    dom.ny = j_hi - j_lo + 1;
    dom.state.assign(static_cast<std::size_t>(dom.nx) * dom.ny, NodeState::Outside);

    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            if (shape.inside(dom.pos(i, j))) dom.state[dom.idx(i, j)] = NodeState::Inside;

    // band: outside nodes within Chebyshev distance band_width of an inside node
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) {
            if (dom.state[dom.idx(i, j)] != NodeState::Inside) continue;
            for (int dj = -band_width; dj <= band_width; ++dj)
                for (int di = -band_width; di <= band_width; ++di) {
                    const int ii = i + di, jj = j + dj;
                    if (!dom.in_range(ii, jj))
                        throw DegenerateDomainError("stencil band exceeds the padded grid");
                    if (dom.state[dom.idx(ii, jj)] == NodeState::Outside)
                        dom.state[dom.idx(ii, jj)] = NodeState::Band;
                }
        }

    dom.nearest.assign(dom.state.size(), Vec2{});
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            if (dom.state[dom.idx(i, j)] == NodeState::Band)
                dom.nearest[dom.idx(i, j)] = shape.nearest_boundary(dom.pos(i, j));

    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            if (dom.state[dom.idx(i, j)] == NodeState::Inside) dom.inside_nodes.push_back({i, j});

    if (dom.inside_nodes.empty())
        throw DegenerateDomainError("no interior nodes at this resolution");

    // connectivity: 4-neighbor flood fill must reach every inside node
    std::vector<char> seen(dom.state.size(), 0);
    std::deque<std::pair<int, int>> queue{dom.inside_nodes.front()};
    seen[dom.idx(queue.front().first, queue.front().second)] = 1;
    std::size_t reached = 0;
    while (!queue.empty()) {
        auto [i, j] = queue.front();
        queue.pop_front();
        ++reached;
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int ii = i + di[k], jj = j + dj[k];
            if (dom.in_range(ii, jj) && !seen[dom.idx(ii, jj)] &&
                dom.state[dom.idx(ii, jj)] == NodeState::Inside) {
                seen[dom.idx(ii, jj)] = 1;
                queue.push_back({ii, jj});
            }
        }
    }
    if (reached != dom.inside_nodes.size())
        throw DegenerateDomainError("interior nodes are disconnected at this resolution");

    return dom;
}

// ---------------------------------------------------------------------------
// Dirichlet data
// ---------------------------------------------------------------------------

/// Dirichlet data for the band.  Functional (ambient) data is sampled at the
/// band node itself, which keeps polynomial data exact for centered
/// differences; piecewise boundary specs are evaluated at the nearest
/// boundary point, which classifies the boundary piece.
struct BoundaryData {
    enum class Sampling { AtNode, AtNearestBoundary };
    Sampling sampling = Sampling::AtNode;
    std::function<double(Vec2)> fn;
    std::string name = "custom";

    static BoundaryData ambient(std::function<double(Vec2)> f, std::string nm = "ambient") {
        return {Sampling::AtNode, std::move(f), std::move(nm)};
    }
    static BoundaryData on_boundary(std::function<double(Vec2)> f, std::string nm = "boundary") {
        return {Sampling::AtNearestBoundary, std::move(f), std::move(nm)};
    }

    static BoundaryData zero() {
        return ambient([](Vec2) { return 0.0; }, "zero");
    }
    static BoundaryData linear_y() {
        return ambient([](Vec2 p) { return p.y; }, "linear-y");
    }
    /// 0 on the flat/graph part of the boundary, 1 on the outer arc.
    static BoundaryData flat0_outer1(const Shape& shape) {
        auto s = std::make_shared<Shape>(shape);
        return on_boundary([s](Vec2 b) { return s->on_outer_boundary(b) ? 1.0 : 0.0; },
                           "flat0-outer1");
    }
    /// Barrier box data: 1 on the top face, 0 on bottom and sides.
    static BoundaryData box_top1(const Shape& shape) {
        auto s = std::make_shared<Shape>(shape);
        return on_boundary([s](Vec2 b) { return s->on_outer_boundary(b) ? 1.0 : 0.0; },
                           "box-top1");
    }

    double value(Vec2 node, Vec2 nearest_boundary) const {
        return fn(sampling == Sampling::AtNode ? node : nearest_boundary);
    }
};

/// Fill band values of `u` from Dirichlet data.
inline void fill_band(const GridDomain& dom, GridFunction& u, const BoundaryData& g) {
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i)
            if (dom.state[dom.idx(i, j)] == NodeState::Band)
                u.at(i, j) = g.value(dom.pos(i, j), dom.nearest[dom.idx(i, j)]);
}

}  // namespace ellab
