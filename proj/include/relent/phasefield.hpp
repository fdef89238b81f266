#pragma once

// The weak-side objects: polygonal phase indicators chi_u with exact BV
// structure (normals, perimeter measure), oriented varifold lifts with
// per-edge multiplicity, the weak transport residual, and the total energy.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "relent/core.hpp"
#include "relent/flow.hpp"
#include "relent/geometry.hpp"
#include "relent/quadrature.hpp"

namespace relent {

namespace detail {

inline double loop_area(const std::vector<Vec2>& L) {
    double a = 0.0;
    for (std::size_t i = 0; i < L.size(); ++i)
        a += L[i].cross(L[(i + 1) % L.size()]);
    return 0.5 * a;
}

inline bool point_in_loop(const std::vector<Vec2>& L, Vec2 p) {
    bool in = false;
    std::size_t n = L.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if ((L[i].y > p.y) != (L[j].y > p.y)) {
            double t = (p.y - L[i].y) / (L[j].y - L[i].y);
            if (p.x < L[i].x + t * (L[j].x - L[i].x)) in = !in;
        }
    }
    return in;
}

// bbox-pruned exact segment-crossing scan of one closed loop
inline void check_loop_simple(const std::vector<Vec2>& L, const char* what) {
    int n = static_cast<int>(L.size());
    struct Seg {
        double xmin, xmax;
        int i;
    };
    std::vector<Seg> segs(n);
    for (int i = 0; i < n; ++i) {
        const Vec2& a = L[i];
        const Vec2& b = L[(i + 1) % n];
        segs[i] = {std::min(a.x, b.x), std::max(a.x, b.x), i};
    }
    std::sort(segs.begin(), segs.end(),
              [](const Seg& a, const Seg& b) { return a.xmin < b.xmin; });
    auto orient = [](Vec2 a, Vec2 b, Vec2 c) { return (b - a).cross(c - a); };
    for (std::size_t si = 0; si < segs.size(); ++si) {
        for (std::size_t sj = si + 1; sj < segs.size(); ++sj) {
            if (segs[sj].xmin > segs[si].xmax) break;
            int i = segs[si].i, j = segs[sj].i;
            int gap = std::min(std::abs(i - j), n - std::abs(i - j));
            if (gap <= 1) continue;
            Vec2 a = L[i], b = L[(i + 1) % n];
            Vec2 c = L[j], d = L[(j + 1) % n];
            if (std::min(a.y, b.y) > std::max(c.y, d.y) ||
                std::min(c.y, d.y) > std::max(a.y, b.y))
                continue;
            double o1 = orient(a, b, c), o2 = orient(a, b, d);
            double o3 = orient(c, d, a), o4 = orient(c, d, b);
            if (o1 * o2 < 0.0 && o3 * o4 < 0.0)
                throw DegeneratePolygon(std::string(what) + " self-intersects");
        }
    }
}

// nodes and weights of the n-point Gauss rule on [0, 1]; weights sum to 1
inline std::vector<std::pair<double, double>> gauss01(int n) {
    std::vector<std::pair<double, double>> out(n);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(kPi * (k + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 64; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        double w = 1.0 / ((1.0 - x * x) * dp * dp);
        out[k] = {0.5 * (1.0 - x), w};
        out[n - 1 - k] = {0.5 * (1.0 + x), w};
    }
    return out;
}

} // namespace detail

// chi = 1 inside the counterclockwise outer loop minus the (clockwise) holes
class PhasePolygon {
public:
    explicit PhasePolygon(std::vector<Vec2> outer,
                          std::vector<std::vector<Vec2>> holes = {},
                          bool validate = true)
        : outer_(std::move(outer)), holes_(std::move(holes)) {
        if (outer_.size() < 3)
            throw DegeneratePolygon("outer loop needs at least 3 vertices");
        if (detail::loop_area(outer_) < 0.0)
            std::reverse(outer_.begin(), outer_.end());
        for (auto& h : holes_) {
            if (h.size() < 3)
                throw DegeneratePolygon("hole needs at least 3 vertices");
            if (detail::loop_area(h) > 0.0) std::reverse(h.begin(), h.end());
        }
        double scale = 0.0;
        for (const Vec2& v : outer_) scale = std::max(scale, v.norm());
        check_edges(outer_, scale);
        for (auto& h : holes_) check_edges(h, scale);
        if (validate) {
            detail::check_loop_simple(outer_, "polygon outer loop");
            for (auto& h : holes_) detail::check_loop_simple(h, "polygon hole");
            if (!(detail::loop_area(outer_) > 0.0))
                throw DegeneratePolygon("outer loop has zero area");
        }
    }

    const std::vector<Vec2>& outer() const { return outer_; }
    const std::vector<std::vector<Vec2>>& holes() const { return holes_; }

    double area() const {
        double a = detail::loop_area(outer_);
        for (const auto& h : holes_) a += detail::loop_area(h);
        return a;
    }

    double perimeter() const {
        double p = loop_length(outer_);
        for (const auto& h : holes_) p += loop_length(h);
        return p;
    }

    double chi(Vec2 x) const {
        if (!detail::point_in_loop(outer_, x)) return 0.0;
        for (const auto& h : holes_)
            if (detail::point_in_loop(h, x)) return 0.0;
        return 1.0;
    }

    Box bbox() const {
        Vec2 lo = outer_[0], hi = outer_[0];
        for (const Vec2& v : outer_) {
            lo.x = std::min(lo.x, v.x);
            lo.y = std::min(lo.y, v.y);
            hi.x = std::max(hi.x, v.x);
            hi.y = std::max(hi.y, v.y);
        }
        return {lo, hi};
    }

    // integral of f over {chi = 1}; holes subtract through their orientation
    template <class F>
    double integrate(F&& f, int subdiv = 0) const {
        double acc = integrate_loop(outer_, f, subdiv);
        for (const auto& h : holes_) acc += integrate_loop(h, f, subdiv);
        return acc;
    }

private:
    std::vector<Vec2> outer_;
    std::vector<std::vector<Vec2>> holes_;

    static double loop_length(const std::vector<Vec2>& L) {
        double s = 0.0;
        for (std::size_t i = 0; i < L.size(); ++i)
            s += (L[(i + 1) % L.size()] - L[i]).norm();
        return s;
    }

    static void check_edges(const std::vector<Vec2>& L, double scale) {
        for (std::size_t i = 0; i < L.size(); ++i)
            if ((L[(i + 1) % L.size()] - L[i]).norm() <= 1e-14 * std::max(1.0, scale))
                throw DegeneratePolygon("zero-length edge at vertex " +
                                        std::to_string(i));
    }
};

inline PhasePolygon polygonize(const FourierCurve2& curve, int n,
                               bool validate = true) {
    return PhasePolygon(curve.sample_loop(n), {}, validate);
}

struct PerimeterSample {
    Vec2 point;
    Vec2 normal;  // unit inner normal (into {chi = 1})
    double weight;
};

// sampling of the perimeter measure |grad chi|: n_quad Gauss nodes per edge,
// weights summing to the edge length (n_quad = 1 is the edge midpoint)
inline std::vector<PerimeterSample> perimeter_measure(const PhasePolygon& poly,
                                                      int n_quad) {
    if (n_quad < 1) throw ConfigInvalid("n_quad must be >= 1");
    auto rule = detail::gauss01(n_quad);
    std::vector<PerimeterSample> out;
    auto emit = [&](const std::vector<Vec2>& L) {
        for (std::size_t i = 0; i < L.size(); ++i) {
            Vec2 a = L[i], b = L[(i + 1) % L.size()];
            Vec2 e = b - a;
            double len = e.norm();
            Vec2 n = e.perp() / len;
            for (auto [t, w] : rule) out.push_back({a + t * e, n, len * w});
        }
    };
    emit(poly.outer());
    for (const auto& h : poly.holes()) emit(h);
    return out;
}

struct VarifoldAtom {
    Vec2 pos;
    Vec2 dir;     // unit direction on S^1
    double mass;  // length-weight
    double theta; // d|grad chi| / d|V| at pos, in (0, 1]
};

class VarifoldMeasure {
public:
    explicit VarifoldMeasure(std::vector<VarifoldAtom> atoms)
        : atoms_(std::move(atoms)) {
        for (const auto& a : atoms_) {
            if (std::fabs(a.dir.norm() - 1.0) > 1e-10)
                throw NotUnit("varifold direction has norm " +
                              std::to_string(a.dir.norm()));
            if (!(a.mass >= 0.0))
                throw IncompatibleVarifold("negative varifold mass");
            if (!(a.theta > 0.0) || a.theta > 1.0 + 1e-12)
                throw IncompatibleVarifold("theta outside (0,1]");
        }
    }

    const std::vector<VarifoldAtom>& atoms() const { return atoms_; }

    double total_mass() const {
        double m = 0.0;
        for (const auto& a : atoms_) m += a.mass;
        return m;
    }

private:
    std::vector<VarifoldAtom> atoms_;
};

// Oriented varifold carrying the polygon boundary with per-outer-edge
// multiplicity m >= 1. A piece of length len contributes mass (m+1)/2 along
// +n and (m-1)/2 along -n: total mass m*len, net first moment len*n, so the
// compatibility integral against grad chi holds exactly and theta = 1/m.
inline VarifoldMeasure lift_varifold(const PhasePolygon& poly,
                                     std::vector<double> multiplicity = {},
                                     int n_quad = 1) {
    std::size_t n_edges = poly.outer().size();
    if (multiplicity.empty()) multiplicity.assign(n_edges, 1.0);
    if (multiplicity.size() != n_edges)
        throw InvalidMultiplicity("need one multiplicity per outer edge");
    for (double m : multiplicity)
        if (!(m >= 1.0)) throw InvalidMultiplicity("multiplicity < 1");

    std::vector<VarifoldAtom> atoms;
    auto emit = [&](const std::vector<Vec2>& L, const std::vector<double>* mult) {
        for (std::size_t i = 0; i < L.size(); ++i) {
            Vec2 a = L[i], b = L[(i + 1) % L.size()];
            Vec2 e = b - a;
            double len = e.norm();
            Vec2 n = e.perp() / len;
            double m = mult ? (*mult)[i] : 1.0;
            for (int k = 0; k < n_quad; ++k) {
                Vec2 p = a + ((k + 0.5) / n_quad) * e;
                double piece = len / n_quad;
                atoms.push_back({p, n, 0.5 * (m + 1.0) * piece, 1.0 / m});
                if (m > 1.0)
                    atoms.push_back({p, -n, 0.5 * (m - 1.0) * piece, 1.0 / m});
            }
        }
    };
    emit(poly.outer(), &multiplicity);
    for (const auto& h : poly.holes()) emit(h, nullptr);
    return VarifoldMeasure(std::move(atoms));
}

// | int psi s dV - int psi d(grad chi) | with the same per-edge sampling
inline double compatibility_residual(const VarifoldMeasure& V,
                                     const PhasePolygon& poly,
                                     const std::function<double(Vec2)>& psi,
                                     int n_quad = 1) {
    Vec2 lhs, rhs;
    for (const auto& a : V.atoms()) lhs += psi(a.pos) * a.mass * a.dir;
    for (const auto& s : perimeter_measure(poly, n_quad))
        rhs += psi(s.point) * s.weight * s.normal;
    return (lhs - rhs).norm();
}

struct TestFunction {
    std::function<double(Vec2, double)> value;
    std::function<double(Vec2, double)> dt;
    std::function<Vec2(Vec2, double)> grad;
};

// | int chi phi |_{t0}^{t1} - int int chi (dt phi + v . grad phi) |, the weak
// transport relation; Simpson in time, polygon-exact quadrature in space.
template <class Traj>
double transport_residual(Traj&& poly_at, const VelocityField& v,
                          const TestFunction& phi, double t0, double t1,
                          int subdiv = 2) {
    const double tm = 0.5 * (t0 + t1);
    PhasePolygon p0 = poly_at(t0);
    PhasePolygon pm = poly_at(tm);
    PhasePolygon p1 = poly_at(t1);
    double term1 =
        p1.integrate([&](Vec2 x) { return phi.value(x, t1); }, subdiv) -
        p0.integrate([&](Vec2 x) { return phi.value(x, t0); }, subdiv);
    auto g = [&](const PhasePolygon& p, double t) {
        return p.integrate(
            [&](Vec2 x) { return phi.dt(x, t) + v.value(x, t).dot(phi.grad(x, t)); },
            subdiv);
    };
    double term2 = (t1 - t0) / 6.0 * (g(p0, t0) + 4.0 * g(pm, tm) + g(p1, t1));
    return std::fabs(term1 - term2);
}

// total energy: kinetic part over the box plus sigma times varifold mass
inline double energy(const PhasePolygon& poly, const VelocityField& v,
                     const VarifoldMeasure& V, double t, const FluidParams& par,
                     const Box& box, const QuadratureOptions& opt = {},
                     int subdiv = 2) {
    par.validate();
    auto half_speed2 = [&](Vec2 x) { return 0.5 * v.value(x, t).norm2(); };
    double ambient = integrate_box_checked(box, opt, half_speed2,
                                           [](const Box&) { return false; });
    double inside = poly.integrate(half_speed2, subdiv);
    double kinetic = par.rho_minus * ambient + (par.rho_plus - par.rho_minus) * inside;
    return kinetic + par.sigma * V.total_mass();
}

} // namespace relent
