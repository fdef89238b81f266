#pragma once

// One-sided interface error heights measured along normal rays of the
// reference curve, mollification of the height samples along the curve,
// offset graph reconstruction with symmetric-difference area, and the L4
// Orlicz-type diagnostic for bounded functions on a curve.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/geometry/algorithms/append.hpp>
#include <boost/geometry/algorithms/area.hpp>
#include <boost/geometry/algorithms/correct.hpp>
#include <boost/geometry/algorithms/sym_difference.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>

#include "relent/core.hpp"
#include "relent/cutoffs.hpp"
#include "relent/geometry.hpp"
#include "relent/phasefield.hpp"

namespace relent {

enum class Side { plus, minus };

namespace detail {

// Sorted parameters y in (0, len) where the segment base + y*dir crosses an
// edge of the polygon. Values decide nothing by themselves; the caller
// samples chi at interval midpoints, so duplicated or grazing hits are
// harmless interval splits.
inline std::vector<double> ray_crossings(const PhasePolygon& poly, Vec2 base,
                                         Vec2 dir, double len) {
    std::vector<double> ys;
    auto scan = [&](const std::vector<Vec2>& loop) {
        int n = static_cast<int>(loop.size());
        for (int i = 0; i < n; ++i) {
            Vec2 a = loop[i];
            Vec2 e = loop[(i + 1) % n] - a;
            double denom = dir.cross(e);
            if (std::fabs(denom) < 1e-300) continue;
            Vec2 d = a - base;
            double y = d.cross(e) / denom;
            double t = d.cross(dir) / denom;
            // the t window is widened so a hit at a shared vertex survives
            // roundoff on at least one of the two edges meeting there
            if (y > 1e-12 * len && y < len && t >= -1e-9 && t <= 1.0 + 1e-9)
                ys.push_back(y);
        }
    };
    scan(poly.outer());
    for (const auto& hole : poly.holes()) scan(hole);
    std::sort(ys.begin(), ys.end());
    return ys;
}

} // namespace detail

// Height of the one-sided interface error at curve parameter s:
//   plus:  integral of (1 - chi)(base + y n) theta(y / (widen r_c)) over y>0
//   minus: integral of      chi (base - y n) theta(y / (widen r_c)) over y>0
// Crossings are exact segment arithmetic and theta has an exact
// antiderivative, so the only error is the polygonal representation itself.
inline double height(const PhasePolygon& poly, const FourierCurve2& curve,
                     double s, Side side, double widen = 1.0) {
    CurvePoint c = curve.eval_all(s);
    Vec2 n = c.d1.normalized().perp();
    Vec2 dir = side == Side::plus ? n : -n;
    bool count_chi = side == Side::minus;
    double scale = widen * curve.r_c();
    double len = 0.5 * scale;  // support of the ray cutoff

    std::vector<double> ys = detail::ray_crossings(poly, c.p, dir, len);
    ys.push_back(len);
    const PlateauCutoff& theta = ray_cutoff();
    double h = 0.0;
    double y0 = 0.0;
    for (double y1 : ys) {
        if (y1 - y0 > 1e-14 * scale) {
            Vec2 mid = c.p + (0.5 * (y0 + y1)) * dir;
            if (poly.chi(mid) == count_chi)
                h += scale * (theta.integral(y1 / scale) -
                              theta.integral(y0 / scale));
        }
        y0 = y1;
    }
    return h;
}

inline double height(const PhasePolygon& poly, const FourierCurve2& curve,
                     Vec2 base, Side side, double widen = 1.0) {
    auto [s, d2] = curve.nearest(base);
    return height(poly, curve, s, side, widen);
}

struct HeightSample {
    Vec2 base;
    double h_plus = 0.0;
    double h_minus = 0.0;
};

// Heights sampled at n uniform curve parameters.
struct HeightField {
    const FourierCurve2* curve = nullptr;
    double widen = 1.0;
    std::vector<double> s;
    std::vector<double> arclen;
    std::vector<Vec2> base;
    std::vector<Vec2> normal;
    std::vector<double> h_plus;
    std::vector<double> h_minus;
    double max_gap = 0.0;  // largest chordal spacing between adjacent bases

    int size() const { return static_cast<int>(s.size()); }

    HeightSample at(int i) const { return {base[i], h_plus[i], h_minus[i]}; }

    // arclength weight of sample i (cyclic midpoint rule)
    double weight(int i) const {
        int n = size();
        double total = curve->length();
        double next = arclen[(i + 1) % n] + (i + 1 == n ? total : 0.0);
        double prev = arclen[(i + n - 1) % n] - (i == 0 ? total : 0.0);
        return 0.5 * (next - prev);
    }
};

inline HeightField sample_heights(const PhasePolygon& poly,
                                  const FourierCurve2& curve, int n,
                                  double widen = 1.0) {
    if (n < 4) throw ConfigInvalid("height field needs at least 4 samples");
    HeightField hf;
    hf.curve = &curve;
    hf.widen = widen;
    hf.s.resize(n);
    hf.arclen.resize(n);
    hf.base.resize(n);
    hf.normal.resize(n);
    hf.h_plus.resize(n);
    hf.h_minus.resize(n);
    for (int i = 0; i < n; ++i) {
        double s = kTwoPi * i / n;
        hf.s[i] = s;
        hf.arclen[i] = curve.arclength(s);
        CurvePoint c = curve.eval_all(s);
        hf.base[i] = c.p;
        hf.normal[i] = c.d1.normalized().perp();
        hf.h_plus[i] = height(poly, curve, s, Side::plus, widen);
        hf.h_minus[i] = height(poly, curve, s, Side::minus, widen);
    }
    for (int i = 0; i < n; ++i)
        hf.max_gap = std::max(hf.max_gap,
                              (hf.base[(i + 1) % n] - hf.base[i]).norm());
    return hf;
}

// Kernel-averaged heights along the curve. The kernel argument is the
// ambient chordal distance between base points, normalized per point.
struct MollifiedHeight {
    double e = 0.0;
    std::vector<double> h_plus;
    std::vector<double> h_minus;
    double min_denom = 0.0;  // normalization integral divided by e, monitored
    double max_denom = 0.0;
};

inline MollifiedHeight mollify(const HeightField& hf, double e) {
    if (!(e > 0.0) || e > hf.curve->r_c())
        throw ConfigInvalid("mollification scale must lie in (0, r_c]");
    if (0.5 * e <= hf.max_gap)
        throw KernelSupportEmpty("kernel radius " + std::to_string(0.5 * e) +
                                 " does not reach past the sample spacing " +
                                 std::to_string(hf.max_gap));
    int n = hf.size();
    const PlateauCutoff& theta = ray_cutoff();
    MollifiedHeight out;
    out.e = e;
    out.h_plus.resize(n);
    out.h_minus.resize(n);
    out.min_denom = std::numeric_limits<double>::max();
    out.max_denom = 0.0;
    for (int i = 0; i < n; ++i) {
        double denom = 0.0, nump = 0.0, numm = 0.0;
        for (int j = 0; j < n; ++j) {
            double k = theta((hf.base[j] - hf.base[i]).norm() / e);
            if (k == 0.0) continue;
            double w = k * hf.weight(j);
            denom += w;
            nump += w * hf.h_plus[j];
            numm += w * hf.h_minus[j];
        }
        if (!(denom > 0.0))
            throw KernelSupportEmpty("empty kernel at sample " +
                                     std::to_string(i));
        out.h_plus[i] = nump / denom;
        out.h_minus[i] = numm / denom;
        out.min_denom = std::min(out.min_denom, denom / e);
        out.max_denom = std::max(out.max_denom, denom / e);
    }
    return out;
}

// Offset polygon with vertices base_i + (h+_i - h-_i) normal_i. Where both
// heights are positive at one base the exact reconstruction is a
// disconnected set no single polygon represents; the net offset is used.
inline PhasePolygon graph_reconstruction(const HeightField& hf,
                                         const std::vector<double>& h_plus,
                                         const std::vector<double>& h_minus) {
    int n = hf.size();
    if (static_cast<int>(h_plus.size()) != n ||
        static_cast<int>(h_minus.size()) != n)
        throw ConfigInvalid("height vectors must match the sample count");
    std::vector<Vec2> loop(n);
    for (int i = 0; i < n; ++i) {
        double g = h_plus[i] - h_minus[i];
        double kappa = hf.curve->curvature(hf.s[i]);
        if (std::fabs(g) * std::fabs(kappa) >= 1.0)
            throw SelfIntersectingOffset(
                "offset " + std::to_string(g) + " exceeds curvature reach at s=" +
                std::to_string(hf.s[i]));
        loop[i] = hf.base[i] + g * hf.normal[i];
    }
    try {
        return PhasePolygon(std::move(loop));
    } catch (const DegeneratePolygon& err) {
        throw SelfIntersectingOffset(std::string("offset polygon degenerates: ") +
                                     err.what());
    }
}

inline PhasePolygon graph_reconstruction(const HeightField& hf,
                                         const MollifiedHeight& mh) {
    return graph_reconstruction(hf, mh.h_plus, mh.h_minus);
}

inline PhasePolygon graph_reconstruction(const HeightField& hf) {
    return graph_reconstruction(hf, hf.h_plus, hf.h_minus);
}

// Area of the symmetric difference of two phase polygons (polygon clipping).
inline double sym_diff_area(const PhasePolygon& a, const PhasePolygon& b) {
    namespace bg = boost::geometry;
    using BPoint = bg::model::d2::point_xy<double>;
    using BPoly = bg::model::polygon<BPoint>;
    auto convert = [](const PhasePolygon& p) {
        BPoly out;
        for (const Vec2& v : p.outer())
            bg::append(out.outer(), BPoint(v.x, v.y));
        out.inners().resize(p.holes().size());
        for (std::size_t k = 0; k < p.holes().size(); ++k)
            for (const Vec2& v : p.holes()[k])
                bg::append(out.inners()[k], BPoint(v.x, v.y));
        bg::correct(out);
        return out;
    };
    bg::model::multi_polygon<BPoly> diff;
    bg::sym_difference(convert(a), convert(b), diff);
    return bg::area(diff);
}

// Convex integrand with recession slope 2: steep sampled transitions of
// total rise J contribute 2J in the limit, which is how jump parts of
// piecewise-smooth height fields are counted.
inline double orlicz_g(double s) {
    double a = std::fabs(s);
    return a <= 1.0 ? a * a : 2.0 * a - 1.0;
}

struct OrliczReport {
    double lhs = 0.0;         // integral of u^4 over the curve
    double rhs_factor = 0.0;  // (1+L)^3 / r_c^4 (|Du|_G^2 + |Du|_G^4 + |u|_2^4)
    double du_g = 0.0;
    double u_l2_sq = 0.0;
};

// u sampled at uniform curve parameters (u.size() samples), |u| <= 1.
inline OrliczReport orlicz_l4_check(const FourierCurve2& curve,
                                    const std::vector<double>& u) {
    int n = static_cast<int>(u.size());
    if (n < 4) throw ConfigInvalid("need at least 4 samples of u");
    for (double v : u)
        if (!(std::fabs(v) <= 1.0 + 1e-12))
            throw ConfigInvalid("|u| must be bounded by 1");

    double total = curve.length();
    std::vector<double> arc(n);
    for (int i = 0; i < n; ++i) arc[i] = curve.arclength(kTwoPi * i / n);

    OrliczReport rep;
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        double seg = (j == 0 ? total : arc[j]) - arc[i];
        double wi = 0.5 * (seg + (arc[i] - (i == 0 ? arc[n - 1] - total
                                                   : arc[i - 1])));
        rep.lhs += wi * u[i] * u[i] * u[i] * u[i];
        rep.u_l2_sq += wi * u[i] * u[i];
        rep.du_g += orlicz_g((u[j] - u[i]) / seg) * seg;
    }
    double rc = curve.r_c();
    double pre = (1.0 + total) * (1.0 + total) * (1.0 + total) / (rc * rc * rc * rc);
    rep.rhs_factor = pre * (rep.du_g * rep.du_g +
                            rep.du_g * rep.du_g * rep.du_g * rep.du_g +
                            rep.u_l2_sq * rep.u_l2_sq);
    return rep;
}

} // namespace relent
