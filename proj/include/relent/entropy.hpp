#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "compensation.hpp"
#include "extension.hpp"
#include "phasefield.hpp"
#include "quadrature.hpp"

namespace relent {

// velocity-field view of a grid field, so a compensation field can be added
// to an analytic flow (SumField) or stand in as a weak velocity in tests
class GridVelocity final : public VelocityField {
public:
    explicit GridVelocity(const CompensationField& w,
                          const GridField2* dt = nullptr)
        : w_(&w), dt_(dt) {
        int n = w.w.n();
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix) {
                Vec2 gx = w.grad_x.at(iy, ix);
                Vec2 gy = w.grad_y.at(iy, ix);
                bound_ = std::max(bound_, std::sqrt(gx.norm2() + gy.norm2()));
            }
    }

    Vec2 value(Vec2 x, double) const override { return w_->value(x); }
    Mat2 grad(Vec2 x, double) const override { return w_->grad(x); }
    Vec2 time_deriv(Vec2 x, double) const override {
        return dt_ ? dt_->value(x) : Vec2{};
    }
    double bound_grad(double) const override { return bound_; }

private:
    const CompensationField* w_;
    const GridField2* dt_;
    double bound_ = 0.0;
};

inline constexpr std::array<const char*, 10> kBudgetColumns = {
    "R_surTen", "R_dt", "R_visc", "R_adv", "R_weightVol",
    "A_visc",   "A_dt", "A_adv",  "A_surTen", "A_weightVol"};

struct EntropyReport {
    double t = 0.0;

    double e_tilt = 0.0;
    double e_kinetic = 0.0;
    double e_weightvol = 0.0;
    double e_multiplicity = 0.0;

    double r_surten = 0.0;
    double r_dt = 0.0;
    double r_visc = 0.0;
    double r_adv = 0.0;
    double r_weightvol = 0.0;
    double a_visc = 0.0;
    double a_dt = 0.0;
    double a_adv = 0.0;
    double a_surten = 0.0;
    double a_weightvol = 0.0;

    double dissipation = 0.0;

    double total() const {
        return e_tilt + e_kinetic + e_weightvol + e_multiplicity;
    }

    std::map<std::string, double> terms() const {
        return {{"R_surTen", r_surten},     {"R_dt", r_dt},
                {"R_visc", r_visc},         {"R_adv", r_adv},
                {"R_weightVol", r_weightvol}, {"A_visc", a_visc},
                {"A_dt", a_dt},             {"A_adv", a_adv},
                {"A_surTen", a_surten},     {"A_weightVol", a_weightvol}};
    }

    double budget(std::size_t i) const {
        const std::array<double, 10> v = {r_surten, r_dt,  r_visc, r_adv,
                                          r_weightvol, a_visc, a_dt, a_adv,
                                          a_surten, a_weightvol};
        return v.at(i);
    }
};

struct EntropyInputs {
    const PhasePolygon* phase = nullptr;        // weak indicator
    const VelocityField* u = nullptr;           // weak velocity
    const VarifoldMeasure* varifold = nullptr;  // null: unit lift of phase
    const FourierCurve2* curve = nullptr;       // strong interface
    const VelocityField* v = nullptr;           // strong velocity
    const XiField* xi = nullptr;                // null: default profile
    const CompensationField* w = nullptr;       // null: w == 0
    const GridField2* dt_w = nullptr;           // null: time-frozen w
    FluidParams par;
    double t = 0.0;
    Box domain;
    QuadratureOptions quad;
    int surface_quad = 2;  // perimeter samples per polygon edge
};

// squared varifold normal error, sum over atoms of 1/2 m |s - xi|^2
inline double varifold_normal_error_sq(const VarifoldMeasure& V,
                                       const XiField& xi) {
    double acc = 0.0;
    for (const auto& a : V.atoms())
        acc += 0.5 * a.mass * (a.dir - xi.eval(a.pos).xi).norm2();
    return acc;
}

namespace detail {

// half-open scanline crossings of a polygon loop with the line {y = const};
// vertices and horizontal edges resolve consistently without tolerances
inline void loop_crossings(const std::vector<Vec2>& L, double y,
                           std::vector<double>& xs) {
    std::size_t m = L.size();
    for (std::size_t i = 0; i < m; ++i) {
        Vec2 a = L[i], b = L[(i + 1) % m];
        if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y))
            xs.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
    }
}

inline std::vector<double> poly_crossings(const PhasePolygon& p, double y) {
    std::vector<double> xs;
    loop_crossings(p.outer(), y, xs);
    for (const auto& h : p.holes()) loop_crossings(h, y, xs);
    std::sort(xs.begin(), xs.end());
    return xs;
}

// sampled level set of the signed distance, used as a cut hint so that
// quadrature panels never straddle a profile knee
inline PhasePolygon offset_polygon(const FourierCurve2& c, double d, int n) {
    std::vector<Vec2> pts;
    pts.reserve((std::size_t)n);
    for (int k = 0; k < n; ++k) {
        double th = kTwoPi * k / n;
        Vec2 tau = c.d1(th);
        pts.push_back(c.eval(th) + d * (tau.perp() / tau.norm()));
    }
    return PhasePolygon(std::move(pts), {}, false);
}

constexpr int kVolTerms = 13;
using VolAcc = std::array<double, kVolTerms>;

inline void vol_add(VolAcc& a, const VolAcc& b, double s) {
    for (int i = 0; i < kVolTerms; ++i) a[i] += s * b[i];
}

struct EntropyCtx {
    const EntropyInputs* in;
    const XiField* xi;
    double r_c;
};

// every volume integrand of the functional and the budget at one point;
// chi_u comes in exactly from the scanline, chi_v from the signed distance
inline VolAcc volume_integrand(Vec2 x, double chi_u, const EntropyCtx& C) {
    const EntropyInputs& in = *C.in;
    double t = in.t;

    ProjectionResult pr = in.curve->project_unchecked(x);
    double sd = pr.sdist;
    double chi_v = sd > 0.0 ? 1.0 : 0.0;
    bool in_band = std::fabs(sd) < C.r_c;

    ExtensionPoint ep;
    if (in_band)
        ep = C.xi->eval(pr);
    else
        ep.beta = (sd < 0.0 ? -1.0 : 1.0) * kBetaPlateau;

    Vec2 uv = in.u->value(x, t);
    Vec2 vv = in.v->value(x, t);
    Mat2 ju = in.u->grad(x, t);
    Mat2 jv = in.v->grad(x, t);
    Vec2 vt = in.v->time_deriv(x, t);

    Vec2 wv, dtw;
    Mat2 jw;
    if (in.w) {
        wv = in.w->value(x);
        jw = in.w->grad(x);
    }
    if (in.dt_w) dtw = in.dt_w->value(x);

    Vec2 du = uv - vv - wv;
    double rho_u = in.par.rho(chi_u);
    double drho = in.par.rho(chi_u) - in.par.rho(chi_v);
    double dmu = in.par.mu(chi_u) - in.par.mu(chi_v);
    double mu_u = in.par.mu(chi_u);
    double dchi = chi_u - chi_v;
    double sigma = in.par.sigma;

    Mat2 dv_sym = jv.sym();
    Mat2 duv_sym = (ju - jv).sym();
    Mat2 dw_sym = jw.sym();
    Mat2 ddiff_sym = (ju - jv - jw).sym();

    VolAcc f{};
    f[0] = 0.5 * rho_u * du.norm2();
    f[1] = std::fabs(dchi) * std::fabs(ep.beta);
    f[2] = sigma * dchi * du.dot(ep.grad_div_xi);
    f[3] = -drho * du.dot(vt);
    f[4] = -2.0 * dmu * dv_sym.ddot(duv_sym);
    f[5] = -drho * du.dot(jv.apply(vv)) - rho_u * du.dot(jv.apply(du));
    if (dchi != 0.0 && in_band) {
        NormalVelocities nv = normal_velocities(pr, *in.v, t);
        f[6] = dchi * (nv.vbar - nv.vn + du).dot(ep.grad_beta);
    }
    f[7] = 2.0 * dmu * dv_sym.ddot(dw_sym) -
           2.0 * mu_u * dw_sym.ddot(ddiff_sym);
    f[8] = -rho_u * (du.dot(dtw) + du.dot(jw.apply(vv)));
    f[9] = -rho_u * (du.dot((jv + jw).apply(wv)) + du.dot(jw.apply(du)));
    f[10] = sigma * dchi *
            (wv.dot(ep.grad_div_xi) + (jw * ep.grad_xi).trace());
    f[11] = dchi * wv.dot(ep.grad_beta);
    f[12] = 2.0 * mu_u * ddiff_sym.frob2();
    return f;
}

// one scanline row: exact chi_u intervals from the parity polygon, every
// other cut polygon only aligns quadrature panels with jumps and profile
// knees (values always use the true signed distance)
template <class F>
VolAcc scan_row(const Box& b, double y, double hx, const PhasePolygon& chi,
                const std::vector<const PhasePolygon*>& extras, F&& f) {
    std::vector<double> xu = poly_crossings(chi, y);
    std::vector<double> cuts;
    cuts.reserve(xu.size() + 8);
    cuts.push_back(b.lo.x);
    for (double c : xu)
        if (c > b.lo.x && c < b.hi.x) cuts.push_back(c);
    for (const PhasePolygon* p : extras)
        for (double c : poly_crossings(*p, y))
            if (c > b.lo.x && c < b.hi.x) cuts.push_back(c);
    cuts.push_back(b.hi.x);
    std::sort(cuts.begin(), cuts.end());

    constexpr double kGl2 = 0.28867513459481287;  // 1/(2 sqrt 3)
    VolAcc acc{};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double x0 = cuts[i], x1 = cuts[i + 1];
        double len = x1 - x0;
        if (len <= 1e-14) continue;
        double xm = 0.5 * (x0 + x1);
        std::size_t below =
            std::upper_bound(xu.begin(), xu.end(), xm) - xu.begin();
        double chi_u = (below % 2 == 1) ? 1.0 : 0.0;
        int np = std::max(1, (int)std::ceil(len / hx));
        double hp = len / np;
        for (int p = 0; p < np; ++p) {
            double c = x0 + (p + 0.5) * hp;
            VolAcc g1 = f(Vec2{c - kGl2 * hp, y}, chi_u);
            VolAcc g2 = f(Vec2{c + kGl2 * hp, y}, chi_u);
            vol_add(acc, g1, 0.5 * hp);
            vol_add(acc, g2, 0.5 * hp);
        }
    }
    return acc;
}

struct StripEdge {
    std::vector<double> xu;
    int extra_cuts = 0;
};

inline StripEdge strip_edge(const PhasePolygon& chi,
                            const std::vector<const PhasePolygon*>& extras,
                            double y) {
    StripEdge e;
    e.xu = poly_crossings(chi, y);
    for (const PhasePolygon* p : extras)
        e.extra_cuts += (int)poly_crossings(*p, y).size();
    return e;
}

// a strip is refined where crossings are born or die between its edges, and
// where a boundary chain sweeps past more than one panel width, which keeps
// the integrand variation along steep chains bounded
inline bool needs_split(const StripEdge& a, const StripEdge& b, double hx) {
    if (a.extra_cuts != b.extra_cuts || a.xu.size() != b.xu.size())
        return true;
    for (std::size_t k = 0; k < a.xu.size(); ++k)
        if (std::fabs(a.xu[k] - b.xu[k]) > hx) return true;
    return false;
}

// Every polygon vertex kinks the row integral in y, and the derivative jump
// per unit of integrand discontinuity is s_out - s_in with the edge slopes
// dx/dy taken in traversal order. Orientation makes this hold uniformly for
// monotone vertices and for local extrema, where the pair of chains born or
// killed at the vertex acts as one folded ramp. Vertices on a horizontal
// edge step the row integral instead and cannot be repaired this way.
struct VertexKink {
    double y = 0.0;
    Vec2 pos;
    double jump = 0.0;
    bool usable = false;
};

inline std::vector<VertexKink> vertex_kinks(const PhasePolygon& p) {
    std::vector<VertexKink> ks;
    auto emit = [&](const std::vector<Vec2>& L) {
        std::size_t m = L.size();
        for (std::size_t i = 0; i < m; ++i) {
            Vec2 prev = L[(i + m - 1) % m], v = L[i], next = L[(i + 1) % m];
            double dy_in = v.y - prev.y, dy_out = next.y - v.y;
            VertexKink k;
            k.y = v.y;
            k.pos = v;
            if (dy_in != 0.0 && dy_out != 0.0) {
                k.jump = (next.x - v.x) / dy_out - (v.x - prev.x) / dy_in;
                k.usable = true;
            }
            ks.push_back(k);
        }
    };
    emit(p.outer());
    for (const auto& h : p.holes()) emit(h);
    std::sort(ks.begin(), ks.end(),
              [](const VertexKink& a, const VertexKink& b) { return a.y < b.y; });
    return ks;
}

// exact error of the three-point Gauss rule on the unit-slope ramp
// max(0, y - a), strip scaled to [0, 1]
inline double gl3_ramp_error(double a) {
    constexpr double kT0 = 0.5 * (1.0 - 0.7745966692414834);
    constexpr double kT2 = 0.5 * (1.0 + 0.7745966692414834);
    constexpr double kW0 = 0.2777777777777778;
    constexpr double kW1 = 0.4444444444444444;
    double exact = 0.5 * (1.0 - a) * (1.0 - a);
    double rule = kW0 * std::max(0.0, kT0 - a) +
                  kW1 * std::max(0.0, 0.5 - a) +
                  kW0 * std::max(0.0, kT2 - a);
    return exact - rule;
}

// vertical strip with three-point Gauss rows plus the exact ramp repair for
// every polygon vertex inside it
template <class F>
VolAcc scan_strip(const Box& b, double y0, double y1, const StripEdge& e0,
                  const StripEdge& e1, double hx, const PhasePolygon& chi,
                  const std::vector<const PhasePolygon*>& extras,
                  const std::vector<VertexKink>& kinks, int depth, F&& f) {
    if (depth > 0 && needs_split(e0, e1, hx)) {
        double ym = 0.5 * (y0 + y1);
        StripEdge em = strip_edge(chi, extras, ym);
        VolAcc a = scan_strip(b, y0, ym, e0, em, hx, chi, extras, kinks,
                              depth - 1, f);
        VolAcc c = scan_strip(b, ym, y1, em, e1, hx, chi, extras, kinks,
                              depth - 1, f);
        vol_add(a, c, 1.0);
        return a;
    }
    constexpr double kGl3A = 0.7745966692414834;   // sqrt(3/5)
    constexpr double kGl3W0 = 0.2777777777777778;  // 5/18
    constexpr double kGl3W1 = 0.4444444444444444;  // 8/18
    double ym = 0.5 * (y0 + y1);
    double hh = 0.5 * (y1 - y0);
    VolAcc lo = scan_row(b, ym - kGl3A * hh, hx, chi, extras, f);
    VolAcc mid = scan_row(b, ym, hx, chi, extras, f);
    VolAcc hi = scan_row(b, ym + kGl3A * hh, hx, chi, extras, f);
    VolAcc out{};
    vol_add(out, lo, kGl3W0 * (y1 - y0));
    vol_add(out, mid, kGl3W1 * (y1 - y0));
    vol_add(out, hi, kGl3W0 * (y1 - y0));

    double h = y1 - y0;
    auto it = std::lower_bound(
        kinks.begin(), kinks.end(), y0,
        [](const VertexKink& k, double y) { return k.y <= y; });
    for (; it != kinks.end() && it->y < y1; ++it) {
        if (!it->usable) continue;
        if (it->pos.x <= b.lo.x || it->pos.x >= b.hi.x) continue;
        VolAcc g1 = f(it->pos, 1.0);
        VolAcc g0 = f(it->pos, 0.0);
        double s = it->jump * h * h * gl3_ramp_error((it->y - y0) / h);
        for (std::size_t i = 0; i < kVolTerms; ++i)
            out[i] += s * (g1[i] - g0[i]);
    }
    return out;
}

template <class F>
VolAcc scan_volume(const Box& b, int n, const PhasePolygon& chi,
                   const std::vector<const PhasePolygon*>& extras, F&& f) {
    double hy = b.height() / n;
    double hx = b.width() / n;
    std::vector<StripEdge> edges((std::size_t)n + 1);
    for (int j = 0; j <= n; ++j)
        edges[(std::size_t)j] = strip_edge(chi, extras, b.lo.y + j * hy);
    std::vector<VertexKink> kinks = vertex_kinks(chi);
    std::vector<VolAcc> strips((std::size_t)n);
    parallel_for((std::size_t)n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
            double y0 = b.lo.y + (double)j * hy;
            strips[j] = scan_strip(b, y0, y0 + hy, edges[j], edges[j + 1],
                                   hx, chi, extras, kinks, 16, f);
        }
    });
    VolAcc total{};
    for (const auto& s : strips) vol_add(total, s, 1.0);
    return total;
}

struct SurfAcc {
    double tilt = 0.0;
    double r4 = 0.0;
    double r5 = 0.0;
    double r6 = 0.0;
    double a5 = 0.0;
};

inline SurfAcc surface_terms(const EntropyCtx& C, int n_quad) {
    const EntropyInputs& in = *C.in;
    double t = in.t;
    double sigma = in.par.sigma;
    SurfAcc acc;
    for (const auto& s : perimeter_measure(*in.phase, n_quad)) {
        ProjectionResult pr = in.curve->project_unchecked(s.point);
        bool in_band = std::fabs(pr.sdist) < C.r_c;
        Vec2 nu = s.normal;
        double wt = s.weight;
        if (!in_band) {
            acc.tilt += sigma * wt;  // xi vanishes outside the band
            continue;
        }
        ExtensionPoint ep = C.xi->eval(pr);
        NormalVelocities nv = normal_velocities(pr, *in.v, t);
        Mat2 jv = in.v->grad(s.point, t);
        Vec2 xi = ep.xi;
        Vec2 n_v = nv.normal;

        acc.tilt += sigma * (1.0 - xi.dot(nu)) * wt;
        acc.r4 -= sigma * (xi.dot(nu) * n_v.dot(jv.apply(n_v)) -
                           xi.dot(jv.apply(xi))) * wt;
        Vec2 q = (nv.grad_vbar - jv).transpose().apply(xi);
        Vec2 p = q - n_v.dot(q) * n_v;
        acc.r5 += sigma * nu.dot(p) * wt;
        acc.r6 += sigma * nu.dot(ep.grad_xi.apply(nv.vbar -
                                                  in.v->value(s.point, t))) * wt;
        if (in.w) {
            Mat2 jw = in.w->grad(s.point);
            acc.a5 -= sigma * xi.dot(jw.apply(nu - xi)) * wt;
        }
    }
    return acc;
}

struct VarAcc {
    double mult = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

inline VarAcc varifold_terms(const EntropyCtx& C, const VarifoldMeasure& V) {
    const EntropyInputs& in = *C.in;
    double t = in.t;
    double sigma = in.par.sigma;
    VarAcc acc;
    for (const auto& a : V.atoms()) {
        double excess = a.mass * (1.0 - a.theta);
        acc.mult += sigma * excess;
        ProjectionResult pr = in.curve->project_unchecked(a.pos);
        Vec2 xi;
        if (std::fabs(pr.sdist) < C.r_c) xi = C.xi->eval(pr).xi;
        Mat2 jv = in.v->grad(a.pos, t);
        Vec2 d = a.dir - xi;
        acc.r1 -= sigma * a.mass * d.dot(jv.apply(d));
        acc.r2 += sigma * excess * xi.dot(jv.apply(xi));
        if (in.w) {
            Mat2 jw = in.w->grad(a.pos);
            acc.a1 -= sigma * a.mass * d.dot(jw.apply(d));
            acc.a2 += sigma * excess * xi.dot(jw.apply(xi));
        }
    }
    return acc;
}

// per-component two-level certificate; tiny components are judged against a
// thousandth of the dominant magnitude instead of their own size
template <std::size_t N>
void check_refinement(const std::array<double, N>& coarse,
                      const std::array<double, N>& fine,
                      const QuadratureOptions& opt, const char* what) {
    double dominant = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        dominant = std::max(dominant,
                            std::max(std::fabs(coarse[i]), std::fabs(fine[i])));
    for (std::size_t i = 0; i < N; ++i) {
        double scale = std::max(
            {std::fabs(coarse[i]), std::fabs(fine[i]), 1e-3 * dominant});
        if (std::fabs(fine[i] - coarse[i]) >
            std::max(opt.abs_tol, opt.rel_tol * scale))
            throw QuadratureNotConverged(
                std::string(what) + " component " + std::to_string(i) +
                " moved by " + std::to_string(fine[i] - coarse[i]) +
                " under refinement");
    }
}

inline void check_varifold(const VarifoldMeasure& V,
                           const PhasePolygon& poly) {
    double mass = 0.0;
    for (const auto& a : V.atoms()) mass += a.mass;
    const std::function<double(Vec2)> probes[] = {
        [](Vec2) { return 1.0; },
        [](Vec2 x) { return std::sin(0.9 * x.x + 0.4 * x.y); },
        [](Vec2 x) { return std::cos(0.7 * x.x - 1.1 * x.y); }};
    for (const auto& psi : probes)
        if (compatibility_residual(V, poly, psi, 1) > 1e-4 * (1.0 + mass))
            throw IncompatibleVarifold(
                "varifold first moment disagrees with the phase boundary");
}

inline EntropyReport evaluate_entropy(const EntropyInputs& in) {
    if (!in.phase || !in.u || !in.curve || !in.v)
        throw ConfigInvalid("entropy inputs need phase, u, curve and v");
    in.par.validate();

    XiField fallback_xi(*in.curve);
    const XiField* xi = in.xi ? in.xi : &fallback_xi;
    EntropyCtx C{&in, xi, in.curve->r_c()};

    std::optional<VarifoldMeasure> lifted;
    if (!in.varifold) lifted.emplace(lift_varifold(*in.phase));
    const VarifoldMeasure& V = in.varifold ? *in.varifold : *lifted;
    check_varifold(V, *in.phase);

    double rc = in.curve->r_c();
    std::vector<PhasePolygon> features;
    features.push_back(polygonize(*in.curve, 4096, false));
    for (double d : {-rc, -0.5 * rc, 0.5 * rc, rc})
        features.push_back(offset_polygon(*in.curve, d, 1024));
    std::vector<const PhasePolygon*> extras;
    for (const auto& p : features) extras.push_back(&p);

    auto f = [&](Vec2 x, double chi_u) {
        return detail::volume_integrand(x, chi_u, C);
    };
    int n = in.quad.n;
    VolAcc coarse = scan_volume(in.domain, n, *in.phase, extras, f);
    VolAcc fine = scan_volume(in.domain, 2 * n, *in.phase, extras, f);
    check_refinement(coarse, fine, in.quad, "volume integral");

    SurfAcc sc = surface_terms(C, in.surface_quad);
    SurfAcc sf = surface_terms(C, 2 * in.surface_quad);
    check_refinement(
        std::array<double, 5>{sc.tilt, sc.r4, sc.r5, sc.r6, sc.a5},
        std::array<double, 5>{sf.tilt, sf.r4, sf.r5, sf.r6, sf.a5}, in.quad,
        "surface integral");

    VarAcc va = varifold_terms(C, V);

    EntropyReport rep;
    rep.t = in.t;
    rep.e_tilt = sf.tilt;
    rep.e_kinetic = fine[0];
    rep.e_weightvol = fine[1];
    rep.e_multiplicity = va.mult;
    rep.r_surten = va.r1 + va.r2 + fine[2] + sf.r4 + sf.r5 + sf.r6;
    rep.r_dt = fine[3];
    rep.r_visc = fine[4];
    rep.r_adv = fine[5];
    rep.r_weightvol = fine[6];
    rep.a_visc = fine[7];
    rep.a_dt = fine[8];
    rep.a_adv = fine[9];
    rep.a_surten = va.a1 + va.a2 + fine[10] + sf.a5;
    rep.a_weightvol = fine[11];
    rep.dissipation = fine[12];
    return rep;
}

}  // namespace detail

inline EntropyReport relative_entropy(const EntropyInputs& in) {
    return detail::evaluate_entropy(in);
}

inline EntropyReport term_budget(const EntropyInputs& in) {
    return detail::evaluate_entropy(in);
}

// viscous dissipation of the difference field on its own, for flows that
// need no interface data beyond the weak indicator
inline double dissipation(const VelocityField& u, const VelocityField& v,
                          const CompensationField* w, FluidParams par,
                          const PhasePolygon& chi_u, const Box& domain,
                          double t, QuadratureOptions opt = {}) {
    par.validate();
    auto f = [&](Vec2 x, double chi) {
        detail::VolAcc g{};
        Mat2 d = (u.grad(x, t) - v.grad(x, t) - (w ? w->grad(x) : Mat2{})).sym();
        g[0] = 2.0 * par.mu(chi) * d.frob2();
        return g;
    };
    detail::VolAcc coarse =
        detail::scan_volume(domain, opt.n, chi_u, {}, f);
    detail::VolAcc fine =
        detail::scan_volume(domain, 2 * opt.n, chi_u, {}, f);
    detail::check_refinement(std::array<double, 1>{coarse[0]},
                             std::array<double, 1>{fine[0]}, opt,
                             "dissipation integral");
    return fine[0];
}

}  // namespace relent
