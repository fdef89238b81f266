#pragma once

// Viscosity-jump compensation: the tangential stress vector W carried by the
// strong interface, one-sided ray primitives w+- supported in the band, and
// the divergence-free correction realized as a spectral projection on a
// periodic padded grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "relent/core.hpp"
#include "relent/cutoffs.hpp"
#include "relent/flow.hpp"
#include "relent/geometry.hpp"
#include "relent/grid.hpp"
#include "relent/heights.hpp"

namespace relent {

// Regularized one-sided heights along the interface, sampled at uniform curve
// parameters; periodic linear interpolation in between (exact for constants).
struct BandHeights {
    std::vector<double> s;
    std::vector<double> hp;
    std::vector<double> hm;

    static BandHeights constant(int n, double plus_value, double minus_value) {
        if (n < 4) throw ConfigInvalid("band heights need at least 4 samples");
        BandHeights bh;
        bh.s.resize(n);
        for (int i = 0; i < n; ++i) bh.s[i] = kTwoPi * i / n;
        bh.hp.assign(n, plus_value);
        bh.hm.assign(n, minus_value);
        return bh;
    }

    static BandHeights from_mollified(const HeightField& hf,
                                      const MollifiedHeight& mh) {
        BandHeights bh;
        bh.s = hf.s;
        bh.hp = mh.h_plus;
        bh.hm = mh.h_minus;
        return bh;
    }

    int size() const { return static_cast<int>(s.size()); }

    double plus(double sq) const { return interp(hp, sq); }
    double minus(double sq) const { return interp(hm, sq); }

    void validate(double rc) const {
        if (size() < 4) throw ConfigInvalid("band heights need at least 4 samples");
        for (int i = 0; i < size(); ++i) {
            if (hp[i] < -1e-12 || hm[i] < -1e-12)
                throw ConfigInvalid("band heights must be nonnegative");
            if (hp[i] > 0.5 * rc + 1e-12 || hm[i] > 0.5 * rc + 1e-12)
                throw BandOverflow("band height exceeds r_c/2");
        }
    }

    // integral over the interface of |h|^2 + |dh/darc|^2, both sides
    double h1_norm_sq(const FourierCurve2& curve) const {
        int n = size();
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            int ip = (i + 1) % n, im = (i + n - 1) % n;
            CurvePoint c = curve.eval_all(s[i]);
            double speed = c.d1.norm();
            double ds = kTwoPi / n;
            double dphp = (hp[ip] - hp[im]) / (2.0 * ds * speed);
            double dphm = (hm[ip] - hm[im]) / (2.0 * ds * speed);
            acc += (hp[i] * hp[i] + dphp * dphp + hm[i] * hm[i] +
                    dphm * dphm) * speed * ds;
        }
        return acc;
    }

private:
    double interp(const std::vector<double>& h, double sq) const {
        int n = size();
        double u = sq / kTwoPi * n;
        u -= n * std::floor(u / n);
        int i0 = std::min(static_cast<int>(u), n - 1);
        double f = u - i0;
        return (1.0 - f) * h[i0] + f * h[(i0 + 1) % n];
    }
};

// W(x) = [2(mu+ - mu-) / (mu+(1-chi_v) + mu- chi_v)] (Id - n (x) n)(Dsym v . n)
// with n the inner normal at the foot of x; tangential by construction. The
// denominator viscosity is the one of the phase opposite to x.
class StressJump {
public:
    StressJump(const VelocityField& v, const FourierCurve2& curve,
               FluidParams par)
        : v_(&v), curve_(&curve), par_(par) {
        par_.validate();
    }

    // checked evaluation: projects x, throws outside the tubular radius
    Vec2 at(Vec2 x, double t) const {
        ProjectionResult pr = curve_->project(x);
        return from_parts(pr.normal, x, pr.sdist >= 0.0, t);
    }

    // W at foot + y n for a known projection; the foot and normal are shared
    // by every point of the ray
    Vec2 along_ray(Vec2 foot, Vec2 n, double y, double t) const {
        return from_parts(n, foot + y * n, y >= 0.0, t);
    }

    bool vanishes() const { return par_.equal_viscosities(); }

private:
    Vec2 from_parts(Vec2 n, Vec2 x, bool inside, double t) const {
        // interface points count as inside (measure-zero tie-break)
        double denom = inside ? par_.mu_minus : par_.mu_plus;
        double pref = 2.0 * (par_.mu_plus - par_.mu_minus) / denom;
        Vec2 dn = v_->sym_grad(x, t).apply(n);
        return pref * (dn - dn.dot(n) * n);
    }

    const VelocityField* v_;
    const FourierCurve2* curve_;
    FluidParams par_;
};

// Per-node projection data inside the band, cached once per configuration so
// grid assembly and the later budget sweeps never re-project.
struct BandCache {
    GridBox box;
    double reach = 0.0;
    std::vector<std::uint8_t> in_band;
    std::vector<double> sd;
    std::vector<double> s;
    std::vector<Vec2> normal;

    static BandCache build(const FourierCurve2& curve, const GridBox& box,
                           double reach) {
        box.validate();
        BandCache c;
        c.box = box;
        c.reach = reach;
        std::size_t m = static_cast<std::size_t>(box.n) * box.n;
        c.in_band.assign(m, 0);
        c.sd.assign(m, 0.0);
        c.s.assign(m, 0.0);
        c.normal.assign(m, Vec2{0.0, 0.0});

        // coarse polyline prefilter: only points whose distance to the
        // sample set can be below the reach are projected exactly
        int np = 1024;
        std::vector<Vec2> line = curve.sample_loop(np);
        double chord = 0.0;
        for (int i = 0; i < np; ++i)
            chord = std::max(chord, (line[(i + 1) % np] - line[i]).norm());
        double cut = reach + chord;

        Vec2 lo = line[0], hi = line[0];
        for (const Vec2& p : line) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        }

        parallel_for(m, [&](std::size_t klo, std::size_t khi) {
            for (std::size_t k = klo; k < khi; ++k) {
                int iy = static_cast<int>(k) / box.n;
                int ix = static_cast<int>(k) % box.n;
                Vec2 x = box.point(iy, ix);
                if (x.x < lo.x - cut || x.x > hi.x + cut ||
                    x.y < lo.y - cut || x.y > hi.y + cut)
                    continue;
                double d2min = std::numeric_limits<double>::max();
                for (const Vec2& p : line)
                    d2min = std::min(d2min, (x - p).norm2());
                if (d2min > cut * cut) continue;
                ProjectionResult pr = curve.project_unchecked(x);
                if (std::fabs(pr.sdist) >= reach) continue;
                c.in_band[k] = 1;
                c.sd[k] = pr.sdist;
                c.s[k] = pr.s;
                c.normal[k] = pr.normal;
            }
        });
        return c;
    }
};

// square periodic box: bbox max extent of the curve plus 2*pad_factor*r_c
inline GridBox compensation_box(const FourierCurve2& curve, int n,
                                double pad_factor = 3.0) {
    std::vector<Vec2> line = curve.sample_loop(512);
    Vec2 lo = line[0], hi = line[0];
    for (const Vec2& p : line) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    double side = std::max(hi.x - lo.x, hi.y - lo.y) +
                  2.0 * pad_factor * curve.r_c();
    Vec2 center = 0.5 * (lo + hi);
    return {{center.x - 0.5 * side, center.y - 0.5 * side}, side, n};
}

namespace detail {

constexpr double kGl4X[4] = {0.06943184420297371239, 0.33000947820757186760,
                             0.66999052179242813240, 0.93056815579702628761};
constexpr double kGl4W[4] = {0.17392742256872692869, 0.32607257743127307131,
                             0.32607257743127307131, 0.17392742256872692869};

// eta * integral of W along the normal ray through the foot, the integration
// range gated by the signed distance and the one-sided height
inline Vec2 w_raw_core(const StressJump& stress, const BandHeights& bh,
                       double rc, Vec2 foot, Vec2 n, double sd, double s,
                       double t) {
    double eta = ray_cutoff()(std::fabs(sd) / rc);
    if (eta == 0.0) return {0.0, 0.0};
    double y0 = 0.0, y1 = 0.0;
    if (sd > 0.0) {
        y1 = std::min(sd, bh.plus(s));
    } else if (sd < 0.0) {
        y0 = std::max(sd, -bh.minus(s));
    }
    if (y1 - y0 <= 0.0) return {0.0, 0.0};
    double len = y1 - y0;
    Vec2 acc{0.0, 0.0};
    for (int q = 0; q < 4; ++q)
        acc += (len * kGl4W[q]) *
               stress.along_ray(foot, n, y0 + len * kGl4X[q], t);
    return eta * acc;
}

} // namespace detail

// pointwise raw compensation (projects x itself); zero outside the band
inline Vec2 w_raw_at(const VelocityField& v, const FourierCurve2& curve,
                     const FluidParams& par, const BandHeights& bh, Vec2 x,
                     double t) {
    bh.validate(curve.r_c());
    ProjectionResult pr = curve.project_unchecked(x);
    if (std::fabs(pr.sdist) >= 0.5 * curve.r_c()) return {0.0, 0.0};
    StressJump stress(v, curve, par);
    Vec2 foot = x - pr.sdist * pr.normal;
    return detail::w_raw_core(stress, bh, curve.r_c(), foot, pr.normal,
                              pr.sdist, pr.s, t);
}

struct CompensationField {
    GridField2 w;       // final solenoidal field
    GridField2 w_raw;   // band primitive before the correction
    GridField2 grad_x;  // spectral d/dx of w (both components)
    GridField2 grad_y;  // spectral d/dy of w
    double div_linf = 0.0;
    double t = 0.0;

    Vec2 value(Vec2 x) const { return w.value(x); }
    Vec2 raw_value(Vec2 x) const { return w_raw.value(x); }
    double l2() const { return w.l2(); }

    // (i,j) entry is the j-derivative of component i
    Mat2 grad(Vec2 x) const {
        Vec2 gx = grad_x.value(x), gy = grad_y.value(x);
        return {gx.x, gy.x, gx.y, gy.y};
    }
};

inline CompensationField build_compensation(const VelocityField& v,
                                            const FourierCurve2& curve,
                                            const FluidParams& par,
                                            const BandHeights& bh, double t,
                                            const GridBox& box,
                                            const BandCache* cache = nullptr) {
    par.validate();
    bh.validate(curve.r_c());
    double rc = curve.r_c();
    if (0.5 * rc < 4.0 * box.spacing())
        throw GridTooCoarse("band half-width " + std::to_string(0.5 * rc) +
                            " spans fewer than 4 cells");

    BandCache local;
    if (!cache) {
        local = BandCache::build(curve, box, 0.5 * rc);
        cache = &local;
    }

    StressJump stress(v, curve, par);
    std::size_t m = static_cast<std::size_t>(box.n) * box.n;
    std::vector<double> rx(m, 0.0), ry(m, 0.0);
    parallel_for(m, [&](std::size_t klo, std::size_t khi) {
        for (std::size_t k = klo; k < khi; ++k) {
            if (!cache->in_band[k]) continue;
            int iy = static_cast<int>(k) / box.n;
            int ix = static_cast<int>(k) % box.n;
            Vec2 x = box.point(iy, ix);
            Vec2 n = cache->normal[k];
            Vec2 foot = x - cache->sd[k] * n;
            Vec2 val = detail::w_raw_core(stress, bh, rc, foot, n,
                                          cache->sd[k], cache->s[k], t);
            rx[k] = val.x;
            ry[k] = val.y;
        }
    });

    GridField2 w_raw(box, std::move(rx), std::move(ry));
    GridField2 w = w_raw.leray();
    CompensationField out{std::move(w), std::move(w_raw),
                          GridField2::zeros(box), GridField2::zeros(box),
                          0.0, t};
    out.grad_x = out.w.spectral_partial(0);
    out.grad_y = out.w.spectral_partial(1);
    out.div_linf = out.w.spectral_divergence().linf();
    return out;
}

struct GradientStructureReport {
    int probes = 0;
    double max_normal_deriv_error = 0.0;  // sup |FD_n w_raw - W| at probes
    double dev_l2_sq = 0.0;  // integral of |grad w - indicator W(x)n|^2
    double dev_smooth_sq = 0.0;  // same, excluding 2h collars at the kinks
    double h_budget = 0.0;   // integral of |h|^2 + |grad h|^2 over I_v
    double ratio = 0.0;        // dev_l2_sq / h_budget
    double ratio_smooth = 0.0; // dev_smooth_sq / h_budget
};

// Probes sit strictly inside the one-sided strips, clear of the interface,
// the height graphs, and the eta ramp, where the normal derivative of the
// raw field is exactly W.
inline GradientStructureReport gradient_structure_check(
    const CompensationField& field, const BandCache& cache,
    const StressJump& stress, const BandHeights& bh,
    const FourierCurve2& curve, double t) {
    const GridBox& box = field.w.box();
    double h = box.spacing();
    double rc = curve.r_c();
    GradientStructureReport rep;

    std::size_t m = static_cast<std::size_t>(box.n) * box.n;
    for (std::size_t k = 0; k < m; ++k) {
        if (!cache.in_band[k]) continue;
        double sd = cache.sd[k];
        double cs = cache.s[k];
        bool plus_probe = sd > 2.0 * h &&
                          sd < std::min(bh.plus(cs), 0.25 * rc) - 2.0 * h;
        bool minus_probe = sd < -2.0 * h &&
                           sd > -std::min(bh.minus(cs), 0.25 * rc) + 2.0 * h;
        if (!plus_probe && !minus_probe) continue;
        int iy = static_cast<int>(k) / box.n;
        int ix = static_cast<int>(k) % box.n;
        Vec2 x = box.point(iy, ix);
        Vec2 n = cache.normal[k];
        Vec2 fd = (field.w_raw.value(x + h * n) -
                   field.w_raw.value(x - h * n)) / (2.0 * h);
        Vec2 foot = x - sd * n;
        // the band primitive grows away from the interface on both sides,
        // so its normal derivative carries the sign of the side
        Vec2 wexp = (sd >= 0.0 ? 1.0 : -1.0) * stress.along_ray(foot, n, sd, t);
        rep.max_normal_deriv_error =
            std::max(rep.max_normal_deriv_error, (fd - wexp).norm());
        ++rep.probes;
    }

    for (std::size_t k = 0; k < m; ++k) {
        int iy = static_cast<int>(k) / box.n;
        int ix = static_cast<int>(k) % box.n;
        Vec2 gx = field.grad_x.at(iy, ix), gy = field.grad_y.at(iy, ix);
        Mat2 grad{gx.x, gy.x, gx.y, gy.y};
        Mat2 expect{0.0, 0.0, 0.0, 0.0};
        bool collar = false;
        if (cache.in_band[k]) {
            double sd = cache.sd[k];
            double cs = cache.s[k];
            bool strip = (sd >= 0.0 && sd <= bh.plus(cs)) ||
                         (sd <= 0.0 && sd >= -bh.minus(cs));
            if (strip) {
                Vec2 n = cache.normal[k];
                Vec2 foot = box.point(iy, ix) - sd * n;
                Vec2 wv = stress.along_ray(foot, n, sd, t);
                expect = Mat2::outer((sd >= 0.0 ? 1.0 : -1.0) * wv, n);
            }
            // the gradient jumps across the interface and the strip caps;
            // grid cells straddling those lines carry pure representation
            // error, which would otherwise swamp the continuum deviation
            collar = std::fabs(sd) <= 2.0 * h ||
                     std::fabs(sd - bh.plus(cs)) <= 2.0 * h ||
                     std::fabs(sd + bh.minus(cs)) <= 2.0 * h;
        }
        double d2 = (grad - expect).frob2();
        rep.dev_l2_sq += d2;
        if (!collar) rep.dev_smooth_sq += d2;
    }
    rep.dev_l2_sq *= h * h;
    rep.dev_smooth_sq *= h * h;
    rep.h_budget = bh.h1_norm_sq(curve);
    rep.ratio = rep.h_budget > 0.0 ? rep.dev_l2_sq / rep.h_budget : 0.0;
    rep.ratio_smooth =
        rep.h_budget > 0.0 ? rep.dev_smooth_sq / rep.h_budget : 0.0;
    return rep;
}

} // namespace relent
