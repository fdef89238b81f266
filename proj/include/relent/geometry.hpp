#pragma once

// Smooth closed interface curves given by truncated Fourier series, with
// analytic derivatives, curvature, nearest-point projection, signed distance
// and the tubular-neighborhood change of variables x = foot + sdist * normal.

#include <algorithm>
#include <complex>
#include <limits>
#include <vector>

#include "relent/core.hpp"

namespace relent {

struct ProjectionResult {
    double s = 0.0;      // parameter of the foot point
    Vec2 foot;           // nearest point on the curve
    double sdist = 0.0;  // signed distance, positive inside
    Vec2 normal;         // inner unit normal at the foot
    Vec2 tangent;        // unit tangent at the foot
    double kappa = 0.0;  // signed curvature at the foot
    Mat2 hess_sdist;     // second derivatives of the signed distance at x
    Mat2 grad_proj;      // gradient of the projection map at x
};

struct CurvePoint {
    Vec2 p;
    Vec2 d1;
    Vec2 d2;
    Vec2 d3;
};

class FourierCurve2 {
public:
    // coeffs[k + K] is the complex coefficient of e^{iks}, k = -K..K, for
    // z(s) = x(s) + i y(s). The parameterization is normalized to
    // counterclockwise so that the inner normal is the quarter-turn of the
    // tangent.
    FourierCurve2(std::vector<std::complex<double>> coeffs, double r_c,
                  bool validate = true)
        : c_(std::move(coeffs)), rc_(r_c) {
        if (c_.empty() || c_.size() % 2 == 0)
            throw InvalidCurve("coefficient list must have odd length 2K+1");
        if (!(rc_ > 0.0)) throw InvalidTubularRadius("r_c must be positive");
        K_ = static_cast<int>(c_.size() / 2);
        normalize_orientation();
        build_cache();
        if (validate) {
            check_simple();
            check_band_injectivity();
        }
    }

    static FourierCurve2 circle(Vec2 center, double radius, double r_c,
                                bool validate = true) {
        std::vector<std::complex<double>> c(3);
        c[0] = 0.0;
        c[1] = std::complex<double>(center.x, center.y);
        c[2] = radius;
        return FourierCurve2(std::move(c), r_c, validate);
    }

    static FourierCurve2 ellipse(Vec2 center, double a, double b, double r_c,
                                 bool validate = true) {
        // z = a cos s + i b sin s = ((a+b)/2) e^{is} + ((a-b)/2) e^{-is}
        std::vector<std::complex<double>> c(3);
        c[0] = 0.5 * (a - b);
        c[1] = std::complex<double>(center.x, center.y);
        c[2] = 0.5 * (a + b);
        return FourierCurve2(std::move(c), r_c, validate);
    }

    int modes() const { return K_; }
    double r_c() const { return rc_; }
    const std::vector<std::complex<double>>& coefficients() const { return c_; }
    double length() const { return length_; }
    double diameter() const { return diameter_; }
    double max_speed() const { return sup_speed_; }
    double max_abs_curvature() const { return sup_kappa_; }

    CurvePoint eval_all(double s) const {
        std::complex<double> w = std::polar(1.0, s);
        std::complex<double> e = std::polar(1.0, -K_ * s);
        std::complex<double> z = 0.0, z1 = 0.0, z2 = 0.0, z3 = 0.0;
        for (int k = -K_; k <= K_; ++k) {
            const std::complex<double>& ck = c_[k + K_];
            std::complex<double> term = ck * e;
            z += term;
            z1 += double(k) * term;
            z2 += double(k) * double(k) * term;
            z3 += double(k) * double(k) * double(k) * term;
            e *= w;
        }
        CurvePoint out;
        out.p = {z.real(), z.imag()};
        // d/ds e^{iks} = ik e^{iks}
        out.d1 = {-z1.imag(), z1.real()};
        out.d2 = {-z2.real(), -z2.imag()};
        out.d3 = {z3.imag(), -z3.real()};
        return out;
    }

    Vec2 eval(double s) const { return eval_all(s).p; }
    Vec2 d1(double s) const { return eval_all(s).d1; }
    Vec2 d2(double s) const { return eval_all(s).d2; }

    Vec2 unit_tangent(double s) const { return eval_all(s).d1.normalized(); }
    // inner normal: quarter turn of the tangent (counterclockwise curve)
    Vec2 inner_normal(double s) const { return unit_tangent(s).perp(); }

    // signed curvature; positive where the curve bends toward the inner normal
    double curvature(double s) const {
        CurvePoint c = eval_all(s);
        double sp2 = c.d1.norm2();
        return c.d1.cross(c.d2) / (sp2 * std::sqrt(sp2));
    }

    // d kappa / ds in the curve parameter (not arclength)
    double curvature_deriv(double s) const {
        CurvePoint c = eval_all(s);
        double sp2 = c.d1.norm2();
        double sp3 = sp2 * std::sqrt(sp2);
        return c.d1.cross(c.d3) / sp3 -
               3.0 * c.d1.cross(c.d2) * c.d1.dot(c.d2) / (sp3 * sp2);
    }

    // curvature vector: kappa times the inner normal
    Vec2 curvature_vector(double s) const {
        CurvePoint c = eval_all(s);
        double sp2 = c.d1.norm2();
        double kappa = c.d1.cross(c.d2) / (sp2 * std::sqrt(sp2));
        return kappa * c.d1.normalized().perp();
    }

    // Nearest point on the curve, unrestricted; returns (param, distance^2).
    std::pair<double, double> nearest(Vec2 x) const {
        int best = 0;
        double bestd2 = std::numeric_limits<double>::max();
        for (int i = 0; i < nseed_; ++i) {
            double d2 = (seed_p_[i] - x).norm2();
            if (d2 < bestd2) {
                bestd2 = d2;
                best = i;
            }
        }
        double s = newton_foot(x, seed_s_[best]);
        double d2 = (eval(s) - x).norm2();
        // Adjacent seeds can win after polishing when x sits near a basin
        // boundary of the distance function.
        for (int di : {-1, 1}) {
            int j = (best + di + nseed_) % nseed_;
            double sj = newton_foot(x, seed_s_[j]);
            double dj = (eval(sj) - x).norm2();
            if (dj < d2) {
                d2 = dj;
                s = sj;
            }
        }
        return {wrap(s), d2};
    }

    // Signed distance, positive inside; total function.
    double signed_distance(Vec2 x) const {
        auto [s, d2] = nearest(x);
        return signed_distance_at(x, s, d2);
    }

    // Projection with the tubular-neighborhood contract: rejects points at or
    // beyond distance r_c and ambiguous (medial-axis) points.
    ProjectionResult project(Vec2 x) const {
        auto [s, d2] = nearest(x);
        detect_ambiguity(x, s, d2);
        double sd = signed_distance_at(x, s, d2);
        if (std::fabs(sd) >= rc_)
            throw OutsideTubularNeighborhood("point at distance " +
                                             std::to_string(std::fabs(sd)) +
                                             " >= r_c = " + std::to_string(rc_));
        return result_at(s, sd);
    }

    // Same fields as project, skipping the band and ambiguity guards (used by
    // samplers that handle those cases themselves).
    ProjectionResult project_unchecked(Vec2 x) const {
        auto [s, d2] = nearest(x);
        double sd = signed_distance_at(x, s, d2);
        return result_at(s, sd);
    }

    // Exact image under x -> A x + b; Fourier order is preserved.
    FourierCurve2 affine(const Mat2& A, Vec2 b, double new_rc,
                         bool validate = true) const {
        if (A.a11 * A.a22 - A.a12 * A.a21 <= 0.0)
            throw InvalidCurve("affine map must preserve orientation");
        std::complex<double> alpha(0.5 * (A.a11 + A.a22), 0.5 * (A.a21 - A.a12));
        std::complex<double> beta(0.5 * (A.a11 - A.a22), 0.5 * (A.a21 + A.a12));
        std::vector<std::complex<double>> out(c_.size());
        for (int k = -K_; k <= K_; ++k) {
            out[k + K_] = alpha * c_[k + K_] + beta * std::conj(c_[-k + K_]);
        }
        out[K_] += std::complex<double>(b.x, b.y);
        return FourierCurve2(std::move(out), new_rc, validate);
    }

    // Uniform parameter samples as a counterclockwise vertex loop.
    std::vector<Vec2> sample_loop(int n) const {
        std::vector<Vec2> v(n);
        for (int i = 0; i < n; ++i) v[i] = eval(kTwoPi * i / n);
        return v;
    }

    // cumulative arclength from parameter 0 to s (dense trapezoid table)
    double arclength(double s) const {
        double t = wrap(s) / kTwoPi * narc_;
        int i = std::min(static_cast<int>(t), narc_ - 1);
        double f = t - i;
        return arc_table_[i] + f * (arc_table_[i + 1] - arc_table_[i]);
    }

private:
    std::vector<std::complex<double>> c_;
    double rc_;
    int K_ = 0;

    static constexpr int nseed_ = 256;
    std::vector<double> seed_s_;
    std::vector<Vec2> seed_p_;
    double sup_speed_ = 0.0;
    double min_speed_ = 0.0;
    double sup_kappa_ = 0.0;
    double length_ = 0.0;
    double diameter_ = 0.0;
    static constexpr int narc_ = 4096;
    std::vector<double> arc_table_;

    static double wrap(double s) {
        s = std::fmod(s, kTwoPi);
        return s < 0.0 ? s + kTwoPi : s;
    }

    void normalize_orientation() {
        double area = 0.0;
        int n = 64;
        Vec2 prev = eval_unnormalized(0.0);
        for (int i = 1; i <= n; ++i) {
            Vec2 cur = eval_unnormalized(kTwoPi * i / n);
            area += prev.cross(cur);
            prev = cur;
        }
        if (area < 0.0) {
            // reverse parameterization: z(-s), coefficients c_k -> c_{-k}
            std::reverse(c_.begin(), c_.end());
        }
    }

    Vec2 eval_unnormalized(double s) const {
        std::complex<double> w = std::polar(1.0, s);
        std::complex<double> e = std::polar(1.0, -K_ * s);
        std::complex<double> z = 0.0;
        for (int k = -K_; k <= K_; ++k) {
            z += c_[k + K_] * e;
            e *= w;
        }
        return {z.real(), z.imag()};
    }

    void build_cache() {
        seed_s_.resize(nseed_);
        seed_p_.resize(nseed_);
        for (int i = 0; i < nseed_; ++i) {
            seed_s_[i] = kTwoPi * i / nseed_;
            seed_p_[i] = eval(seed_s_[i]);
        }
        sup_speed_ = 0.0;
        min_speed_ = std::numeric_limits<double>::max();
        sup_kappa_ = 0.0;
        arc_table_.assign(narc_ + 1, 0.0);
        double acc = 0.0;
        double prev_speed = eval_all(0.0).d1.norm();
        Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
        Vec2 hi{-lo.x, -lo.y};
        for (int i = 0; i <= narc_; ++i) {
            double s = kTwoPi * i / narc_;
            CurvePoint c = eval_all(s);
            double speed = c.d1.norm();
            sup_speed_ = std::max(sup_speed_, speed);
            min_speed_ = std::min(min_speed_, speed);
            double kap = std::fabs(c.d1.cross(c.d2)) / (speed * speed * speed);
            sup_kappa_ = std::max(sup_kappa_, kap);
            if (i > 0) {
                acc += 0.5 * (speed + prev_speed) * (kTwoPi / narc_);
                arc_table_[i] = acc;
            }
            prev_speed = speed;
            lo.x = std::min(lo.x, c.p.x);
            lo.y = std::min(lo.y, c.p.y);
            hi.x = std::max(hi.x, c.p.x);
            hi.y = std::max(hi.y, c.p.y);
        }
        length_ = acc;
        diameter_ = std::max(hi.x - lo.x, hi.y - lo.y);
        if (!(sup_speed_ > 0.0) || !(min_speed_ > 1e-12 * sup_speed_))
            throw InvalidCurve("parameterization degenerates (zero speed)");
    }

    // Newton iteration on the stationarity condition (x - gamma(s)) . gamma'(s) = 0
    double newton_foot(Vec2 x, double s) const {
        double step_cap = kTwoPi / nseed_;
        for (int it = 0; it < 60; ++it) {
            CurvePoint c = eval_all(s);
            Vec2 r = x - c.p;
            double f = r.dot(c.d1);
            double fp = -c.d1.norm2() + r.dot(c.d2);
            double ds;
            if (fp < 0.0) {
                ds = -f / fp;
            } else {
                // fall back to a damped gradient step away from the maximum
                ds = f > 0.0 ? step_cap * 0.5 : -step_cap * 0.5;
            }
            ds = std::clamp(ds, -step_cap, step_cap);
            s += ds;
            if (std::fabs(ds) < 1e-15) break;
        }
        return s;
    }

    double signed_distance_at(Vec2 x, double s_foot, double d2) const {
        Vec2 n = inner_normal(s_foot);
        Vec2 r = x - eval(s_foot);
        double sd = r.dot(n);
        // keep the exact magnitude from the nearest-point search
        double mag = std::sqrt(d2);
        return sd >= 0.0 ? mag : -mag;
    }

    ProjectionResult result_at(double s, double sd) const {
        CurvePoint c = eval_all(s);
        double sp2 = c.d1.norm2();
        double kappa = c.d1.cross(c.d2) / (sp2 * std::sqrt(sp2));
        Vec2 tau = c.d1 / std::sqrt(sp2);
        Vec2 n = tau.perp();
        double denom = 1.0 - sd * kappa;
        Mat2 tt = Mat2::outer(tau, tau);
        Mat2 nn = Mat2::outer(n, n);
        ProjectionResult out;
        out.s = wrap(s);
        out.foot = c.p;
        out.sdist = sd;
        out.normal = n;
        out.tangent = tau;
        out.kappa = kappa;
        out.hess_sdist = tt * (-kappa / denom);
        out.grad_proj = Mat2::identity() - nn - out.hess_sdist * sd;
        return out;
    }

    // Spec rule: two converged feet with distances within 1e-9 but positions
    // apart by more than 1e-3 make the projection ambiguous.
    void detect_ambiguity(Vec2 x, double s_best, double d2_best) const {
        double d_best = std::sqrt(d2_best);
        Vec2 foot_best = eval(s_best);
        double window = 2.0 * sup_speed_ * (kTwoPi / nseed_);
        for (int i = 0; i < nseed_; ++i) {
            double d_seed = (seed_p_[i] - x).norm();
            if (d_seed > d_best + window) continue;
            double s = newton_foot(x, seed_s_[i]);
            Vec2 foot = eval(s);
            double d = (foot - x).norm();
            if (d - d_best < 1e-9 && (foot - foot_best).norm() > 1e-3)
                throw AmbiguousProjection("two nearest feet at distance " +
                                          std::to_string(d_best));
        }
    }

    // Exact crossing test on a fine polyline. A transversal self-intersection
    // of the smooth curve forces a segment crossing of any fine enough
    // discretization, which the orientation signs detect exactly.
    void check_simple() const {
        const int n = 2048;
        std::vector<Vec2> p(n);
        for (int i = 0; i < n; ++i) p[i] = eval(kTwoPi * i / n);

        // retraced-arc guard: distinct parameters mapping to one point
        double res = sup_speed_ * (kTwoPi / n);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 2; j < n && j - i < n - 1; ++j) {
                if ((p[i] - p[j]).norm() < 1e-3 * res)
                    throw InvalidCurve("curve retraces itself near parameter " +
                                       std::to_string(kTwoPi * i / n));
            }
        }

        struct Seg {
            double xmin, xmax;
            int i;
        };
        std::vector<Seg> segs(n);
        for (int i = 0; i < n; ++i) {
            const Vec2& a = p[i];
            const Vec2& b = p[(i + 1) % n];
            segs[i] = {std::min(a.x, b.x), std::max(a.x, b.x), i};
        }
        std::sort(segs.begin(), segs.end(),
                  [](const Seg& a, const Seg& b) { return a.xmin < b.xmin; });
        auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
            return (b - a).cross(c - a);
        };
        for (std::size_t si = 0; si < segs.size(); ++si) {
            for (std::size_t sj = si + 1; sj < segs.size(); ++sj) {
                if (segs[sj].xmin > segs[si].xmax) break;
                int i = segs[si].i, j = segs[sj].i;
                int gap = std::min(std::abs(i - j), n - std::abs(i - j));
                if (gap <= 1) continue;
                Vec2 a = p[i], b = p[(i + 1) % n];
                Vec2 c = p[j], d = p[(j + 1) % n];
                if (std::min(a.y, b.y) > std::max(c.y, d.y) ||
                    std::min(c.y, d.y) > std::max(a.y, b.y))
                    continue;
                double o1 = orient(a, b, c), o2 = orient(a, b, d);
                double o3 = orient(c, d, a), o4 = orient(c, d, b);
                if (o1 * o2 < 0.0 && o3 * o4 < 0.0)
                    throw InvalidCurve("curve self-intersects near parameter " +
                                       std::to_string(kTwoPi * i / n));
            }
        }
    }

    // The band map (s, y) -> gamma(s) + y n(s) must invert to (s, y) through
    // the nearest-point search everywhere in |y| < r_c.
    void check_band_injectivity() const {
        if (sup_kappa_ * rc_ >= 1.0)
            throw InvalidTubularRadius("r_c exceeds 1/max|curvature| = " +
                                       std::to_string(1.0 / sup_kappa_));
        const int ns = 256;
        const double fracs[] = {0.3, 0.6, 0.9, 0.99};
        double tol = 1e-6 * std::max(1.0, diameter_);
        for (int i = 0; i < ns; ++i) {
            double s = kTwoPi * (i + 0.37) / ns;
            Vec2 g = eval(s);
            Vec2 n = inner_normal(s);
            for (double f : fracs) {
                for (double sign : {1.0, -1.0}) {
                    double y = sign * f * rc_;
                    Vec2 x = g + y * n;
                    auto [sf, d2] = nearest(x);
                    if (std::fabs(std::sqrt(d2) - std::fabs(y)) > tol ||
                        (eval(sf) - g).norm() > 1e-4 * std::max(1.0, diameter_)) {
                        throw InvalidTubularRadius(
                            "band of half-width " + std::to_string(rc_) +
                            " is not injective near parameter " + std::to_string(s));
                    }
                }
            }
        }
    }
};

} // namespace relent
