#pragma once

// Normal extension of interface data off the curve: the vector field xi
// (cutoff extension of the inner normal), the truncated signed-distance
// weight beta, projected normal velocities, finite-difference residuals for
// the transport identities these fields satisfy, and the pointwise
// coercivity margins of the tilt/weight functionals.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "relent/core.hpp"
#include "relent/cutoffs.hpp"
#include "relent/flow.hpp"
#include "relent/geometry.hpp"

namespace relent {

// Everything the volume integrands need at one point. Outside the tubular
// band all xi-related fields are zero and beta sits on its plateau.
struct ExtensionPoint {
    bool in_band = false;
    ProjectionResult pr;  // meaningful only when in_band
    double r = 0.0;       // sdist / r_c (sign included)
    Vec2 xi;
    Mat2 grad_xi;
    double div_xi = 0.0;
    Vec2 grad_div_xi;
    double beta = 0.0;
    Vec2 grad_beta;
};

class XiField {
public:
    explicit XiField(const FourierCurve2& curve, ZetaProfile profile = {})
        : curve_(&curve), prof_(std::move(profile)) {}

    const FourierCurve2& curve() const { return *curve_; }
    double r_c() const { return curve_->r_c(); }

    ExtensionPoint eval(Vec2 x) const {
        ExtensionPoint out;
        ProjectionResult pr = curve_->project_unchecked(x);
        double rc = curve_->r_c();
        out.r = pr.sdist / rc;
        if (std::fabs(pr.sdist) >= rc) {
            out.beta = (pr.sdist < 0.0 ? -1.0 : 1.0) * kBetaPlateau;
            return out;
        }
        out.in_band = true;
        out.pr = pr;
        fill_band_fields(out, rc);
        return out;
    }

    // Same fields from an already computed in-band projection.
    ExtensionPoint eval(const ProjectionResult& pr) const {
        double rc = curve_->r_c();
        ExtensionPoint out;
        out.r = pr.sdist / rc;
        out.in_band = true;
        out.pr = pr;
        fill_band_fields(out, rc);
        return out;
    }

    Vec2 xi(Vec2 x) const { return eval(x).xi; }

    double beta(Vec2 x) const {
        double r = curve_->signed_distance(x) / curve_->r_c();
        return beta_weight(r);
    }

private:
    void fill_band_fields(ExtensionPoint& out, double rc) const {
        const ProjectionResult& pr = out.pr;
        double z = prof_.value(out.r);
        double zd = prof_.deriv(out.r);
        double zdd = prof_.deriv2(out.r);
        const Vec2& n = pr.normal;
        const Mat2& H = pr.hess_sdist;

        out.xi = z * n;
        out.grad_xi = (zd / rc) * Mat2::outer(n, n) + z * H;
        double trH = H.trace();
        out.div_xi = zd / rc + z * trH;

        // grad of trH through the foot parameter and the signed distance:
        // trH = -kappa/u with u = 1 - sdist*kappa, so d(trH)/ds = -kappa'/u^2
        // and d(trH)/d(sdist) = -kappa^2/u^2; grad s = tangent/(speed*u).
        double u = 1.0 - pr.sdist * pr.kappa;
        double kd = curve_->curvature_deriv(pr.s);
        double speed = curve_->d1(pr.s).norm();
        Vec2 grad_trH = (-kd / (speed * u * u * u)) * pr.tangent +
                        (-pr.kappa * pr.kappa / (u * u)) * n;
        out.grad_div_xi =
            ((zdd / (rc * rc)) + (zd / rc) * trH) * n + z * grad_trH;

        out.beta = beta_weight(out.r);
        out.grad_beta = (beta_weight_d(out.r) / rc) * n;
    }

    const FourierCurve2* curve_;
    ZetaProfile prof_;
};

// Normal part of the velocity at x and its projected (interface-sampled)
// counterpart, with the analytic gradient of the latter.
struct NormalVelocities {
    Vec2 normal;     // extended inner normal n(Px)
    Vec2 vn;         // (v(x) . n) n
    Vec2 vbar;       // (v(Px) . n) n
    Mat2 grad_vbar;  // gradient of the vbar field at x
};

inline NormalVelocities normal_velocities(const ProjectionResult& pr,
                                          const VelocityField& v, double t) {
    NormalVelocities out;
    const Vec2& n = pr.normal;
    out.normal = n;
    Vec2 x = pr.foot + pr.sdist * n;
    Vec2 a = v.value(pr.foot, t);
    out.vn = v.value(x, t).dot(n) * n;
    out.vbar = a.dot(n) * n;

    // vbar(x) = (a(x) . m(x)) m(x) with a = v o P and m = n o P, so
    // grad a = grad v|_P * grad P and grad m = hess sdist.
    Mat2 grad_a = v.grad(pr.foot, t) * pr.grad_proj;
    const Mat2& H = pr.hess_sdist;
    Vec2 g = grad_a.transpose().apply(n) + H.apply(a);
    out.grad_vbar = Mat2::outer(n, g) + a.dot(n) * H;
    return out;
}

inline NormalVelocities normal_velocities(const FourierCurve2& curve,
                                          const VelocityField& v, Vec2 x,
                                          double t) {
    return normal_velocities(curve.project(x), v, t);
}

// Time-differencing scheme for the transport residuals. The identities hold
// exactly along the flow, so central differences converge at second order;
// the forward scheme is kept for first-order convergence studies.
enum class FdScheme { central, forward };

using CurveTrajectory = std::function<FourierCurve2(double)>;

namespace detail {
template <class F>
auto fd_time(const F& f, double t, double dt, FdScheme scheme)
    -> decltype((f(t) - f(t)) * 1.0) {
    if (scheme == FdScheme::forward) return (f(t + dt) - f(t)) * (1.0 / dt);
    return (f(t + dt) - f(t - dt)) * (1.0 / (2.0 * dt));
}
} // namespace detail

// | d/dt sdist + (vbar . grad) sdist | at (x, t).
inline double sdist_transport_residual(const CurveTrajectory& curve_at,
                                       const VelocityField& v, Vec2 x, double t,
                                       double dt,
                                       FdScheme scheme = FdScheme::central) {
    FourierCurve2 c0 = curve_at(t);
    ProjectionResult pr = c0.project(x);
    NormalVelocities nv = normal_velocities(pr, v, t);
    double dsd =
        detail::fd_time([&](double s) { return curve_at(s).signed_distance(x); },
                        t, dt, scheme);
    return std::fabs(dsd + nv.vbar.dot(pr.normal));
}

// | d/dt xi + (vbar . grad) xi + (Id - n (x) n) (grad vbar)^T xi | at (x, t).
inline double xi_evolution_residual(const CurveTrajectory& curve_at,
                                    const VelocityField& v, Vec2 x, double t,
                                    double dt,
                                    FdScheme scheme = FdScheme::central,
                                    const ZetaProfile& profile = {}) {
    FourierCurve2 c0 = curve_at(t);
    XiField f0(c0, profile);
    ProjectionResult pr = c0.project(x);
    ExtensionPoint ep = f0.eval(pr);
    NormalVelocities nv = normal_velocities(pr, v, t);

    Vec2 dxi = detail::fd_time(
        [&](double s) {
            FourierCurve2 cs = curve_at(s);
            return XiField(cs, profile).xi(x);
        },
        t, dt, scheme);

    const Vec2& n = pr.normal;
    Mat2 proj_tan = Mat2::identity() - Mat2::outer(n, n);
    Vec2 res = dxi + ep.grad_xi.apply(nv.vbar) +
               proj_tan.apply(nv.grad_vbar.transpose().apply(ep.xi));
    return res.norm();
}

// | d/dt beta(sdist/r_c) + (vbar . grad) beta | at (x, t).
inline double beta_transport_residual(const CurveTrajectory& curve_at,
                                      const VelocityField& v, Vec2 x, double t,
                                      double dt,
                                      FdScheme scheme = FdScheme::central) {
    FourierCurve2 c0 = curve_at(t);
    ProjectionResult pr = c0.project(x);
    NormalVelocities nv = normal_velocities(pr, v, t);
    double rc = c0.r_c();
    double db = detail::fd_time(
        [&](double s) {
            FourierCurve2 cs = curve_at(s);
            return beta_weight(cs.signed_distance(x) / rc);
        },
        t, dt, scheme);
    double adv = beta_weight_d(pr.sdist / rc) / rc * nv.vbar.dot(pr.normal);
    return std::fabs(db + adv);
}

// Pointwise coercivity margins (right side minus left side; all must be
// nonnegative for any unit direction b):
//   min(r^2, 1)   <= 1 - zeta(r)
//   1 - zeta(r)   <= 1 - b . xi
//   |b - xi|^2    <= 2 (1 - b . xi)
struct CoercivityReport {
    double tilt_vs_distance = 0.0;
    double tilt_vs_alignment = 0.0;
    double square_vs_tilt = 0.0;

    bool ok(double tol = 1e-12) const {
        return tilt_vs_distance >= -tol && tilt_vs_alignment >= -tol &&
               square_vs_tilt >= -tol;
    }
};

inline CoercivityReport coercivity_checks(const XiField& field, Vec2 b,
                                          Vec2 x) {
    if (std::fabs(b.norm() - 1.0) > 1e-10)
        throw NotUnit("direction b must be a unit vector");
    ExtensionPoint ep = field.eval(x);
    double zeta_r = ep.in_band ? ep.xi.norm() : 0.0;
    CoercivityReport rep;
    rep.tilt_vs_distance = (1.0 - zeta_r) - std::min(ep.r * ep.r, 1.0);
    rep.tilt_vs_alignment = zeta_r - b.dot(ep.xi);
    rep.square_vs_tilt = 2.0 * (1.0 - b.dot(ep.xi)) - (b - ep.xi).norm2();
    return rep;
}

// |beta(r)| dominates half the capped distance; the margin of that bound.
inline double beta_floor_margin(double r) {
    return std::fabs(beta_weight(r)) - 0.5 * std::min(std::fabs(r), 1.0);
}

} // namespace relent
