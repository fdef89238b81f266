#pragma once

// Velocity fields for the two-phase comparison: an abstract field with value,
// gradient and time derivative, divergence-free affine flows with exact flow
// maps, a solenoidal Gaussian vortex bump, and the fluid parameter bundle.

#include <cmath>
#include <memory>
#include <vector>

#include "relent/core.hpp"

namespace relent {

// densities, viscosities, surface tension; chi = 1 marks the + phase
struct FluidParams {
    double rho_plus = 1.0;
    double rho_minus = 1.0;
    double mu_plus = 1.0;
    double mu_minus = 1.0;
    double sigma = 1.0;

    void validate() const {
        if (!(rho_plus > 0.0) || !(rho_minus > 0.0) || !(mu_plus > 0.0) ||
            !(mu_minus > 0.0) || !(sigma >= 0.0))
            throw ConfigInvalid("fluid parameters must be positive (sigma >= 0)");
    }
    double rho(double chi) const { return chi * rho_plus + (1.0 - chi) * rho_minus; }
    double mu(double chi) const { return chi * mu_plus + (1.0 - chi) * mu_minus; }
    bool equal_viscosities() const { return mu_plus == mu_minus; }
};

// (grad v)_ij = d_j v_i
struct VelocityField {
    virtual ~VelocityField() = default;
    virtual Vec2 value(Vec2 x, double t) const = 0;
    virtual Mat2 grad(Vec2 x, double t) const = 0;
    virtual Vec2 time_deriv(Vec2 x, double t) const = 0;
    // upper bound for sup_x |grad v| at time t (step guards, a-priori bounds)
    virtual double bound_grad(double t) const = 0;

    Mat2 sym_grad(Vec2 x, double t) const { return grad(x, t).sym(); }
};

struct AffineMap {
    Mat2 M = Mat2::identity();
    Vec2 c;
    Vec2 operator()(Vec2 x) const { return M.apply(x) + c; }
};

// Steady affine velocity v(x) = A x + b with tr A = 0, so the flow map has
// the closed form e^{tA} = c0 I + c1 A via A^2 = -det(A) I.
class AffineFlow final : public VelocityField {
public:
    AffineFlow(Mat2 A, Vec2 b) : A_(A), b_(b) {
        if (std::fabs(A.trace()) > 1e-14 * (1.0 + A.max_abs()))
            throw ConfigInvalid("affine flow must be divergence-free (tr A = 0)");
    }

    static AffineFlow translation(Vec2 u) { return AffineFlow({0, 0, 0, 0}, u); }
    static AffineFlow rotation(double omega, Vec2 center = {0, 0}) {
        Mat2 A{0.0, -omega, omega, 0.0};
        return AffineFlow(A, -omega * center.perp());
    }
    static AffineFlow shear(double gamma) {
        return AffineFlow({0.0, gamma, 0.0, 0.0}, {0, 0});
    }

    Vec2 value(Vec2 x, double) const override { return A_.apply(x) + b_; }
    Mat2 grad(Vec2, double) const override { return A_; }
    Vec2 time_deriv(Vec2, double) const override { return {0, 0}; }
    double bound_grad(double) const override {
        return 2.0 * A_.max_abs();
    }

    const Mat2& A() const { return A_; }
    const Vec2& b() const { return b_; }

    // exact solution map of dx/dt = A x + b over [0, t]
    AffineMap flow_map(double t) const {
        double lam = -(A_.a11 * A_.a22 - A_.a12 * A_.a21);
        double c0, c1, C0, C1;
        double q2 = lam * t * t;
        if (std::fabs(q2) < 1e-12) {
            // series in A^2 = lam I, accurate through q2^2
            c0 = 1.0 + q2 / 2.0 + q2 * q2 / 24.0;
            c1 = t * (1.0 + q2 / 6.0 + q2 * q2 / 120.0);
            C0 = t * (1.0 + q2 / 6.0 + q2 * q2 / 120.0);
            C1 = 0.5 * t * t * (1.0 + q2 / 12.0 + q2 * q2 / 360.0);
        } else if (lam > 0.0) {
            double m = std::sqrt(lam);
            c0 = std::cosh(m * t);
            c1 = std::sinh(m * t) / m;
            C0 = std::sinh(m * t) / m;
            C1 = (std::cosh(m * t) - 1.0) / lam;
        } else {
            double m = std::sqrt(-lam);
            c0 = std::cos(m * t);
            c1 = std::sin(m * t) / m;
            C0 = std::sin(m * t) / m;
            C1 = (1.0 - std::cos(m * t)) / (m * m);
        }
        AffineMap out;
        out.M = c0 * Mat2::identity() + c1 * A_;
        Mat2 Phi1 = C0 * Mat2::identity() + C1 * A_;
        out.c = Phi1.apply(b_);
        return out;
    }

private:
    Mat2 A_;
    Vec2 b_;
};

// Divergence-free bump u = grad^perp psi, psi = amp * ell * exp(-|x-c|^2 / (2 ell^2)).
class GaussianVortex final : public VelocityField {
public:
    GaussianVortex(Vec2 center, double ell, double amp)
        : c_(center), ell_(ell), amp_(amp) {
        if (!(ell > 0.0)) throw ConfigInvalid("vortex length scale must be positive");
    }

    Vec2 value(Vec2 x, double) const override {
        Vec2 r = x - c_;
        double s = scale(r.norm2());
        return {s * r.y, -s * r.x};
    }
    Mat2 grad(Vec2 x, double) const override {
        Vec2 r = x - c_;
        double s = scale(r.norm2());
        double q = s / (ell_ * ell_);
        return {-q * r.x * r.y, s - q * r.y * r.y,
                q * r.x * r.x - s, q * r.x * r.y};
    }
    Vec2 time_deriv(Vec2, double) const override { return {0, 0}; }
    double bound_grad(double) const override { return 2.0 * std::fabs(amp_) / ell_; }

    double sup_speed() const { return std::fabs(amp_) * std::exp(-0.5); }

private:
    Vec2 c_;
    double ell_;
    double amp_;

    double scale(double r2) const {
        return amp_ / ell_ * std::exp(-r2 / (2.0 * ell_ * ell_));
    }
};

class SumField final : public VelocityField {
public:
    explicit SumField(std::vector<std::shared_ptr<const VelocityField>> parts)
        : parts_(std::move(parts)) {}

    Vec2 value(Vec2 x, double t) const override {
        Vec2 acc;
        for (const auto& p : parts_) acc += p->value(x, t);
        return acc;
    }
    Mat2 grad(Vec2 x, double t) const override {
        Mat2 acc;
        for (const auto& p : parts_) acc = acc + p->grad(x, t);
        return acc;
    }
    Vec2 time_deriv(Vec2 x, double t) const override {
        Vec2 acc;
        for (const auto& p : parts_) acc += p->time_deriv(x, t);
        return acc;
    }
    double bound_grad(double t) const override {
        double acc = 0.0;
        for (const auto& p : parts_) acc += p->bound_grad(t);
        return acc;
    }

private:
    std::vector<std::shared_ptr<const VelocityField>> parts_;
};

} // namespace relent
