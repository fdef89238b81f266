#pragma once

// Scalar cutoff profiles shared by the field constructions: the quintic
// smoothstep family (plateau cutoffs with exact derivatives and
// antiderivatives), the quadratic normal-extension multiplier zeta, and the
// odd truncation-of-identity weight beta.

#include <algorithm>
#include <cmath>
#include <functional>

#include "relent/core.hpp"

namespace relent {

// S(s) = 6s^5 - 15s^4 + 10s^3 on [0,1], the C^2 monotone ramp.
inline double smoothstep(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return ((6.0 * s - 15.0) * s + 10.0) * s * s * s;
}

inline double smoothstep_d(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    double a = s * (1.0 - s);
    return 30.0 * a * a;
}

inline double smoothstep_d2(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return 60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}

// int_0^s S
inline double smoothstep_int(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 0.5 + (s - 1.0);
    return ((s - 3.0) * s + 2.5) * s * s * s * s;
}

// Plateau cutoff: 1 on (-inf, lo], 0 on [hi, inf), smoothstep ramp between.
struct PlateauCutoff {
    double lo;
    double hi;

    double operator()(double r) const {
        if (r <= lo) return 1.0;
        if (r >= hi) return 0.0;
        return 1.0 - smoothstep((r - lo) / (hi - lo));
    }
    double deriv(double r) const {
        if (r <= lo || r >= hi) return 0.0;
        double w = hi - lo;
        return -smoothstep_d((r - lo) / w) / w;
    }
    double deriv2(double r) const {
        if (r <= lo || r >= hi) return 0.0;
        double w = hi - lo;
        return -smoothstep_d2((r - lo) / w) / (w * w);
    }
    // int_0^r of the profile, exact
    double integral(double r) const {
        if (r <= 0.0) return 0.0;
        if (r <= lo) return r;
        double w = hi - lo;
        if (r >= hi) return lo + 0.5 * w;
        double u = (r - lo) / w;
        return lo + (r - lo) - w * smoothstep_int(u);
    }
    double total_mass() const { return lo + 0.5 * (hi - lo); }
};

// eta: 1 on [0,1/2], 0 beyond 1 (argument is |sdist|/r_c)
inline const PlateauCutoff& eta_cutoff() {
    static const PlateauCutoff c{0.5, 1.0};
    return c;
}

// ray cutoff theta: 1 on [0,1/4], 0 beyond 1/2 (height integrals, band cutoff,
// mollifier kernel)
inline const PlateauCutoff& ray_cutoff() {
    static const PlateauCutoff c{0.25, 0.5};
    return c;
}

// zeta(r) = (1 - r^2) eta(|r|): quadratic decay from 1 at the interface,
// support |r| <= 1, zeta'(0) = 0.
inline double zeta(double r) {
    double a = std::fabs(r);
    if (a >= 1.0) return 0.0;
    return (1.0 - r * r) * eta_cutoff()(a);
}

inline double zeta_d(double r) {
    double a = std::fabs(r);
    if (a >= 1.0) return 0.0;
    double sgn = r < 0.0 ? -1.0 : 1.0;
    return -2.0 * r * eta_cutoff()(a) + (1.0 - r * r) * eta_cutoff().deriv(a) * sgn;
}

inline double zeta_d2(double r) {
    double a = std::fabs(r);
    if (a >= 1.0) return 0.0;
    const PlateauCutoff& eta = eta_cutoff();
    return -2.0 * eta(a) - 4.0 * a * eta.deriv(a) + (1.0 - r * r) * eta.deriv2(a);
}

// Injectable profile so misbuilt cutoffs can be exercised by the check suite.
struct ZetaProfile {
    std::function<double(double)> value = [](double r) { return zeta(r); };
    std::function<double(double)> deriv = [](double r) { return zeta_d(r); };
    std::function<double(double)> deriv2 = [](double r) { return zeta_d2(r); };
};

// beta: odd C^1 truncation of the identity. r on [0,1/2], the Hermite blend
// 2r - r^2 - 1/4 on [1/2,1], constant 3/4 beyond. |beta'| <= 1, |beta''| <= 2.
inline double beta_weight(double r) {
    double a = std::fabs(r);
    double sgn = r < 0.0 ? -1.0 : 1.0;
    if (a <= 0.5) return r;
    if (a >= 1.0) return 0.75 * sgn;
    return sgn * ((2.0 - a) * a - 0.25);
}

inline double beta_weight_d(double r) {
    double a = std::fabs(r);
    if (a <= 0.5) return 1.0;
    if (a >= 1.0) return 0.0;
    return 2.0 - 2.0 * a;
}

constexpr double kBetaPlateau = 0.75;

} // namespace relent
