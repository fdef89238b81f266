#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <random>

#include "relent/flow.hpp"

using namespace relent;

namespace {

// fine-step RK4 integration of dx/dt = v(x,t), independent flow-map oracle
Vec2 rk4_flow(const VelocityField& f, Vec2 x, double t0, double t1, int n) {
    double h = (t1 - t0) / n;
    double t = t0;
    for (int i = 0; i < n; ++i) {
        Vec2 k1 = f.value(x, t);
        Vec2 k2 = f.value(x + 0.5 * h * k1, t + 0.5 * h);
        Vec2 k3 = f.value(x + 0.5 * h * k2, t + 0.5 * h);
        Vec2 k4 = f.value(x + h * k3, t + h);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    return x;
}

Mat2 fd_grad(const VelocityField& f, Vec2 x, double t, double h = 1e-6) {
    Vec2 gx = (f.value({x.x + h, x.y}, t) - f.value({x.x - h, x.y}, t)) / (2 * h);
    Vec2 gy = (f.value({x.x, x.y + h}, t) - f.value({x.x, x.y - h}, t)) / (2 * h);
    return {gx.x, gy.x, gx.y, gy.y};
}

} // namespace

TEST_CASE("fluid params") {
    FluidParams p{1.2, 0.8, 2.0, 0.5, 0.07};
    p.validate();
    CHECK(p.rho(1.0) == 1.2);
    CHECK(p.rho(0.0) == 0.8);
    CHECK(p.rho(0.5) == Catch::Approx(1.0).margin(1e-15));
    CHECK(p.mu(1.0) == 2.0);
    CHECK(p.mu(0.0) == 0.5);
    CHECK_FALSE(p.equal_viscosities());
    CHECK(FluidParams{}.equal_viscosities());
    FluidParams bad = p;
    bad.mu_minus = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigInvalid);
    FluidParams zero_sigma = p;
    zero_sigma.sigma = 0.0;
    CHECK_NOTHROW(zero_sigma.validate());
}

TEST_CASE("affine factories") {
    auto tr = AffineFlow::translation({1, 0});
    CHECK(tr.value({3, -2}, 0.0).x == 1.0);
    CHECK(tr.value({3, -2}, 0.0).y == 0.0);
    CHECK(tr.grad({3, -2}, 0.0).max_abs() == 0.0);

    Vec2 c{0.5, -1.0};
    auto rot = AffineFlow::rotation(0.8, c);
    for (Vec2 x : {Vec2{1, 1}, Vec2{-0.3, 2.0}, c}) {
        Vec2 expect = 0.8 * (x - c).perp();
        Vec2 got = rot.value(x, 0.0);
        CHECK(got.x == Catch::Approx(expect.x).margin(1e-14));
        CHECK(got.y == Catch::Approx(expect.y).margin(1e-14));
    }

    auto sh = AffineFlow::shear(2.0);
    CHECK(sh.value({5, 0.3}, 0.0).x == Catch::Approx(0.6).margin(1e-15));
    CHECK(sh.value({5, 0.3}, 0.0).y == 0.0);

    CHECK_THROWS_AS(AffineFlow({1, 0, 0, 1}, {0, 0}), ConfigInvalid);
    CHECK_THROWS_AS(AffineFlow({0.1, 0, 0, 0}, {0, 0}), ConfigInvalid);
}

TEST_CASE("flow maps are exact") {
    auto tr = AffineFlow::translation({1.5, -0.5});
    AffineMap m = tr.flow_map(2.0);
    Vec2 y = m({1, 1});
    CHECK(y.x == Catch::Approx(4.0).margin(1e-14));
    CHECK(y.y == Catch::Approx(0.0).margin(1e-14));

    Vec2 c{0.5, -1.0};
    double om = 0.8, t = 1.7;
    auto rot = AffineFlow::rotation(om, c);
    AffineMap rm = rot.flow_map(t);
    for (Vec2 x : {Vec2{1, 1}, Vec2{-2, 0.3}}) {
        Vec2 r = x - c;
        double cs = std::cos(om * t), sn = std::sin(om * t);
        Vec2 expect = c + Vec2{cs * r.x - sn * r.y, sn * r.x + cs * r.y};
        Vec2 got = rm(x);
        CHECK(got.x == Catch::Approx(expect.x).margin(1e-13));
        CHECK(got.y == Catch::Approx(expect.y).margin(1e-13));
    }

    auto sh = AffineFlow::shear(0.7);
    AffineMap sm = sh.flow_map(3.0);
    CHECK(sm.M.a11 == Catch::Approx(1.0).margin(1e-14));
    CHECK(sm.M.a12 == Catch::Approx(2.1).margin(1e-13));
    CHECK(sm.M.a21 == Catch::Approx(0.0).margin(1e-14));
    CHECK(sm.M.a22 == Catch::Approx(1.0).margin(1e-14));

    AffineMap id = rot.flow_map(0.0);
    CHECK((id.M - Mat2::identity()).max_abs() < 1e-15);
    CHECK(id.c.norm() < 1e-15);
}

TEST_CASE("flow map matches integration for mixed strain") {
    // hyperbolic (A^2 = +lam I) and elliptic (A^2 = -lam I) trace-free parts
    AffineFlow hyp({0.3, 0.1, 0.2, -0.3}, {0.4, -0.2});
    AffineFlow ell({0.1, -0.5, 0.4, -0.1}, {-0.3, 0.8});
    for (const AffineFlow* f : {&hyp, &ell}) {
        for (Vec2 x : {Vec2{1, 0.5}, Vec2{-0.7, 2.0}}) {
            Vec2 exact = f->flow_map(0.9)(x);
            Vec2 num = rk4_flow(*f, x, 0.0, 0.9, 20000);
            CHECK(exact.x == Catch::Approx(num.x).margin(1e-10));
            CHECK(exact.y == Catch::Approx(num.y).margin(1e-10));
        }
    }

    // composition of an autonomous flow
    AffineMap m1 = hyp.flow_map(0.4);
    AffineMap m2 = hyp.flow_map(0.9);
    Vec2 x{0.2, -1.1};
    Vec2 comp = m1(hyp.flow_map(0.5)(x));
    Vec2 direct = m2(x);
    CHECK(comp.x == Catch::Approx(direct.x).margin(1e-12));
    CHECK(comp.y == Catch::Approx(direct.y).margin(1e-12));

    // series branch agrees with the trig branch across the threshold
    auto rot = AffineFlow::rotation(1.0, {0, 0});
    for (double t : {1e-7, 1e-6, 1e-5}) {
        AffineMap m = rot.flow_map(t);
        CHECK(m.M.a11 == Catch::Approx(std::cos(t)).margin(1e-15));
        CHECK(m.M.a21 == Catch::Approx(std::sin(t)).margin(1e-15));
    }
}

TEST_CASE("gaussian vortex") {
    GaussianVortex gv({0.3, -0.2}, 0.5, 0.04);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int i = 0; i < 25; ++i) {
        Vec2 x{u(rng), u(rng)};
        Mat2 g = gv.grad(x, 0.0);
        Mat2 fd = fd_grad(gv, x, 0.0);
        CHECK(g.a11 == Catch::Approx(fd.a11).margin(1e-8));
        CHECK(g.a12 == Catch::Approx(fd.a12).margin(1e-8));
        CHECK(g.a21 == Catch::Approx(fd.a21).margin(1e-8));
        CHECK(g.a22 == Catch::Approx(fd.a22).margin(1e-8));
        CHECK(g.trace() == 0.0);
        CHECK(g.max_abs() <= gv.bound_grad(0.0) + 1e-15);
        CHECK(gv.value(x, 0.0).norm() <= gv.sup_speed() + 1e-15);
    }
    // sup speed attained on the ring |x - c| = ell
    CHECK(gv.value({0.8, -0.2}, 0.0).norm() ==
          Catch::Approx(gv.sup_speed()).margin(1e-15));
    CHECK_THROWS_AS(GaussianVortex({0, 0}, 0.0, 1.0), ConfigInvalid);
}

TEST_CASE("sum field") {
    auto base = std::make_shared<AffineFlow>(AffineFlow::shear(1.2));
    auto bump = std::make_shared<GaussianVortex>(Vec2{0, 0}, 0.4, 0.1);
    SumField u({base, bump});
    Vec2 x{0.3, 0.1};
    Vec2 expect = base->value(x, 0.0) + bump->value(x, 0.0);
    CHECK(u.value(x, 0.0).x == Catch::Approx(expect.x).margin(1e-15));
    CHECK(u.value(x, 0.0).y == Catch::Approx(expect.y).margin(1e-15));
    Mat2 eg = base->grad(x, 0.0) + bump->grad(x, 0.0);
    CHECK((u.grad(x, 0.0) - eg).max_abs() < 1e-15);
    CHECK(u.bound_grad(0.0) ==
          Catch::Approx(base->bound_grad(0.0) + bump->bound_grad(0.0)).margin(1e-15));
    CHECK(u.time_deriv(x, 0.0).norm() == 0.0);
}
