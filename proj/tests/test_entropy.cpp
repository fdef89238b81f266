#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <memory>
#include <vector>

#include "relent/entropy.hpp"

using namespace relent;

namespace {

FourierCurve2 unit_circle() {
    return FourierCurve2({0.0, 0.0, 1.0}, 0.5);
}

FourierCurve2 big_circle() {
    return FourierCurve2({0.0, std::complex<double>(0.0, 2.0), 2.0}, 0.5);
}

const Box kDomain{{-1.7, -1.7}, {1.7, 1.7}};

// rigid rotation of a velocity field, value and gradient conjugated with R
class RotatedField final : public VelocityField {
public:
    RotatedField(const VelocityField& base, double phi)
        : base_(&base), c_(std::cos(phi)), s_(std::sin(phi)) {}

    Vec2 value(Vec2 x, double t) const override {
        return fwd(base_->value(back(x), t));
    }
    Mat2 grad(Vec2 x, double t) const override {
        Mat2 r{c_, -s_, s_, c_};
        return r * base_->grad(back(x), t) * r.transpose();
    }
    Vec2 time_deriv(Vec2 x, double t) const override {
        return fwd(base_->time_deriv(back(x), t));
    }
    double bound_grad(double t) const override { return base_->bound_grad(t); }

private:
    Vec2 fwd(Vec2 p) const { return {c_ * p.x - s_ * p.y, s_ * p.x + c_ * p.y}; }
    Vec2 back(Vec2 p) const { return {c_ * p.x + s_ * p.y, -s_ * p.x + c_ * p.y}; }

    const VelocityField* base_;
    double c_, s_;
};

void require_all_compensation_terms_zero(const EntropyReport& rep) {
    REQUIRE(rep.a_visc == 0.0);
    REQUIRE(rep.a_dt == 0.0);
    REQUIRE(rep.a_adv == 0.0);
    REQUIRE(rep.a_surten == 0.0);
    REQUIRE(rep.a_weightvol == 0.0);
}

} // namespace

TEST_CASE("exact twin degenerates to interface error alone") {
    FourierCurve2 curve = unit_circle();
    PhasePolygon poly = polygonize(curve, 2048);
    GaussianVortex flow({0.3, 0.2}, 0.8, 1.1);
    FluidParams par{1.0, 1.0, 0.8, 0.2, 1.0};

    EntropyInputs in;
    in.phase = &poly;
    in.u = &flow;
    in.curve = &curve;
    in.v = &flow;
    in.par = par;
    in.domain = kDomain;
    in.quad.n = 96;

    EntropyReport rep = relative_entropy(in);

    // same object for both velocities: every difference is exactly zero
    REQUIRE(rep.e_kinetic == 0.0);
    REQUIRE(rep.e_multiplicity == 0.0);
    REQUIRE(rep.r_dt == 0.0);
    REQUIRE(rep.r_visc == 0.0);
    REQUIRE(rep.r_adv == 0.0);
    REQUIRE(rep.dissipation == 0.0);
    require_all_compensation_terms_zero(rep);

    // what remains is the polygonization error of the interface
    REQUIRE(rep.e_tilt > 0.0);
    REQUIRE(rep.e_weightvol > 0.0);
    REQUIRE(rep.total() < 1e-4);
    REQUIRE(std::fabs(rep.r_weightvol) < 1e-9);
    REQUIRE(std::fabs(rep.r_surten) < 1e-3);

    // the lifted varifold controls its own normal error through the entropy
    VarifoldMeasure lift = lift_varifold(poly);
    XiField xi(curve);
    REQUIRE(varifold_normal_error_sq(lift, xi) <= rep.total() * (1.0 + 1e-10));

    EntropyReport again = relative_entropy(in);
    REQUIRE(again.e_tilt == rep.e_tilt);
    REQUIRE(again.e_kinetic == rep.e_kinetic);
    REQUIRE(again.e_weightvol == rep.e_weightvol);
    REQUIRE(again.e_multiplicity == rep.e_multiplicity);
    REQUIRE(again.dissipation == rep.dissipation);
    for (std::size_t i = 0; i < kBudgetColumns.size(); ++i)
        REQUIRE(again.budget(i) == rep.budget(i));
}

TEST_CASE("tilt term matches a direct perimeter sum") {
    FourierCurve2 curve = big_circle();
    std::vector<Vec2> tri{{-0.12, 0.04}, {0.1, 0.02}, {0.02, 0.2}};
    PhasePolygon poly{std::vector<Vec2>(tri)};
    AffineFlow still = AffineFlow::translation({0.0, 0.0});
    FluidParams par{1.0, 1.0, 0.8, 0.2, 1.0};

    EntropyInputs in;
    in.phase = &poly;
    in.u = &still;
    in.curve = &curve;
    in.v = &still;
    in.par = par;
    in.domain = Box{{-0.4, -0.2}, {0.4, 0.4}};
    in.quad.n = 64;
    in.surface_quad = 2;

    EntropyReport rep = relative_entropy(in);

    // independent sum over the four Gauss nodes per edge of the refined pass,
    // with the closed-form normal field of the circle; below half the band
    // width the profile is 1 - r^2
    const double gn[4] = {0.5 - 0.5 * 0.8611363115940526, 0.5 - 0.5 * 0.3399810435848563,
                          0.5 + 0.5 * 0.3399810435848563, 0.5 + 0.5 * 0.8611363115940526};
    const double gw[4] = {0.5 * 0.3478548451374538, 0.5 * 0.6521451548625461,
                          0.5 * 0.6521451548625461, 0.5 * 0.3478548451374538};
    Vec2 center{0.0, 2.0};
    double hand = 0.0;
    for (std::size_t i = 0; i < tri.size(); ++i) {
        Vec2 a = tri[i], b = tri[(i + 1) % tri.size()];
        Vec2 e = b - a;
        double len = e.norm();
        Vec2 nu = e.perp() / len;
        for (int k = 0; k < 4; ++k) {
            Vec2 p = a + gn[k] * e;
            Vec2 d = center - p;
            double dist = d.norm();
            double r = (2.0 - dist) / 0.5;
            double zeta = 1.0 - r * r;
            hand += (1.0 - zeta * d.dot(nu) / dist) * (len * gw[k]);
        }
    }
    REQUIRE(rep.e_tilt == Catch::Approx(hand).margin(5e-12));

    // a resting flow nulls every rate
    REQUIRE(rep.e_kinetic == 0.0);
    REQUIRE(rep.r_surten == 0.0);
    REQUIRE(rep.r_dt == 0.0);
    REQUIRE(rep.r_visc == 0.0);
    REQUIRE(rep.r_adv == 0.0);
    REQUIRE(rep.r_weightvol == 0.0);
    REQUIRE(rep.dissipation == 0.0);
    require_all_compensation_terms_zero(rep);
}

TEST_CASE("multiplicity excess equals the doubled length") {
    FourierCurve2 curve = unit_circle();
    PhasePolygon poly = polygonize(curve, 2048);
    std::vector<double> mult(2048, 1.0);
    for (std::size_t i = 1024; i < 2048; ++i) mult[i] = 2.0;
    VarifoldMeasure vf = lift_varifold(poly, mult);
    AffineFlow still = AffineFlow::translation({0.0, 0.0});
    FluidParams par{1.0, 1.0, 0.8, 0.2, 1.0};

    EntropyInputs in;
    in.phase = &poly;
    in.u = &still;
    in.varifold = &vf;
    in.curve = &curve;
    in.v = &still;
    in.par = par;
    in.domain = kDomain;
    in.quad.n = 64;

    EntropyReport rep = relative_entropy(in);

    // each doubled edge carries excess mass(1 - theta) = len
    double doubled = 1024.0 * 2.0 * std::sin(kPi / 2048.0);
    REQUIRE(rep.e_multiplicity == Catch::Approx(doubled).epsilon(1e-12));

    XiField xi(curve);
    REQUIRE(varifold_normal_error_sq(vf, xi) <= rep.total() * (1.0 + 1e-10));
}

TEST_CASE("varifold incompatible with the boundary is rejected") {
    FourierCurve2 curve = unit_circle();
    PhasePolygon poly = polygonize(curve, 512);
    std::vector<VarifoldAtom> atoms = lift_varifold(poly).atoms();
    for (auto& a : atoms) a.dir = -1.0 * a.dir;
    VarifoldMeasure bad(std::move(atoms));
    AffineFlow still = AffineFlow::translation({0.0, 0.0});

    EntropyInputs in;
    in.phase = &poly;
    in.u = &still;
    in.varifold = &bad;
    in.curve = &curve;
    in.v = &still;
    in.domain = kDomain;
    in.quad.n = 16;

    REQUIRE_THROWS_AS(relative_entropy(in), IncompatibleVarifold);
}

TEST_CASE("equal viscosities null the viscous mismatch") {
    FourierCurve2 curve = unit_circle();
    PhasePolygon poly = polygonize(curve, 2048);
    GaussianVortex u({0.2, -0.1}, 0.7, 0.9);
    AffineFlow v = AffineFlow::shear(0.4);
    FluidParams par{1.3, 0.7, 0.6, 0.6, 1.0};

    EntropyInputs in;
    in.phase = &poly;
    in.u = &u;
    in.curve = &curve;
    in.v = &v;
    in.par = par;
    in.domain = kDomain;
    in.quad.n = 96;

    EntropyReport rep = relative_entropy(in);
    REQUIRE(rep.r_visc == 0.0);
    require_all_compensation_terms_zero(rep);
    REQUIRE(rep.e_kinetic > 0.0);
    REQUIRE(rep.dissipation > 0.0);
}

TEST_CASE("dissipation closed forms") {
    PhasePolygon square{
        std::vector<Vec2>{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}};
    Box unit{{0.0, 0.0}, {1.0, 1.0}};
    FluidParams one{1.0, 1.0, 1.0, 1.0, 1.0};
    AffineFlow still = AffineFlow::translation({0.0, 0.0});
    QuadratureOptions q;
    q.n = 32;

    SECTION("rigid rotation has no deformation") {
        AffineFlow spin = AffineFlow::rotation(0.7, {0.2, 0.3});
        REQUIRE(dissipation(spin, still, nullptr, one, square, unit, 0.0, q) ==
                0.0);
    }

    SECTION("plain shear on the unit square") {
        AffineFlow sh = AffineFlow::shear(0.7);
        double d = dissipation(sh, still, nullptr, one, square, unit, 0.0, q);
        REQUIRE(d == Catch::Approx(2.0 * (0.35 * 0.35) * 2.0).margin(1e-12));
    }

    SECTION("compensated difference vanishes") {
        FourierCurve2 curve = big_circle();
        FluidParams par{1.0, 1.0, 0.8, 0.2, 1.0};
        auto sh = std::make_shared<AffineFlow>(AffineFlow::shear(0.7));
        GridBox gb = compensation_box(curve, 128);
        CompensationField w = build_compensation(
            *sh, curve, par, BandHeights::constant(128, 0.1, 0.08), 0.0, gb);
        auto gv = std::make_shared<GridVelocity>(w);
        SumField mix({sh, gv});
        PhasePolygon disk = polygonize(curve, 256);
        Box dom{{-1.0, 1.0}, {1.0, 3.0}};
        QuadratureOptions q2;
        q2.n = 64;
        double d = dissipation(mix, *sh, &w, par, disk, dom, 0.0, q2);
        REQUIRE(std::fabs(d) <= 1e-12);
    }
}

TEST_CASE("weight volume matches the polar closed form") {
    FourierCurve2 curve = unit_circle();
    FourierCurve2 shifted({0.0, std::complex<double>(0.05, 0.0), 1.0}, 0.5);
    PhasePolygon poly = polygonize(shifted, 8192);
    AffineFlow still = AffineFlow::translation({0.0, 0.0});
    FluidParams par{1.1, 0.9, 0.5, 0.3, 1.0};

    EntropyInputs in;
    in.phase = &poly;
    in.u = &still;
    in.curve = &curve;
    in.v = &still;
    in.par = par;
    in.domain = kDomain;
    in.quad.n = 96;

    EntropyReport rep = relative_entropy(in);

    // the mismatch region lies inside half the band, where the weight is
    // |sd| / r_c; radial integration gives F(r) = r^3/3 - r^2/2 between the
    // two circles, leaving a smooth periodic integral in the angle
    auto F = [](double r) { return r * r * r / 3.0 - 0.5 * r * r; };
    int m = 1 << 15;
    double oracle = 0.0;
    for (int k = 0; k < m; ++k) {
        double th = (k + 0.5) * kTwoPi / m;
        double sn = std::sin(th);
        double rho = 0.05 * std::cos(th) + std::sqrt(1.0 - 0.0025 * sn * sn);
        oracle += std::fabs(F(rho) - F(1.0));
    }
    oracle *= kTwoPi / m / 0.5;

    REQUIRE(rep.e_weightvol == Catch::Approx(oracle).margin(1e-6));
    REQUIRE(rep.e_multiplicity == 0.0);
    REQUIRE(rep.e_kinetic == 0.0);
    REQUIRE(rep.dissipation == 0.0);
}

TEST_CASE("report is invariant under rigid rotation") {
    double phi = kPi / 4.0;  // maps the polygon vertex set to itself
    FourierCurve2 curve = unit_circle();
    PhasePolygon poly = polygonize(curve, 2048);
    auto sh = std::make_shared<AffineFlow>(AffineFlow::shear(0.5));
    auto bump = std::make_shared<GaussianVortex>(Vec2{0.35, 0.1}, 0.8, 0.8);
    SumField u({sh, bump});
    FluidParams par{1.2, 0.8, 0.9, 0.3, 1.0};

    EntropyInputs base;
    base.phase = &poly;
    base.u = &u;
    base.curve = &curve;
    base.v = sh.get();
    base.par = par;
    // the box is wide enough that the difference field has decayed at the
    // corners, which are the only part that does not rotate onto itself
    base.domain = Box{{-3.2, -3.2}, {3.2, 3.2}};
    base.quad.n = 128;
    EntropyReport ra = relative_entropy(base);

    Mat2 rot{std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi)};
    std::vector<Vec2> pts;
    pts.reserve(poly.outer().size());
    for (Vec2 p : poly.outer()) pts.push_back(rot.apply(p));
    PhasePolygon poly_r{std::move(pts)};
    FourierCurve2 curve_r = curve.affine(rot, {0.0, 0.0}, curve.r_c());
    RotatedField u_r(u, phi), v_r(*sh, phi);

    EntropyInputs turned = base;
    turned.phase = &poly_r;
    turned.u = &u_r;
    turned.curve = &curve_r;
    turned.v = &v_r;
    EntropyReport rb = relative_entropy(turned);

    auto match = [](double a, double b) {
        REQUIRE(std::fabs(a - b) <= 1e-8 * std::max(1.0, std::fabs(a)));
    };
    match(ra.e_tilt, rb.e_tilt);
    match(ra.e_kinetic, rb.e_kinetic);
    match(ra.e_weightvol, rb.e_weightvol);
    match(ra.e_multiplicity, rb.e_multiplicity);
    match(ra.dissipation, rb.dissipation);
    match(ra.total(), rb.total());
    for (std::size_t i = 0; i < kBudgetColumns.size(); ++i)
        match(ra.budget(i), rb.budget(i));
}

TEST_CASE("rejects what it cannot certify") {
    FourierCurve2 curve = unit_circle();
    PhasePolygon poly = polygonize(curve, 2048);
    GaussianVortex u({0.2, 0.1}, 0.3, 1.1);
    AffineFlow v = AffineFlow::shear(0.4);

    EntropyInputs in;
    in.phase = &poly;
    in.u = &u;
    in.curve = &curve;
    in.v = &v;
    in.domain = kDomain;

    SECTION("volume quadrature too coarse for a concentrated vortex") {
        in.quad.n = 4;
        REQUIRE_THROWS_AS(relative_entropy(in), QuadratureNotConverged);
    }

    SECTION("missing pieces") {
        in.quad.n = 16;
        in.u = nullptr;
        REQUIRE_THROWS_AS(relative_entropy(in), ConfigInvalid);
    }
}

TEST_CASE("constant difference field closed forms") {
    FourierCurve2 curve = unit_circle();
    PhasePolygon poly = polygonize(curve, 2048);
    auto sh = std::make_shared<AffineFlow>(AffineFlow::shear(0.6));
    auto tr = std::make_shared<AffineFlow>(
        AffineFlow::translation({0.3, -0.2}));
    SumField u({sh, tr});
    GridBox gb{{-1.7, -1.7}, 3.4, 64};
    std::vector<double> cx(64 * 64, 0.25), cy(64 * 64, 0.45);
    GridField2 dtw(gb, std::move(cx), std::move(cy));
    FluidParams par{1.4, 0.6, 0.9, 0.3, 1.0};

    EntropyInputs in;
    in.phase = &poly;
    in.u = &u;
    in.curve = &curve;
    in.v = sh.get();
    in.dt_w = &dtw;
    in.par = par;
    in.domain = kDomain;
    in.quad.n = 96;

    EntropyReport rep = relative_entropy(in);

    // u - v is the constant U, so the density-weighted volume factors out
    double mass = 0.6 * 3.4 * 3.4 + (1.4 - 0.6) * poly.area();
    double u2 = 0.3 * 0.3 + 0.2 * 0.2;
    REQUIRE(rep.e_kinetic == Catch::Approx(0.5 * u2 * mass).margin(1e-10));

    // (v . grad)v vanishes for a shear, leaving -rho U . (U . grad)v
    REQUIRE(rep.r_adv ==
            Catch::Approx(-0.6 * 0.3 * (-0.2) * mass).margin(1e-10));

    // a prescribed drift rate integrates against the same mass
    double udotc = 0.3 * 0.25 + (-0.2) * 0.45;
    REQUIRE(rep.a_dt == Catch::Approx(-udotc * mass).margin(1e-10));

    REQUIRE(rep.r_dt == 0.0);
    REQUIRE(rep.r_visc == 0.0);
    REQUIRE(rep.dissipation == 0.0);
    REQUIRE(rep.a_visc == 0.0);
    REQUIRE(rep.a_adv == 0.0);
    REQUIRE(rep.a_surten == 0.0);
    REQUIRE(rep.a_weightvol == 0.0);

    REQUIRE(rep.e_weightvol > 0.0);
    REQUIRE(std::fabs(rep.r_weightvol) < 1e-4);
    REQUIRE(std::fabs(rep.r_surten) < 1e-3);
}
