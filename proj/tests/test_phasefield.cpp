#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>

#include "relent/phasefield.hpp"

using namespace relent;

namespace {

std::vector<Vec2> square_loop(double a = 1.0, Vec2 off = {0, 0}) {
    return {{off.x, off.y}, {off.x + a, off.y}, {off.x + a, off.y + a}, {off.x, off.y + a}};
}

const std::vector<Vec2> hexagon = {{1.2, 0.0}, {0.5, 0.9},  {-0.6, 1.1},
                                   {-1.3, 0.2}, {-0.7, -1.0}, {0.6, -0.9}};

} // namespace

TEST_CASE("phase polygon basics") {
    PhasePolygon sq(square_loop());
    CHECK(sq.area() == Catch::Approx(1.0).margin(1e-15));
    CHECK(sq.perimeter() == Catch::Approx(4.0).margin(1e-15));
    CHECK(sq.chi({0.5, 0.5}) == 1.0);
    CHECK(sq.chi({1.5, 0.5}) == 0.0);
    CHECK(sq.chi({-0.1, -0.1}) == 0.0);
    CHECK(sq.bbox().lo.x == 0.0);
    CHECK(sq.bbox().hi.y == 1.0);

    // clockwise input is normalized
    std::vector<Vec2> cw = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    PhasePolygon sq2(cw);
    CHECK(sq2.area() == Catch::Approx(1.0).margin(1e-15));

    CHECK_THROWS_AS(PhasePolygon({{0, 0}, {1, 0}}), DegeneratePolygon);
    CHECK_THROWS_AS(PhasePolygon({{0, 0}, {1, 0}, {1, 0}, {0, 1}}), DegeneratePolygon);
    // bowtie
    CHECK_THROWS_AS(PhasePolygon({{0, 0}, {1, 1}, {1, 0}, {0, 1}}), DegeneratePolygon);
}

TEST_CASE("polygon with hole") {
    PhasePolygon p(square_loop(3.0), {square_loop(1.0, {1, 1})});
    CHECK(p.area() == Catch::Approx(8.0).margin(1e-14));
    CHECK(p.perimeter() == Catch::Approx(16.0).margin(1e-14));
    CHECK(p.chi({0.5, 0.5}) == 1.0);
    CHECK(p.chi({1.5, 1.5}) == 0.0);
    CHECK(p.chi({2.7, 2.7}) == 1.0);
    CHECK(p.integrate([](Vec2) { return 1.0; }) == Catch::Approx(8.0).margin(1e-13));
}

TEST_CASE("polygonized circle") {
    auto circ = FourierCurve2::circle({0, 0}, 1.0, 0.5);
    PhasePolygon p = polygonize(circ, 4096);
    CHECK(p.perimeter() == Catch::Approx(kTwoPi).epsilon(1e-5));
    CHECK(p.area() == Catch::Approx(kPi).epsilon(1e-5));
    CHECK(p.chi({0, 0}) == 1.0);
}

TEST_CASE("perimeter measure") {
    PhasePolygon sq(square_loop());
    auto samples = perimeter_measure(sq, 3);
    REQUIRE(samples.size() == 12);
    double total = 0.0;
    Vec2 net;
    for (const auto& s : samples) {
        total += s.weight;
        net += s.weight * s.normal;
        CHECK(s.normal.norm() == Catch::Approx(1.0).margin(1e-12));
    }
    CHECK(total == Catch::Approx(4.0).margin(1e-12));
    CHECK(net.norm() < 1e-12);
    // bottom edge (0,0)->(1,0): inner normal (0,1)
    CHECK(samples[0].normal.y == Catch::Approx(1.0).margin(1e-14));
    CHECK(samples[0].point.y == 0.0);

    auto big = perimeter_measure(polygonize(FourierCurve2::circle({0, 0}, 1.0, 0.5), 4096), 1);
    double ptot = 0.0;
    for (const auto& s : big) ptot += s.weight;
    CHECK(ptot == Catch::Approx(kTwoPi).epsilon(1e-5));

    CHECK_THROWS_AS(perimeter_measure(sq, 0), ConfigInvalid);
}

TEST_CASE("varifold lift") {
    PhasePolygon sq(square_loop());
    auto V1 = lift_varifold(sq);
    CHECK(V1.total_mass() == Catch::Approx(4.0).margin(1e-13));
    for (const auto& a : V1.atoms()) CHECK(a.theta == 1.0);

    auto V2 = lift_varifold(sq, {2.0, 1.0, 1.0, 1.0});
    CHECK(V2.total_mass() == Catch::Approx(5.0).margin(1e-13));
    int low_theta = 0;
    for (const auto& a : V2.atoms())
        if (a.theta == 0.5) ++low_theta;
    CHECK(low_theta == 2);

    CHECK_THROWS_AS(lift_varifold(sq, {0.5, 1, 1, 1}), InvalidMultiplicity);
    CHECK_THROWS_AS(lift_varifold(sq, {1, 1, 1}), InvalidMultiplicity);

    CHECK_THROWS_AS(VarifoldMeasure({{{0, 0}, {0.5, 0}, 1.0, 1.0}}), NotUnit);
    CHECK_THROWS_AS(VarifoldMeasure({{{0, 0}, {1, 0}, -1.0, 1.0}}), IncompatibleVarifold);
    CHECK_THROWS_AS(VarifoldMeasure({{{0, 0}, {1, 0}, 1.0, 0.0}}), IncompatibleVarifold);
    CHECK_THROWS_AS(VarifoldMeasure({{{0, 0}, {1, 0}, 1.0, 1.5}}), IncompatibleVarifold);
}

TEST_CASE("varifold compatibility") {
    PhasePolygon hex(hexagon);
    auto psi = [](Vec2 x) { return std::exp(-x.norm2()); };
    for (int nq : {1, 4}) {
        auto V = lift_varifold(hex, {1.0, 2.0, 1.0, 3.0, 1.0, 1.5}, nq);
        CHECK(compatibility_residual(V, hex, psi, nq) < 1e-12);
        CHECK(compatibility_residual(V, hex, [](Vec2) { return 1.0; }, nq) < 1e-12);
    }
    // mismatched sampling is NOT compatible atom-by-atom; mass still matches
    auto V = lift_varifold(hex, {}, 2);
    CHECK(V.total_mass() == Catch::Approx(hex.perimeter()).margin(1e-13));
}

TEST_CASE("transport residual") {
    PhasePolygon sq(square_loop());
    TestFunction phi{
        [](Vec2 x, double) { return x.x * x.x + 2.0 * x.y + 3.0; },
        [](Vec2, double) { return 0.0; },
        [](Vec2 x, double) { return Vec2{2.0 * x.x, 2.0}; },
    };

    auto still = AffineFlow::translation({0, 0});
    double r0 = transport_residual([&](double) { return sq; }, still, phi, 0.0, 0.25);
    CHECK(r0 < 1e-14);

    auto tr = AffineFlow::translation({1.0, -0.5});
    auto traj = [&](double t) {
        std::vector<Vec2> v = square_loop();
        for (auto& p : v) p += t * tr.b();
        return PhasePolygon(v);
    };
    CHECK(transport_residual(traj, tr, phi, 0.0, 0.25) < 1e-8);

    auto rot = AffineFlow::rotation(1.0, {0, 0});
    auto circ = FourierCurve2::circle({0, 0}, 1.0, 0.5);
    TestFunction radial{
        [](Vec2 x, double) { return std::exp(-x.norm2()); },
        [](Vec2, double) { return 0.0; },
        [](Vec2 x, double) { return -2.0 * std::exp(-x.norm2()) * x; },
    };
    auto rtraj = [&](double t) {
        AffineMap m = rot.flow_map(t);
        std::vector<Vec2> v = circ.sample_loop(512);
        for (auto& p : v) p = m(p);
        return PhasePolygon(v);
    };
    CHECK(transport_residual(rtraj, rot, radial, 0.0, 0.2) < 1e-6);
}

TEST_CASE("energy") {
    auto circ = FourierCurve2::circle({0, 0}, 1.0, 0.5);
    PhasePolygon disk = polygonize(circ, 4096);
    auto V = lift_varifold(disk);
    FluidParams par;
    par.sigma = 1.0;
    Box box{{-1.5, -1.5}, {1.5, 1.5}};
    QuadratureOptions opt;
    opt.n = 128;

    auto rest = AffineFlow::translation({0, 0});
    double e0 = energy(disk, rest, V, 0.0, par, box, opt);
    CHECK(e0 == Catch::Approx(kTwoPi).margin(1e-4));

    FluidParams nosigma = par;
    nosigma.sigma = 0.0;
    auto rot = AffineFlow::rotation(1.0, {0, 0});
    double ek = energy(disk, rot, V, 0.0, nosigma, box, opt);
    double closed = 4.0 * std::pow(1.5, 4) / 3.0;
    CHECK(ek == Catch::Approx(closed).epsilon(1e-4));

    FluidParams dbl = par;
    dbl.sigma = 2.0;
    double e2 = energy(disk, rest, V, 0.0, dbl, box, opt);
    CHECK(e2 - e0 == Catch::Approx(V.total_mass()).margin(1e-10));

    FluidParams heavy = par;
    heavy.sigma = 0.0;
    heavy.rho_plus = 3.0;
    double eh = energy(disk, rot, V, 0.0, heavy, box, opt);
    // extra (rho+ - rho-) * int_disk |omega x|^2 / 2 = 2 * pi/4
    CHECK(eh - ek == Catch::Approx(2.0 * kPi / 4.0).epsilon(1e-4));
}
