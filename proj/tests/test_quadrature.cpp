#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "relent/quadrature.hpp"

using namespace relent;

TEST_CASE("box type") {
    Box b{{-1, 0}, {2, 2}};
    CHECK(b.width() == 3.0);
    CHECK(b.height() == 2.0);
    CHECK(b.area() == 6.0);
    CHECK(b.center().x == 0.5);
    CHECK(b.center().y == 1.0);
    CHECK(b.contains({0, 1}));
    CHECK_FALSE(b.contains({0, 3}));
    Box p = b.padded(0.5);
    CHECK(p.lo.x == -1.5);
    CHECK(p.hi.y == 2.5);
}

TEST_CASE("midpoint box quadrature") {
    Box unit{{0, 0}, {1, 1}};
    double got = integrate_box(unit, 256, [](Vec2 p) {
        return std::sin(p.x) * std::cos(p.y);
    });
    double exact = (1.0 - std::cos(1.0)) * std::sin(1.0);
    CHECK(got == Catch::Approx(exact).margin(1e-6));

    CHECK(integrate_box(unit, 128, [](Vec2 p) { return p.x * p.x * p.y; }) ==
          Catch::Approx(1.0 / 6.0).margin(1e-5));

    // indicator of the unit disk with cut-cell refinement
    Box big{{-1.5, -1.5}, {1.5, 1.5}};
    auto chi = [](Vec2 p) { return p.norm2() <= 1.0 ? 1.0 : 0.0; };
    auto cut = [&](const Box& cell) {
        double c0 = chi(cell.lo), c1 = chi(cell.hi), c2 = chi({cell.lo.x, cell.hi.y}),
               c3 = chi({cell.hi.x, cell.lo.y});
        return c0 != c1 || c0 != c2 || c0 != c3;
    };
    double area = integrate_box(big, 256, 4, chi, cut);
    CHECK(area == Catch::Approx(kPi).margin(5e-3));
}

TEST_CASE("refinement certificate") {
    Box b{{-1.5, -1.5}, {1.5, 1.5}};
    QuadratureOptions opt;
    opt.n = 64;
    double v = integrate_box_checked(b, opt, [](Vec2 p) { return p.norm2(); },
                                     [](const Box&) { return false; });
    CHECK(v == Catch::Approx(8.0 * std::pow(1.5, 4) / 3.0).margin(1e-2));

    // a spike far below the mesh width must fail the certificate
    QuadratureOptions coarse;
    coarse.n = 8;
    coarse.abs_tol = 1e-12;
    auto spike = [](Vec2 p) { return std::exp(-p.norm2() / (2.0 * 0.02 * 0.02)); };
    CHECK_THROWS_AS(integrate_box_checked(b, coarse, spike,
                                          [](const Box&) { return false; }),
                    QuadratureNotConverged);
}

TEST_CASE("loop quadrature") {
    std::vector<Vec2> tri = {{0, 0}, {1, 0}, {0, 1}};
    CHECK(integrate_loop(tri, [](Vec2) { return 1.0; }) ==
          Catch::Approx(0.5).margin(1e-14));

    std::vector<Vec2> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    // degree-5 rule integrates x^2 y^3 exactly
    auto f = [](Vec2 p) { return p.x * p.x * p.y * p.y * p.y; };
    CHECK(integrate_loop(square, f) == Catch::Approx(1.0 / 12.0).margin(1e-14));
    CHECK(integrate_loop(square, f, 2) == Catch::Approx(1.0 / 12.0).margin(1e-14));

    // clockwise loop counts negative
    std::vector<Vec2> cw = {{0, 1}, {1, 1}, {1, 0}, {0, 0}};
    CHECK(integrate_loop(cw, [](Vec2) { return 1.0; }) ==
          Catch::Approx(-1.0).margin(1e-14));

    // non-convex L-shape: signed fan cancels the exterior overlap exactly
    std::vector<Vec2> ell = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    CHECK(integrate_loop(ell, [](Vec2 p) { return p.x + p.y; }) ==
          Catch::Approx(5.0).margin(1e-13));
    CHECK(integrate_loop(ell, [](Vec2) { return 1.0; }) ==
          Catch::Approx(3.0).margin(1e-13));

    // smooth integrand with subdivision: gaussian over the square
    auto g = [](Vec2 p) { return std::exp(-p.norm2()); };
    double ref = integrate_box({{0, 0}, {1, 1}}, 512, g);
    CHECK(integrate_loop(square, g, 3) == Catch::Approx(ref).margin(1e-6));
}
