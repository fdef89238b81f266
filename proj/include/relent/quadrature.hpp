#pragma once

// Volume quadrature: axis-aligned boxes with tensor midpoint rules (plus
// refinement of cells cut by an interface), and signed centroid-fan
// triangle quadrature for integrals over polygonal supports.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "relent/core.hpp"

namespace relent {

struct Box {
    Vec2 lo;
    Vec2 hi;

    double width() const { return hi.x - lo.x; }
    double height() const { return hi.y - lo.y; }
    double area() const { return width() * height(); }
    Vec2 center() const { return {0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)}; }
    bool contains(Vec2 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
    Box padded(double d) const { return {{lo.x - d, lo.y - d}, {hi.x + d, hi.y + d}}; }
};

// Tensor midpoint rule on an n x n cell grid; cells where `cut` is true are
// refined to refine x refine midpoints. Deterministic: cells accumulate in
// row-major order regardless of worker count.
template <class F, class CutPred>
double integrate_box(const Box& b, int n, int refine, F&& f, CutPred&& cut) {
    double hx = b.width() / n;
    double hy = b.height() / n;
    double cell_area = hx * hy;
    std::vector<double> row_sum(n, 0.0);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t j = lo; j < hi; ++j) {
            double acc = 0.0;
            double y0 = b.lo.y + j * hy;
            for (int i = 0; i < n; ++i) {
                double x0 = b.lo.x + i * hx;
                Box cell{{x0, y0}, {x0 + hx, y0 + hy}};
                if (refine > 1 && cut(cell)) {
                    double sub = 0.0;
                    for (int a = 0; a < refine; ++a)
                        for (int c = 0; c < refine; ++c)
                            sub += f(Vec2{x0 + (a + 0.5) * hx / refine,
                                          y0 + (c + 0.5) * hy / refine});
                    acc += sub / (refine * refine);
                } else {
                    acc += f(cell.center());
                }
            }
            row_sum[j] = acc * cell_area;
        }
    });
    double total = 0.0;
    for (double r : row_sum) total += r;
    return total;
}

template <class F>
double integrate_box(const Box& b, int n, F&& f) {
    return integrate_box(b, n, 1, std::forward<F>(f), [](const Box&) { return false; });
}

struct QuadratureOptions {
    int n = 256;
    int cut_refine = 4;
    double rel_tol = 1e-3;
    double abs_tol = 1e-9;
};

// One global refinement (2n) as a convergence certificate.
template <class F, class CutPred>
double integrate_box_checked(const Box& b, const QuadratureOptions& opt, F&& f,
                             CutPred&& cut) {
    double coarse = integrate_box(b, opt.n, opt.cut_refine, f, cut);
    double fine = integrate_box(b, 2 * opt.n, opt.cut_refine, f, cut);
    double scale = std::max(std::fabs(coarse), std::fabs(fine));
    if (std::fabs(fine - coarse) > std::max(opt.abs_tol, opt.rel_tol * scale))
        throw QuadratureNotConverged(
            "box quadrature drifted by " + std::to_string(std::fabs(fine - coarse)) +
            " between n = " + std::to_string(opt.n) + " and 2n");
    return fine;
}

namespace detail {
// Dunavant 7-point rule, exact through degree 5, barycentric weights
struct TriRuleNode {
    double l1, l2, l3, w;
};
inline const TriRuleNode* tri_rule7() {
    static const double a1 = 0.059715871789770, b1 = 0.470142064105115;
    static const double a2 = 0.797426985353087, b2 = 0.101286507323456;
    static const TriRuleNode nodes[7] = {
        {1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
        {a1, b1, b1, 0.132394152788506},
        {b1, a1, b1, 0.132394152788506},
        {b1, b1, a1, 0.132394152788506},
        {a2, b2, b2, 0.125939180544827},
        {b2, a2, b2, 0.125939180544827},
        {b2, b2, a2, 0.125939180544827},
    };
    return nodes;
}

template <class F>
double tri_quad(Vec2 p, Vec2 q, Vec2 r, int subdiv, F&& f) {
    if (subdiv > 0) {
        Vec2 mpq = 0.5 * (p + q), mqr = 0.5 * (q + r), mrp = 0.5 * (r + p);
        return tri_quad(p, mpq, mrp, subdiv - 1, f) +
               tri_quad(mpq, q, mqr, subdiv - 1, f) +
               tri_quad(mrp, mqr, r, subdiv - 1, f) +
               tri_quad(mpq, mqr, mrp, subdiv - 1, f);
    }
    double signed_area = 0.5 * (q - p).cross(r - p);
    const TriRuleNode* nd = tri_rule7();
    double acc = 0.0;
    for (int k = 0; k < 7; ++k) {
        Vec2 x = nd[k].l1 * p + nd[k].l2 * q + nd[k].l3 * r;
        acc += nd[k].w * f(x);
    }
    return acc * signed_area;
}
} // namespace detail

// Integral of f over the region enclosed by a closed vertex loop, via the
// signed fan from the vertex centroid: exterior overlaps cancel exactly, so
// any simple loop is handled without clipping. Counterclockwise loops count
// positive, clockwise (holes) negative.
template <class F>
double integrate_loop(const std::vector<Vec2>& loop, F&& f, int subdiv = 0) {
    if (loop.size() < 3) return 0.0;
    Vec2 o;
    for (const Vec2& v : loop) o += v;
    o = o / static_cast<double>(loop.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const Vec2& a = loop[i];
        const Vec2& b = loop[(i + 1) % loop.size()];
        acc += detail::tri_quad(o, a, b, subdiv, f);
    }
    return acc;
}

} // namespace relent
