#pragma once

// Small fixed-size linear algebra, shared error types, and deterministic
// worker-pool helpers used throughout the library.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace relent {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double xx, double yy) : x(xx), y(yy) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double a) const { return {a * x, a * y}; }
    Vec2 operator/(double a) const { return {x / a, y / a}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double a) { x *= a; y *= a; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
    // counterclockwise quarter turn
    Vec2 perp() const { return {-y, x}; }
    Vec2 normalized() const {
        double n = norm();
        return {x / n, y / n};
    }
};

inline Vec2 operator*(double a, const Vec2& v) { return v * a; }

// 2x2 matrix, row major
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 outer(const Vec2& a, const Vec2& b) {
        return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
    }

    Vec2 apply(const Vec2& v) const {
        return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
    }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }
    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator*(double s) const { return {s * a11, s * a12, s * a21, s * a22}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    double trace() const { return a11 + a22; }
    // Frobenius inner product A:B
    double ddot(const Mat2& o) const {
        return a11 * o.a11 + a12 * o.a12 + a21 * o.a21 + a22 * o.a22;
    }
    double frob2() const { return ddot(*this); }
    Mat2 sym() const {
        double off = 0.5 * (a12 + a21);
        return {a11, off, off, a22};
    }
    double max_abs() const {
        return std::max(std::max(std::fabs(a11), std::fabs(a12)),
                        std::max(std::fabs(a21), std::fabs(a22)));
    }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define RELENT_ERROR_TYPE(Name)                                   \
    struct Name : Error {                                         \
        explicit Name(const std::string& msg) : Error(msg) {}     \
    }

RELENT_ERROR_TYPE(OutsideTubularNeighborhood);
RELENT_ERROR_TYPE(AmbiguousProjection);
RELENT_ERROR_TYPE(InvalidCurve);
RELENT_ERROR_TYPE(InvalidTubularRadius);
RELENT_ERROR_TYPE(DegeneratePolygon);
RELENT_ERROR_TYPE(InvalidMultiplicity);
RELENT_ERROR_TYPE(IncompatibleVarifold);
RELENT_ERROR_TYPE(QuadratureNotConverged);
RELENT_ERROR_TYPE(NotUnit);
RELENT_ERROR_TYPE(KernelSupportEmpty);
RELENT_ERROR_TYPE(SelfIntersectingOffset);
RELENT_ERROR_TYPE(BandOverflow);
RELENT_ERROR_TYPE(GridTooCoarse);
RELENT_ERROR_TYPE(OutOfRegime);
RELENT_ERROR_TYPE(EmptySeries);
RELENT_ERROR_TYPE(UnknownScenario);
RELENT_ERROR_TYPE(PerturbationTooLarge);
RELENT_ERROR_TYPE(StepTooLarge);
RELENT_ERROR_TYPE(ConfigInvalid);
RELENT_ERROR_TYPE(IoError);

#undef RELENT_ERROR_TYPE

// Worker count: RELENT_THREADS caps it, hardware concurrency is the default.
inline int worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    int n = hw == 0 ? 1 : static_cast<int>(hw);
    if (const char* env = std::getenv("RELENT_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = std::min<long>(v, 256);
    }
    return n;
}

// Deterministic parallel map: workers fill disjoint index ranges, no shared
// mutable state, so results are identical for any worker count. Reductions
// over the filled arrays must stay serial to keep bitwise determinism.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    int workers = worker_count();
    if (workers <= 1 || n < 1024) {
        body(0, n);
        return;
    }
    std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        std::size_t lo = std::min(n, w * chunk);
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

} // namespace relent
