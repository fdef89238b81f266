#pragma once

// Periodic square grids: scalar and two-component fields with bilinear point
// evaluation, spectral derivatives and the Leray (divergence-free) projection
// via the 2D FFT, and a flat binary export (row-major float64, JSON sidecar).

#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <unsupported/Eigen/FFT>

#include <json.hpp>

#include "relent/core.hpp"

namespace relent {

struct GridBox {
    Vec2 origin;
    double side = 0.0;
    int n = 0;

    double spacing() const { return side / n; }
    Vec2 point(int iy, int ix) const {
        double h = spacing();
        return {origin.x + ix * h, origin.y + iy * h};
    }
    void validate() const {
        if (n < 2 || !(side > 0.0))
            throw ConfigInvalid("grid box needs n >= 2 and positive side");
    }
    bool same_as(const GridBox& o) const {
        return n == o.n && side == o.side && origin.x == o.origin.x &&
               origin.y == o.origin.y;
    }
};

namespace detail {

// 2D complex FFT as 1D passes over rows then columns. A fresh plan per call
// keeps the transform reentrant.
inline void fft2(Eigen::MatrixXcd& m, bool inverse) {
    Eigen::FFT<double> fft;
    int n = static_cast<int>(m.rows());
    Eigen::VectorXcd in(n), out(n);
    for (int r = 0; r < n; ++r) {
        in = m.row(r).transpose();
        if (inverse) fft.inv(out, in); else fft.fwd(out, in);
        m.row(r) = out.transpose();
    }
    for (int c = 0; c < n; ++c) {
        in = m.col(c);
        if (inverse) fft.inv(out, in); else fft.fwd(out, in);
        m.col(c) = out;
    }
}

// signed angular wavenumber of DFT bin m; used inside even operators where
// the sign of the Nyquist bin cancels
inline double bin_freq(int m, int n, double side) {
    int k = m <= n / 2 ? m : m - n;
    return kTwoPi * k / side;
}

// wavenumber for (odd) derivative operators: the unpaired Nyquist bin of an
// even-sized real transform is dropped to keep derivatives real
inline double deriv_freq(int m, int n, double side) {
    if (n % 2 == 0 && m == n / 2) return 0.0;
    return bin_freq(m, n, side);
}

struct BilinearStencil {
    int ix0, ix1, iy0, iy1;
    double fx, fy;
};

inline BilinearStencil bilinear_stencil(const GridBox& box, Vec2 x) {
    double h = box.spacing();
    double gx = (x.x - box.origin.x) / h;
    double gy = (x.y - box.origin.y) / h;
    gx -= box.n * std::floor(gx / box.n);
    gy -= box.n * std::floor(gy / box.n);
    int ix0 = std::min(static_cast<int>(gx), box.n - 1);
    int iy0 = std::min(static_cast<int>(gy), box.n - 1);
    return {ix0, (ix0 + 1) % box.n, iy0, (iy0 + 1) % box.n,
            gx - ix0, gy - iy0};
}

inline void write_doubles(std::ofstream& out, const std::vector<double>& v) {
    static_assert(std::endian::native == std::endian::little);
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

} // namespace detail

// Scalar samples on a periodic box, row-major with index iy * n + ix.
class GridScalar {
public:
    GridScalar(GridBox box, std::vector<double> data)
        : box_(box), data_(std::move(data)) {
        box_.validate();
        if (static_cast<int>(data_.size()) != box_.n * box_.n)
            throw ConfigInvalid("grid data size does not match n*n");
    }

    static GridScalar sample(const GridBox& box,
                             const std::function<double(Vec2)>& f) {
        box.validate();
        std::vector<double> data(static_cast<std::size_t>(box.n) * box.n);
        parallel_for(data.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
                int iy = static_cast<int>(k) / box.n;
                int ix = static_cast<int>(k) % box.n;
                data[k] = f(box.point(iy, ix));
            }
        });
        return GridScalar(box, std::move(data));
    }

    const GridBox& box() const { return box_; }
    int n() const { return box_.n; }
    const std::vector<double>& data() const { return data_; }
    double at(int iy, int ix) const { return data_[iy * box_.n + ix]; }

    double value(Vec2 x) const {
        auto st = detail::bilinear_stencil(box_, x);
        double v00 = at(st.iy0, st.ix0), v01 = at(st.iy0, st.ix1);
        double v10 = at(st.iy1, st.ix0), v11 = at(st.iy1, st.ix1);
        return (1 - st.fy) * ((1 - st.fx) * v00 + st.fx * v01) +
               st.fy * ((1 - st.fx) * v10 + st.fx * v11);
    }

    double l2() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        double h = box_.spacing();
        return std::sqrt(h * h * s);
    }

    double linf() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::fabs(v));
        return m;
    }

    double mean() const {
        double s = 0.0;
        for (double v : data_) s += v;
        return s / static_cast<double>(data_.size());
    }

private:
    GridBox box_;
    std::vector<double> data_;
};

// Two-component field on a periodic box; immutable once built.
class GridField2 {
public:
    GridField2(GridBox box, std::vector<double> vx, std::vector<double> vy)
        : box_(box), vx_(std::move(vx)), vy_(std::move(vy)) {
        box_.validate();
        std::size_t want = static_cast<std::size_t>(box_.n) * box_.n;
        if (vx_.size() != want || vy_.size() != want)
            throw ConfigInvalid("grid data size does not match n*n");
    }

    static GridField2 zeros(const GridBox& box) {
        box.validate();
        std::size_t m = static_cast<std::size_t>(box.n) * box.n;
        return GridField2(box, std::vector<double>(m, 0.0),
                          std::vector<double>(m, 0.0));
    }

    static GridField2 sample(const GridBox& box,
                             const std::function<Vec2(Vec2)>& f) {
        box.validate();
        std::size_t m = static_cast<std::size_t>(box.n) * box.n;
        std::vector<double> vx(m), vy(m);
        parallel_for(m, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
                int iy = static_cast<int>(k) / box.n;
                int ix = static_cast<int>(k) % box.n;
                Vec2 v = f(box.point(iy, ix));
                vx[k] = v.x;
                vy[k] = v.y;
            }
        });
        return GridField2(box, std::move(vx), std::move(vy));
    }

    const GridBox& box() const { return box_; }
    int n() const { return box_.n; }
    const std::vector<double>& xs() const { return vx_; }
    const std::vector<double>& ys() const { return vy_; }

    Vec2 at(int iy, int ix) const {
        std::size_t k = static_cast<std::size_t>(iy) * box_.n + ix;
        return {vx_[k], vy_[k]};
    }

    Vec2 value(Vec2 x) const {
        auto st = detail::bilinear_stencil(box_, x);
        auto lerp = [&](const std::vector<double>& d) {
            int n = box_.n;
            double v00 = d[st.iy0 * n + st.ix0], v01 = d[st.iy0 * n + st.ix1];
            double v10 = d[st.iy1 * n + st.ix0], v11 = d[st.iy1 * n + st.ix1];
            return (1 - st.fy) * ((1 - st.fx) * v00 + st.fx * v01) +
                   st.fy * ((1 - st.fx) * v10 + st.fx * v11);
        };
        return {lerp(vx_), lerp(vy_)};
    }

    double l2() const {
        double s = 0.0;
        for (std::size_t k = 0; k < vx_.size(); ++k)
            s += vx_[k] * vx_[k] + vy_[k] * vy_[k];
        double h = box_.spacing();
        return std::sqrt(h * h * s);
    }

    double linf() const {
        double m = 0.0;
        for (std::size_t k = 0; k < vx_.size(); ++k)
            m = std::max(m, std::hypot(vx_[k], vy_[k]));
        return m;
    }

    Vec2 mean() const {
        Vec2 s{0.0, 0.0};
        for (std::size_t k = 0; k < vx_.size(); ++k) {
            s.x += vx_[k];
            s.y += vy_[k];
        }
        return s / static_cast<double>(vx_.size());
    }

    // d/dx (axis 0) or d/dy (axis 1) of both components, spectrally exact
    // for band-limited data
    GridField2 spectral_partial(int axis) const {
        if (axis != 0 && axis != 1)
            throw ConfigInvalid("axis must be 0 or 1");
        Eigen::MatrixXcd X = to_matrix(vx_), Y = to_matrix(vy_);
        detail::fft2(X, false);
        detail::fft2(Y, false);
        int n = box_.n;
        for (int ry = 0; ry < n; ++ry) {
            double ky = detail::deriv_freq(ry, n, box_.side);
            for (int cx = 0; cx < n; ++cx) {
                double kx = detail::deriv_freq(cx, n, box_.side);
                std::complex<double> ik(0.0, axis == 0 ? kx : ky);
                X(ry, cx) *= ik;
                Y(ry, cx) *= ik;
            }
        }
        detail::fft2(X, true);
        detail::fft2(Y, true);
        return GridField2(box_, from_matrix(X), from_matrix(Y));
    }

    GridScalar spectral_divergence() const {
        Eigen::MatrixXcd X = to_matrix(vx_), Y = to_matrix(vy_);
        detail::fft2(X, false);
        detail::fft2(Y, false);
        int n = box_.n;
        Eigen::MatrixXcd D(n, n);
        for (int ry = 0; ry < n; ++ry) {
            double ky = detail::deriv_freq(ry, n, box_.side);
            for (int cx = 0; cx < n; ++cx) {
                double kx = detail::deriv_freq(cx, n, box_.side);
                D(ry, cx) = std::complex<double>(0.0, 1.0) *
                            (kx * X(ry, cx) + ky * Y(ry, cx));
            }
        }
        detail::fft2(D, true);
        return GridScalar(box_, from_matrix(D));
    }

    // Remove the gradient part mode by mode: w_hat -= k (k . w_hat) / |k|^2.
    // The mean (k = 0) is untouched and the operation is an orthogonal
    // projection in the discrete L2 inner product.
    GridField2 leray() const {
        Eigen::MatrixXcd X = to_matrix(vx_), Y = to_matrix(vy_);
        detail::fft2(X, false);
        detail::fft2(Y, false);
        int n = box_.n;
        for (int ry = 0; ry < n; ++ry) {
            // the projector has to use the same effective wavevector as the
            // derivative operators: with a nonzero Nyquist frequency the
            // multiplier would differ between conjugate partner bins and the
            // output would stop being real
            double ky = detail::deriv_freq(ry, n, box_.side);
            for (int cx = 0; cx < n; ++cx) {
                double kx = detail::deriv_freq(cx, n, box_.side);
                double k2 = kx * kx + ky * ky;
                if (k2 == 0.0) continue;
                std::complex<double> s =
                    (kx * X(ry, cx) + ky * Y(ry, cx)) / k2;
                X(ry, cx) -= kx * s;
                Y(ry, cx) -= ky * s;
            }
        }
        detail::fft2(X, true);
        detail::fft2(Y, true);
        return GridField2(box_, from_matrix(X), from_matrix(Y));
    }

private:
    Eigen::MatrixXcd to_matrix(const std::vector<double>& d) const {
        int n = box_.n;
        Eigen::MatrixXcd m(n, n);
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix)
                m(iy, ix) = d[static_cast<std::size_t>(iy) * n + ix];
        return m;
    }

    std::vector<double> from_matrix(const Eigen::MatrixXcd& m) const {
        int n = box_.n;
        std::vector<double> d(static_cast<std::size_t>(n) * n);
        for (int iy = 0; iy < n; ++iy)
            for (int ix = 0; ix < n; ++ix)
                d[static_cast<std::size_t>(iy) * n + ix] = m(iy, ix).real();
        return d;
    }

    GridBox box_;
    std::vector<double> vx_, vy_;
};

inline GridField2 lin_comb(double a, const GridField2& f, double b,
                           const GridField2& g) {
    if (!f.box().same_as(g.box()))
        throw ConfigInvalid("grid boxes differ in linear combination");
    std::vector<double> vx(f.xs()), vy(f.ys());
    for (std::size_t k = 0; k < vx.size(); ++k) {
        vx[k] = a * vx[k] + b * g.xs()[k];
        vy[k] = a * vy[k] + b * g.ys()[k];
    }
    return GridField2(f.box(), std::move(vx), std::move(vy));
}

// Export: <prefix>.bin holds the raw planes back to back (row-major float64,
// little-endian), <prefix>.json the metadata.
inline void write_grid(const std::string& prefix, const GridField2& f,
                       double t) {
    std::ofstream bin(prefix + ".bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw IoError("cannot open " + prefix + ".bin for writing");
    detail::write_doubles(bin, f.xs());
    detail::write_doubles(bin, f.ys());
    if (!bin) throw IoError("short write to " + prefix + ".bin");

    nlohmann::json meta{{"n", f.n()},
                        {"origin", {f.box().origin.x, f.box().origin.y}},
                        {"side", f.box().side},
                        {"t", t},
                        {"dtype", "<f8"},
                        {"layout", "planes-row-major"},
                        {"components", {"vx", "vy"}}};
    std::ofstream js(prefix + ".json", std::ios::trunc);
    if (!js) throw IoError("cannot open " + prefix + ".json for writing");
    js << meta.dump(2) << "\n";
}

inline void write_grid(const std::string& prefix, const GridScalar& f,
                       double t) {
    std::ofstream bin(prefix + ".bin", std::ios::binary | std::ios::trunc);
    if (!bin) throw IoError("cannot open " + prefix + ".bin for writing");
    detail::write_doubles(bin, f.data());
    if (!bin) throw IoError("short write to " + prefix + ".bin");

    nlohmann::json meta{{"n", f.n()},
                        {"origin", {f.box().origin.x, f.box().origin.y}},
                        {"side", f.box().side},
                        {"t", t},
                        {"dtype", "<f8"},
                        {"layout", "planes-row-major"},
                        {"components", {"v"}}};
    std::ofstream js(prefix + ".json", std::ios::trunc);
    if (!js) throw IoError("cannot open " + prefix + ".json for writing");
    js << meta.dump(2) << "\n";
}

namespace detail {

inline nlohmann::json read_grid_meta(const std::string& prefix, GridBox& box,
                                     double* t_out) {
    std::ifstream js(prefix + ".json");
    if (!js) throw IoError("cannot open " + prefix + ".json");
    nlohmann::json meta;
    try {
        js >> meta;
        box.n = meta.at("n").get<int>();
        box.side = meta.at("side").get<double>();
        box.origin = {meta.at("origin").at(0).get<double>(),
                      meta.at("origin").at(1).get<double>()};
        if (t_out) *t_out = meta.at("t").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("bad grid header " + prefix + ".json: " + e.what());
    }
    return meta;
}

inline std::vector<double> read_doubles(std::ifstream& in, std::size_t count,
                                        const std::string& name) {
    std::vector<double> v(count);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
        throw IoError("short read from " + name);
    return v;
}

} // namespace detail

inline GridField2 read_grid_field(const std::string& prefix,
                                  double* t_out = nullptr) {
    GridBox box;
    nlohmann::json meta = detail::read_grid_meta(prefix, box, t_out);
    if (meta.at("components").size() != 2)
        throw IoError(prefix + " does not hold a two-component field");
    std::ifstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) throw IoError("cannot open " + prefix + ".bin");
    std::size_t m = static_cast<std::size_t>(box.n) * box.n;
    auto vx = detail::read_doubles(bin, m, prefix + ".bin");
    auto vy = detail::read_doubles(bin, m, prefix + ".bin");
    return GridField2(box, std::move(vx), std::move(vy));
}

inline GridScalar read_grid_scalar(const std::string& prefix,
                                   double* t_out = nullptr) {
    GridBox box;
    nlohmann::json meta = detail::read_grid_meta(prefix, box, t_out);
    if (meta.at("components").size() != 1)
        throw IoError(prefix + " does not hold a scalar field");
    std::ifstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) throw IoError("cannot open " + prefix + ".bin");
    std::size_t m = static_cast<std::size_t>(box.n) * box.n;
    return GridScalar(box, detail::read_doubles(bin, m, prefix + ".bin"));
}

} // namespace relent
