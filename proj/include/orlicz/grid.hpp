#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "orlicz/common.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// Uniform periodic grid (torus) in d = 1 or 2 dimensions with N points per
/// axis on a box of the given side length.  Indexing is row-major:
/// flat = i0 + N * i1.
struct grid {
    int d = 1;
    int N = 0;
    double length = 1.0;

    grid() = default;
    grid(int d_, int N_, double length_) : d(d_), N(N_), length(length_) {
        if (d < 1 || d > 2) throw std::invalid_argument("grid: dimension must be 1 or 2");
        if (N < 4) throw std::invalid_argument("grid: need at least 4 points per axis");
        if (!(length > 0.0)) throw std::invalid_argument("grid: length must be positive");
    }

    int size() const { return d == 1 ? N : N * N; }
    double h() const { return length / N; }
    double cell_volume() const { return std::pow(h(), d); }

    int wrap(int i) const { return ((i % N) + N) % N; }
    int flat(int i0, int i1 = 0) const { return wrap(i0) + (d == 2 ? N * wrap(i1) : 0); }
    std::array<int, 2> coords(int flat_index) const {
        return {flat_index % N, d == 2 ? flat_index / N : 0};
    }
    /// physical coordinate of node i along one axis
    double x(int i) const { return h() * i; }
    /// shortest periodic distance between two coordinates
    double periodic_dist(double a, double b) const {
        double t = std::fmod(std::abs(a - b), length);
        return std::min(t, length - t);
    }

    bool operator==(const grid& o) const { return d == o.d && N == o.N && length == o.length; }
};

/// Complex scalar field sampled on a grid.
struct grid_function {
    grid g;
    Eigen::VectorXcd values;

    grid_function() = default;
    explicit grid_function(const grid& g_) : g(g_), values(Eigen::VectorXcd::Zero(g_.size())) {}
    grid_function(const grid& g_, Eigen::VectorXcd v) : g(g_), values(std::move(v)) {
        if (values.size() != g.size())
            throw std::invalid_argument("grid_function: value count does not match the grid");
    }

    complexd& operator()(int i0, int i1 = 0) { return values[g.flat(i0, i1)]; }
    complexd operator()(int i0, int i1 = 0) const { return values[g.flat(i0, i1)]; }

    /// discrete L2 norm with cell-volume weights
    double norm_l2() const { return std::sqrt(values.squaredNorm() * g.cell_volume()); }
    complexd mean() const { return values.sum() / double(g.size()); }
};

/// Forward-difference gradient: component j at node x is
/// (f(x + h e_j) - f(x)) / h, living on the face between the two nodes.
inline std::vector<grid_function> discrete_gradient(const grid_function& f) {
    const grid& g = f.g;
    const double h = g.h();
    std::vector<grid_function> out(g.d, grid_function(g));
    for (int idx = 0; idx < g.size(); ++idx) {
        auto [i0, i1] = g.coords(idx);
        out[0].values[idx] = (f(i0 + 1, i1) - f(i0, i1)) / h;
        if (g.d == 2) out[1].values[idx] = (f(i0, i1 + 1) - f(i0, i1)) / h;
    }
    return out;
}

/// Pointwise Euclidean length of the gradient vector.
inline std::vector<double> gradient_magnitude(const std::vector<grid_function>& grad) {
    if (grad.empty()) throw std::invalid_argument("gradient_magnitude: empty gradient");
    std::vector<double> out(grad[0].values.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double s = 0.0;
        for (const auto& comp : grad) s += std::norm(comp.values[i]);
        out[i] = std::sqrt(s);
    }
    return out;
}

/// Luxemburg norm of a grid function (modular built from |f| with the grid's
/// cell volume).
inline double luxemburg_norm(const young_function& phi, const grid_function& f) {
    std::vector<double> av(f.values.size());
    for (std::size_t i = 0; i < av.size(); ++i) av[i] = std::abs(f.values[i]);
    return luxemburg_norm(phi, av, f.g.cell_volume());
}

// ---------------------------------------------------------------------------
// Initial-data builders
// ---------------------------------------------------------------------------

/// Smooth periodic bump exp(-dist(x, center)^2 / width^2) scaled by a complex
/// amplitude, where dist is the torus distance.
inline grid_function gaussian_bump(const grid& g, const std::vector<double>& center, double width,
                                   complexd amplitude) {
    if (static_cast<int>(center.size()) != g.d)
        throw std::invalid_argument("gaussian_bump: center dimension mismatch");
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump: width must be positive");
    grid_function f(g);
    for (int idx = 0; idx < g.size(); ++idx) {
        auto [i0, i1] = g.coords(idx);
        double d2 = sq(g.periodic_dist(g.x(i0), center[0]));
        if (g.d == 2) d2 += sq(g.periodic_dist(g.x(i1), center[1]));
        f.values[idx] = amplitude * std::exp(-d2 / sq(width));
    }
    return f;
}

/// Single Fourier mode exp(i 2 pi k . x / length) with integer wave numbers.
inline grid_function fourier_mode(const grid& g, const std::vector<int>& k,
                                  complexd amplitude = 1.0) {
    if (static_cast<int>(k.size()) != g.d)
        throw std::invalid_argument("fourier_mode: wave-number dimension mismatch");
    grid_function f(g);
    const double tau = 6.283185307179586476925286766559;
    for (int idx = 0; idx < g.size(); ++idx) {
        auto [i0, i1] = g.coords(idx);
        double phase = tau * k[0] * g.x(i0) / g.length;
        if (g.d == 2) phase += tau * k[1] * g.x(i1) / g.length;
        f.values[idx] = amplitude * complexd(std::cos(phase), std::sin(phase));
    }
    return f;
}

}  // namespace orlicz
