#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/common.hpp"

namespace orlicz {

struct quad_rule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

/// Gauss-Legendre rule of order n, computed by Newton iteration on P_n and
/// cached.  Accurate to machine precision for the n used here (n <= 64).
inline const quad_rule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    static std::map<int, quad_rule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    quad_rule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev-based initial guess for the i-th root of P_n
        double x = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // evaluate P_n(x) and P_n'(x) by recurrence
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    auto [pos, inserted] = cache.emplace(n, std::move(r));
    (void)inserted;
    return pos->second;
}

/// Fixed-order Gauss-Legendre integral of f over [a, b].
template <typename F>
double integrate_gl(F&& f, double a, double b, int order) {
    const quad_rule& r = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t i = 0; i < r.nodes.size(); ++i)
        sum += r.weights[i] * f(mid + half * r.nodes[i]);
    return sum * half;
}

namespace detail {

// Gauss-Kronrod 7-15 pair on [-1, 1]; the odd Kronrod nodes embed G7.
inline constexpr double gk15_nodes[15] = {
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245,  0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,  0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,  0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};

inline constexpr double gk15_wk[15] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};

inline constexpr double gk15_wg[7] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
    0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

template <typename F>
inline std::pair<double, double> gk15(F&& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        double v = f(mid + half * gk15_nodes[i]);
        k += gk15_wk[i] * v;
        if (i % 2 == 1) g += gk15_wg[i / 2] * v;
    }
    return {k * half, std::abs(k - g) * half};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration with an explicit interval stack.
/// Throws std::runtime_error naming the offending subinterval when the
/// subdivision budget is exhausted before the tolerance is met.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-12,
                          double abs_tol = 0.0, int max_intervals = 4000) {
    if (!(a <= b)) throw std::invalid_argument("integrate_adaptive: a must be <= b");
    if (a == b) return 0.0;

    struct interval {
        double a, b, value, error;
    };
    auto [v0, e0] = detail::gk15(f, a, b);
    std::vector<interval> stack{{a, b, v0, e0}};
    double total_v = v0, total_e = e0;
    int splits = 0;

    while (total_e > abs_tol + rel_tol * std::abs(total_v)) {
        // pick the interval with the largest error
        std::size_t worst = 0;
        for (std::size_t i = 1; i < stack.size(); ++i)
            if (stack[i].error > stack[worst].error) worst = i;
        interval cur = stack[worst];
        double m = 0.5 * (cur.a + cur.b);
        if (++splits > max_intervals || m <= cur.a || m >= cur.b) {
            throw std::runtime_error(
                "integrate_adaptive: tolerance not reached; worst subinterval [" +
                std::to_string(cur.a) + ", " + std::to_string(cur.b) + "] error " +
                std::to_string(cur.error));
        }
        auto [vl, el] = detail::gk15(f, cur.a, m);
        auto [vr, er] = detail::gk15(f, m, cur.b);
        total_v += vl + vr - cur.value;
        total_e += el + er - cur.error;
        stack[worst] = {cur.a, m, vl, el};
        stack.push_back({m, cur.b, vr, er});
    }
    return total_v;
}

}  // namespace orlicz
