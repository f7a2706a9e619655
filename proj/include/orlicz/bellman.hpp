#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/common.hpp"
#include "orlicz/ellipticity.hpp"
#include "orlicz/hessian.hpp"
#include "orlicz/quadrature.hpp"
#include "orlicz/report.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

// ---------------------------------------------------------------------------
// Context: a Young pair, a matrix pair, and the committed coupling parameter
// ---------------------------------------------------------------------------

enum class bellman_region { lower, upper };

struct bellman_context {
    conjugate_pair pair;
    char_quantities q;
    std::shared_ptr<const aux_integrals> aux;
    matrix_field A, B;

    double delta = 0.0;        ///< coupling weight committed at construction
    double c_p = 0.0;          ///< max Lambda / (min Delta_p * min lambda)
    double hessian_coeff = 0;  ///< (1/10) sqrt(Mt/mt * (mt-1)/(Mt-1)) / c_p
    double factor_upper = 0;   ///< 2 max{1, M/mt}

    /// delta budget the gradient-bound certificate insists on.
    double delta_budget() const { return (q.mt - 1.0) / (100.0 * q.mt); }
};

inline bellman_context make_bellman_context(const conjugate_pair& pair, const matrix_field& A,
                                            const matrix_field& B,
                                            const scan_options& opt = {}) {
    bellman_context ctx{pair, compute_char_quantities(pair, opt),
                        nullptr, A, B};
    ctx.aux = std::make_shared<aux_integrals>(pair, ctx.q);
    ctx.c_p = c_p_constant(A, B, ctx.q.p);  // rejects non-elliptic pairs by name
    ctx.delta = delta_param(ctx.q, A, B);
    ctx.hessian_coeff =
        0.1 * std::sqrt(ctx.q.Mt / ctx.q.mt * (ctx.q.mt - 1.0) / (ctx.q.Mt - 1.0)) / ctx.c_p;
    ctx.factor_upper = 2.0 * std::max(1.0, ctx.q.M / ctx.q.mt);
    return ctx;
}

/// Fault-injection hook for the negative controls: returns a context whose
/// committed delta no longer matches its own certificate.
inline bellman_context scale_delta(bellman_context ctx, double factor) {
    ctx.delta *= factor;
    return ctx;
}

// ---------------------------------------------------------------------------
// Pointwise evaluation
// ---------------------------------------------------------------------------

/// Region split along the critical curve |v| = Phi'(|u|); ties go lower.
inline bellman_region classify(const bellman_context& ctx, complexd u, complexd v) {
    return std::abs(v) <= ctx.pair.phi.d1(std::abs(u)) ? bellman_region::lower
                                                       : bellman_region::upper;
}

inline double bellman_eval(const bellman_context& ctx, complexd u, complexd v) {
    const double au = std::abs(u), av = std::abs(v);
    const double phi = ctx.pair.phi.eval(au), psi = ctx.pair.psi.eval(av);
    if (classify(ctx, u, v) == bellman_region::lower) {
        double tail = au > 0.0 ? ctx.delta * au * au * ctx.aux->I(au) : 0.0;
        return (1.0 + ctx.delta) * (phi + psi) + tail;
    }
    double tail = au > 0.0 ? ctx.delta * au * au * ctx.aux->J(av) : 0.0;
    return phi + psi + tail;
}

/// Relative disagreement of the two branch formulas on the critical curve,
/// normalized by 1 + value.  Analytically zero; numerically limited by the
/// cumulative-integral evaluation.
inline double branch_gap(const bellman_context& ctx, double au) {
    if (au <= 0.0) throw std::invalid_argument("branch_gap: need au > 0");
    const double av = ctx.pair.phi.d1(au);
    const double phi = ctx.pair.phi.eval(au), psi = ctx.pair.psi.eval(av);
    double lower = (1.0 + ctx.delta) * (phi + psi) + ctx.delta * au * au * ctx.aux->I(au);
    double upper = phi + psi + ctx.delta * au * au * ctx.aux->J(av);
    return std::abs(lower - upper) / (1.0 + std::abs(lower));
}

// ---------------------------------------------------------------------------
// First derivatives (Wirtinger form)
// ---------------------------------------------------------------------------

/// Radial first partials (d/d|u|, d/d|v|) of the Bellman function.
inline std::pair<double, double> bellman_radial_gradient(const bellman_context& ctx, double au,
                                                         double av, bellman_region region) {
    const auto& phi = ctx.pair.phi;
    const auto& psi = ctx.pair.psi;
    if (region == bellman_region::lower) {
        double b1 = (1.0 + 2.0 * ctx.delta) * phi.d1(au) +
                    (au > 0.0 ? 2.0 * ctx.delta * au * ctx.aux->I(au) : 0.0);
        double b2 = (1.0 + ctx.delta) * psi.d1(av);
        return {b1, b2};
    }
    double b1 = phi.d1(au) + 2.0 * ctx.delta * au * ctx.aux->J(av);
    double dpsi = psi.d1(av);
    double b2 = dpsi + ctx.delta * au * au / dpsi;
    return {b1, b2};
}

/// Wirtinger gradient (d/d conj(u), d/d conj(v)).  With extend = false the
/// coordinate planes are poles (the phase u/|u| is undefined); with
/// extend = true the continuous extension by zero is returned there.
inline std::pair<complexd, complexd> bellman_gradient(const bellman_context& ctx, complexd u,
                                                      complexd v, bool extend = false) {
    const double au = std::abs(u), av = std::abs(v);
    auto region = classify(ctx, u, v);
    auto [b1, b2] = bellman_radial_gradient(ctx, au, av, region);
    complexd gu, gv;
    if (au > 0.0)
        gu = 0.5 * b1 * (u / au);
    else if (extend)
        gu = 0.0;
    else
        throw pole_error("bellman_gradient: u on the coordinate plane");
    if (av > 0.0)
        gv = 0.5 * b2 * (v / av);
    else if (extend)
        gv = 0.0;
    else
        throw pole_error("bellman_gradient: v on the coordinate plane");
    return {gu, gv};
}

// ---------------------------------------------------------------------------
// Second derivatives
// ---------------------------------------------------------------------------

struct bellman_hessian_form {
    bellman_region region;
    double b1, b2;         ///< radial first partials
    double b11, b12, b22;  ///< radial second partials
};

inline bellman_hessian_form bellman_radial_hessian(const bellman_context& ctx, complexd u,
                                                   complexd v) {
    const double au = std::abs(u), av = std::abs(v);
    if (au == 0.0 || av == 0.0)
        throw pole_error("bellman_radial_hessian: argument on a coordinate plane");
    const auto& phi = ctx.pair.phi;
    const auto& psi = ctx.pair.psi;
    bellman_hessian_form f{};
    f.region = classify(ctx, u, v);
    auto [b1, b2] = bellman_radial_gradient(ctx, au, av, f.region);
    f.b1 = b1;
    f.b2 = b2;
    if (f.region == bellman_region::lower) {
        f.b11 = (1.0 + 2.0 * ctx.delta) * phi.d2(au) + 2.0 * ctx.delta * phi.d1(au) / au +
                2.0 * ctx.delta * ctx.aux->I(au);
        f.b12 = 0.0;
        f.b22 = (1.0 + ctx.delta) * psi.d2(av);
    } else {
        double dpsi = psi.d1(av), ddpsi = psi.d2(av);
        f.b11 = phi.d2(au) + 2.0 * ctx.delta * ctx.aux->J(av);
        f.b12 = 2.0 * ctx.delta * au / dpsi;
        f.b22 = ddpsi * (1.0 - ctx.delta * au * au / (dpsi * dpsi));
    }
    return f;
}

/// Full 4x4 Hessian in (Re u, Im u, Re v, Im v).
inline Eigen::Matrix4d bellman_hessian4(const bellman_context& ctx, complexd u, complexd v) {
    auto f = bellman_radial_hessian(ctx, u, v);
    return hessian4_from_radial(f.b1, f.b2, f.b11, f.b12, f.b22, u, v);
}

/// Generalized Hessian form against a fixed matrix pair evaluated at one node.
inline double bellman_hessian_node(const bellman_context& ctx, complexd u, complexd v,
                                   const Eigen::MatrixXcd& Anode, const Eigen::MatrixXcd& Bnode,
                                   const Eigen::VectorXcd& zeta, const Eigen::VectorXcd& eta) {
    return generalized_hessian(bellman_hessian4(ctx, u, v), Anode, Bnode, zeta, eta);
}

// ---------------------------------------------------------------------------
// Sampling helpers
// ---------------------------------------------------------------------------

struct sample_range {
    double lo = 1e-3;
    double hi = 1e3;
};

namespace detail {

inline complexd random_point(sample_rng& rng, const sample_range& r) {
    return rng.log_uniform(r.lo, r.hi) * rng.unit_complex();
}

inline Eigen::VectorXcd random_direction(sample_rng& rng, int d, double radius_lo,
                                         double radius_hi) {
    Eigen::VectorXcd z(d);
    for (int i = 0; i < d; ++i) z[i] = complexd(rng.normal(), rng.normal());
    double n = z.norm();
    if (n == 0.0) z[0] = 1.0, n = 1.0;
    return z * (rng.log_uniform(radius_lo, radius_hi) / n);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Certificate checks
// ---------------------------------------------------------------------------

/// 0 <= Bellman <= 2 max{1, M/mt} (Phi(|u|) + Psi(|v|)), relative margins.
inline margin_report verify_upper_bound(const bellman_context& ctx, long samples, std::uint64_t seed,
                                        const sample_range& range = {}) {
    margin_report rep;
    rep.name = "bellman-upper-bound";
    rep.samples = samples;
    rep.tolerance = 1e-9;
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (long i = 0; i < samples; ++i) {
        auto rng = sample_rng(seed, static_cast<std::uint64_t>(i));
        complexd u = detail::random_point(rng, range), v = detail::random_point(rng, range);
        double bound =
            ctx.factor_upper * (ctx.pair.phi.eval(std::abs(u)) + ctx.pair.psi.eval(std::abs(v)));
        double x = bellman_eval(ctx, u, v);
        double margin = std::min((bound - x) / bound, x / bound);
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.argmin = "u=" + format_double(std::abs(u), 9) + " v=" + format_double(std::abs(v), 9);
        }
    }
    rep.pass = rep.min_margin >= -rep.tolerance;
    return rep;
}

/// |d/d conj(u)| <= max{Phi'(|u|), |v|} and |d/d conj(v)| <= Psi'(|v|).
/// The certificate is only valid under the committed delta budget, so the
/// check first re-derives delta and refuses when the context was tampered
/// with (this is the designed failure path of the negative control).
inline margin_report verify_gradient_bound(const bellman_context& ctx, long samples,
                                           std::uint64_t seed, const sample_range& range = {}) {
    margin_report rep;
    rep.name = "bellman-gradient-bound";
    rep.samples = samples;
    rep.tolerance = 1e-9;
    rep.min_margin = std::numeric_limits<double>::infinity();

    double budget = ctx.delta_budget();
    double recomputed = delta_param(ctx.q, ctx.A, ctx.B);
    if (!(ctx.delta <= budget * (1.0 + 1e-12))) {
        rep.pass = false;
        rep.min_margin = budget - ctx.delta;
        rep.note = "delta " + format_double(ctx.delta, 9) + " exceeds certificate budget " +
                   format_double(budget, 9);
        return rep;
    }
    if (!(std::abs(ctx.delta - recomputed) <= 1e-12 * std::max(ctx.delta, recomputed))) {
        rep.pass = false;
        rep.min_margin = -std::abs(ctx.delta - recomputed);
        rep.note = "delta " + format_double(ctx.delta, 9) +
                   " does not match its defining formula " + format_double(recomputed, 9);
        return rep;
    }

    for (long i = 0; i < samples; ++i) {
        auto rng = sample_rng(seed, static_cast<std::uint64_t>(i));
        complexd u = detail::random_point(rng, range), v = detail::random_point(rng, range);
        auto [gu, gv] = bellman_gradient(ctx, u, v);
        double bound_u = std::max(ctx.pair.phi.d1(std::abs(u)), std::abs(v));
        double bound_v = ctx.pair.psi.d1(std::abs(v));
        double margin =
            std::min((bound_u - std::abs(gu)) / bound_u, (bound_v - std::abs(gv)) / bound_v);
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.argmin = "u=" + format_double(std::abs(u), 9) + " v=" + format_double(std::abs(v), 9);
        }
    }
    rep.pass = rep.min_margin >= -rep.tolerance;
    return rep;
}

/// Generalized Hessian lower bound
///   H >= (1/10) sqrt(Mt/mt * (mt-1)/(Mt-1)) / C_p * |zeta| |eta|
/// sampled off the critical curve (near hits are re-drawn deterministically).
inline margin_report verify_hessian_lower(const bellman_context& ctx, long samples,
                                          std::uint64_t seed, const sample_range& range = {}) {
    margin_report rep;
    rep.name = "bellman-hessian-lower-bound";
    rep.samples = samples;
    rep.tolerance = 1e-6;
    rep.min_margin = std::numeric_limits<double>::infinity();
    const int d = ctx.A.dim();
    const std::size_t nodes = std::max(ctx.A.count(), ctx.B.count());
    long resampled = 0;

    for (long i = 0; i < samples; ++i) {
        complexd u, v;
        bool ok = false;
        for (int retry = 0; retry < 64 && !ok; ++retry) {
            auto rng = sample_rng(seed + 77777ull * static_cast<std::uint64_t>(retry),
                                  static_cast<std::uint64_t>(i));
            u = detail::random_point(rng, range);
            v = detail::random_point(rng, range);
            double crit = ctx.pair.phi.d1(std::abs(u));
            ok = std::abs(std::abs(v) - crit) > 1e-9 * std::max(std::abs(v), crit);
            if (!ok) ++resampled;
            if (ok) {
                auto zeta = detail::random_direction(rng, d, 1e-2, 1e2);
                auto eta = detail::random_direction(rng, d, 1e-2, 1e2);
                double floor = ctx.hessian_coeff * zeta.norm() * eta.norm();
                Eigen::Matrix4d h4 = bellman_hessian4(ctx, u, v);
                for (std::size_t node = 0; node < nodes; ++node) {
                    double h = generalized_hessian(h4, ctx.A.at(node), ctx.B.at(node), zeta, eta);
                    double margin = (h - floor) / floor;
                    if (margin < rep.min_margin) {
                        rep.min_margin = margin;
                        rep.argmin = "u=" + format_double(std::abs(u), 9) +
                                     " v=" + format_double(std::abs(v), 9);
                    }
                }
            }
        }
        if (!ok) throw std::runtime_error("verify_hessian_lower: could not move off the curve");
    }
    if (resampled > 0) rep.note = std::to_string(resampled) + " near-curve draws re-drawn";
    rep.pass = rep.min_margin >= -rep.tolerance;
    return rep;
}

// ---------------------------------------------------------------------------
// Mollification
// ---------------------------------------------------------------------------

/// Product quadrature for convolution against the radial bump
/// c exp(-1/(1 - |x|^2)) supported on the unit ball of C^2 ~ R^4, scaled to
/// radius nu.  Polar coordinates (tau, psi, theta1, theta2) with
/// w = nu tau cos(psi) e^{i theta1}, z = nu tau sin(psi) e^{i theta2};
/// the weight tau^3 cos(psi) sin(psi) phi(tau) carries the Jacobian, and the
/// node weights are normalized to sum to one (the constant c drops out).
class mollifier {
  public:
    explicit mollifier(double nu, int radial = 12, int angular = 12) : nu_(nu) {
        if (!(nu > 0.0)) throw std::invalid_argument("mollifier: nu must be positive");
        auto tau_rule = gauss_legendre(radial);
        auto psi_rule = gauss_legendre(radial);
        const double pi = std::acos(-1.0);
        double total = 0.0;
        for (int it = 0; it < radial; ++it) {
            double tau = 0.5 * (tau_rule.nodes[it] + 1.0);
            double wt = 0.5 * tau_rule.weights[it];
            double bump = std::exp(-1.0 / (1.0 - tau * tau));
            for (int ip = 0; ip < radial; ++ip) {
                double psi = 0.25 * pi * (psi_rule.nodes[ip] + 1.0);
                double wp = 0.25 * pi * psi_rule.weights[ip];
                double base = wt * wp * tau * tau * tau * std::cos(psi) * std::sin(psi) * bump;
                double r1 = nu * tau * std::cos(psi), r2 = nu * tau * std::sin(psi);
                for (int k1 = 0; k1 < angular; ++k1) {
                    double th1 = 2.0 * pi * (k1 + 0.5) / angular;
                    complexd w = r1 * complexd(std::cos(th1), std::sin(th1));
                    for (int k2 = 0; k2 < angular; ++k2) {
                        double th2 = 2.0 * pi * (k2 + 0.5) / angular;
                        complexd z = r2 * complexd(std::cos(th2), std::sin(th2));
                        nodes_.push_back({w, z, base});
                        total += base;
                    }
                }
            }
        }
        for (auto& n : nodes_) n.weight /= total;
    }

    double nu() const { return nu_; }
    std::size_t size() const { return nodes_.size(); }

    template <class F>
    double convolve(F&& f, complexd u, complexd v) const {
        double acc = 0.0;
        for (const auto& n : nodes_) acc += n.weight * f(u - n.w, v - n.z);
        return acc;
    }

    template <class F>
    std::pair<complexd, complexd> convolve_pair(F&& f, complexd u, complexd v) const {
        complexd a = 0.0, b = 0.0;
        for (const auto& n : nodes_) {
            auto [x, y] = f(u - n.w, v - n.z);
            a += n.weight * x;
            b += n.weight * y;
        }
        return {a, b};
    }

  private:
    struct node {
        complexd w, z;
        double weight;
    };
    std::vector<node> nodes_;
    double nu_;
};

inline double mollified_eval(const bellman_context& ctx, const mollifier& m, complexd u,
                             complexd v) {
    return m.convolve([&](complexd a, complexd b) { return bellman_eval(ctx, a, b); }, u, v);
}

inline std::pair<complexd, complexd> mollified_gradient(const bellman_context& ctx,
                                                        const mollifier& m, complexd u,
                                                        complexd v) {
    return m.convolve_pair(
        [&](complexd a, complexd b) { return bellman_gradient(ctx, a, b, /*extend=*/true); }, u,
        v);
}

inline double mollified_hessian_node(const bellman_context& ctx, const mollifier& m, complexd u,
                                     complexd v, const Eigen::MatrixXcd& Anode,
                                     const Eigen::MatrixXcd& Bnode, const Eigen::VectorXcd& zeta,
                                     const Eigen::VectorXcd& eta) {
    return m.convolve(
        [&](complexd a, complexd b) {
            // coordinate-plane and on-curve nodes are measure zero for the
            // quadrature; nudge exact hits into the open region
            if (std::abs(a) < 1e-150) a = 1e-150;
            if (std::abs(b) < 1e-150) b = 1e-150;
            return bellman_hessian_node(ctx, a, b, Anode, Bnode, zeta, eta);
        },
        u, v);
}

struct mollified_report {
    margin_report bound;     ///< 0 <= X_nu <= 2 max{1,M/mt}(Phi(|u|+nu)+Psi(|v|+nu))
    margin_report gradient;  ///< shifted gradient bounds
    margin_report hessian;   ///< same Hessian floor as the pointwise form
};

/// Smoothed-function analogues of the three certificate checks.  Margins are
/// quadrature-limited, so the tolerance is the product-rule accuracy rather
/// than machine precision.
inline mollified_report verify_mollified(const bellman_context& ctx, const mollifier& m,
                                         long samples, std::uint64_t seed,
                                         const sample_range& range = {},
                                         double quad_tol = 1e-3) {
    mollified_report out;
    out.bound.name = "mollified-upper-bound";
    out.gradient.name = "mollified-gradient-bound";
    out.hessian.name = "mollified-hessian-lower-bound";
    for (auto* r : {&out.bound, &out.gradient, &out.hessian}) {
        r->samples = samples;
        r->tolerance = quad_tol;
        r->min_margin = std::numeric_limits<double>::infinity();
    }
    const double nu = m.nu();
    const int d = ctx.A.dim();
    const std::size_t nodes = std::max(ctx.A.count(), ctx.B.count());

    for (long i = 0; i < samples; ++i) {
        auto rng = sample_rng(seed, static_cast<std::uint64_t>(i));
        complexd u = detail::random_point(rng, range), v = detail::random_point(rng, range);
        auto zeta = detail::random_direction(rng, d, 1e-2, 1e2);
        auto eta = detail::random_direction(rng, d, 1e-2, 1e2);

        double bound = ctx.factor_upper * (ctx.pair.phi.eval(std::abs(u) + nu) +
                                           ctx.pair.psi.eval(std::abs(v) + nu));
        double x = mollified_eval(ctx, m, u, v);
        double mb = std::min((bound - x) / bound, x / bound);
        if (mb < out.bound.min_margin) {
            out.bound.min_margin = mb;
            out.bound.argmin = "u=" + format_double(std::abs(u), 9) +
                               " v=" + format_double(std::abs(v), 9);
        }

        auto [gu, gv] = mollified_gradient(ctx, m, u, v);
        double bu = std::max(ctx.pair.phi.d1(std::abs(u) + nu), std::abs(v) + nu);
        double bv = ctx.pair.psi.d1(std::abs(v) + nu);
        double mg = std::min((bu - std::abs(gu)) / bu, (bv - std::abs(gv)) / bv);
        if (mg < out.gradient.min_margin) {
            out.gradient.min_margin = mg;
            out.gradient.argmin = out.bound.argmin;
        }

        double floor = ctx.hessian_coeff * zeta.norm() * eta.norm();
        for (std::size_t node = 0; node < nodes; ++node) {
            double h = mollified_hessian_node(ctx, m, u, v, ctx.A.at(node), ctx.B.at(node), zeta,
                                              eta);
            double mh = (h - floor) / floor;
            if (mh < out.hessian.min_margin) {
                out.hessian.min_margin = mh;
                out.hessian.argmin = out.bound.argmin;
            }
        }
    }
    for (auto* r : {&out.bound, &out.gradient, &out.hessian})
        r->pass = r->min_margin >= -r->tolerance;
    return out;
}

}  // namespace orlicz
