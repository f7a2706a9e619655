#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "orlicz/common.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

// ---------------------------------------------------------------------------
// Root finding for strictly increasing C^1 bijections of [0, inf).
// ---------------------------------------------------------------------------

/// Solve f(x) = target for f strictly increasing with f(0) = 0, using bracket
/// expansion from [0, 1] plus bisection-safeguarded Newton.  `df` is f'.
template <typename F, typename DF>
double invert_increasing(F&& f, DF&& df, double target, const char* what = "invert_increasing") {
    if (!(target >= 0.0) || !std::isfinite(target))
        throw std::invalid_argument(std::string(what) + ": target must be finite and >= 0");
    if (target == 0.0) return 0.0;

    double hi = 1.0, fhi = f(hi);
    double last_finite = fhi;
    while (fhi < target) {
        if (!std::isfinite(fhi) || hi > 1e300)
            throw domain_limit_error(std::string(what) +
                                         ": target exceeds the reachable range of the function",
                                     0.0, last_finite);
        last_finite = fhi;
        hi *= 2.0;
        fhi = f(hi);
    }
    double lo = (hi > 1.0) ? hi * 0.5 : 0.0;  // f(lo) < target <= f(hi)

    double x = (lo > 0.0) ? std::sqrt(lo * hi) : 0.5 * hi;
    for (int iter = 0; iter < 200; ++iter) {
        double fx = f(x);
        if (std::abs(fx - target) <= 4e-16 * target) return x;
        if (fx < target)
            lo = x;
        else
            hi = x;
        if (hi - lo <= 8.0 * std::numeric_limits<double>::epsilon() * hi) return x;
        double d = df(x);
        double step_x = (d > 0.0 && std::isfinite(d)) ? x - (fx - target) / d
                                                      : std::numeric_limits<double>::quiet_NaN();
        if (std::isfinite(step_x) && step_x > lo && step_x < hi)
            x = step_x;
        else
            x = (lo > 0.0) ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Young functions
// ---------------------------------------------------------------------------

/// Which half of a complementary pair a function lives on: a `phi`-side
/// function has d1(s)/s -> 0 at 0+, a `psi`-side function has d1(s)/s -> inf.
enum class young_side { phi, psi };

/// A Young function: increasing, convex, vanishing at 0, C^1 on [0, inf) and
/// C^2 on (0, inf), with the zero-condition and growth assumptions of the
/// complementary-pair calculus.  Value type; cheap to copy.
class young_function {
public:
    struct impl {
        virtual ~impl() = default;
        virtual double eval(double s) const = 0;
        virtual double d1(double s) const = 0;
        virtual double d2(double s) const = 0;
        /// {eval, d1, d2} in one call; numeric conjugates override this to
        /// share a single root solve.
        virtual std::array<double, 3> eval_all(double s) const {
            return {eval(s), d1(s), d2(s)};
        }
        /// Closed form of int_0^t d1(s)/s^2 ds, if the family has one.
        virtual std::optional<double> closed_flux_integral(double) const { return std::nullopt; }
        /// Closed form of int_0^t 1/d1(s) ds, if the family has one.
        virtual std::optional<double> closed_inverse_slope_integral(double) const {
            return std::nullopt;
        }
        /// Closed-form conjugate, if the family has one.
        virtual std::shared_ptr<const impl> closed_conjugate() const { return nullptr; }

        std::string name;
        young_side side = young_side::phi;
        bool numeric = false;  // true when evaluation involves root solving
    };

    explicit young_function(std::shared_ptr<const impl> p) : p_(std::move(p)) {}

    double operator()(double s) const { return eval(s); }
    double eval(double s) const { return p_->eval(check(s)); }
    double d1(double s) const { return p_->d1(check(s)); }
    double d2(double s) const { return p_->d2(check(s)); }
    std::array<double, 3> eval_all(double s) const { return p_->eval_all(check(s)); }

    const std::string& name() const { return p_->name; }
    young_side side() const { return p_->side; }
    bool is_numeric() const { return p_->numeric; }
    const impl& implementation() const { return *p_; }
    std::shared_ptr<const impl> share() const { return p_; }

    // -- families ------------------------------------------------------------

    /// s^p / p with p in (2, inf).
    static young_function power_law(double p);
    /// s^r log(s + e) with r in (2, inf).
    static young_function zygmund_log(double r);
    /// s^p + eps * s^r with 2 < r < p and eps in (0, 1].
    static young_function power_sum(double p, double r, double eps);
    /// Conjugate-side family s^q + s^r with 1 < q < r < 2.
    static young_function dual_power_sum(double q, double r);

private:
    static double check(double s) {
        if (!(s >= 0.0))
            throw std::invalid_argument("young_function: argument must be >= 0, got " +
                                        std::to_string(s));
        return s;
    }
    std::shared_ptr<const impl> p_;
};

namespace detail {

struct power_impl final : young_function::impl {
    double e;  // exponent; phi side when e > 2, psi side when 1 < e < 2
    explicit power_impl(double e_) : e(e_) {
        std::ostringstream os;
        os << "power:" << e;
        name = os.str();
        side = (e >= 2.0) ? young_side::phi : young_side::psi;
    }
    double eval(double s) const override { return std::pow(s, e) / e; }
    double d1(double s) const override { return std::pow(s, e - 1.0); }
    double d2(double s) const override { return (e - 1.0) * std::pow(s, e - 2.0); }
    std::optional<double> closed_flux_integral(double t) const override {
        if (e <= 2.0) return std::nullopt;  // diverges at 0 on the psi side
        return std::pow(t, e - 2.0) / (e - 2.0);
    }
    std::optional<double> closed_inverse_slope_integral(double t) const override {
        if (e >= 2.0) return std::nullopt;  // diverges at 0 on the phi side
        return std::pow(t, 2.0 - e) / (2.0 - e);
    }
    std::shared_ptr<const impl> closed_conjugate() const override {
        return std::make_shared<power_impl>(e / (e - 1.0));
    }
};

struct zygmund_impl final : young_function::impl {
    double r;
    explicit zygmund_impl(double r_) : r(r_) {
        std::ostringstream os;
        os << "zygmund-log:" << r;
        name = os.str();
        side = young_side::phi;
    }
    static constexpr double euler_e = 2.71828182845904523536028747135;
    double eval(double s) const override { return std::pow(s, r) * std::log(s + euler_e); }
    double d1(double s) const override {
        return r * std::pow(s, r - 1.0) * std::log(s + euler_e) + std::pow(s, r) / (s + euler_e);
    }
    double d2(double s) const override {
        double l = std::log(s + euler_e);
        return r * (r - 1.0) * std::pow(s, r - 2.0) * l +
               2.0 * r * std::pow(s, r - 1.0) / (s + euler_e) -
               std::pow(s, r) / sq(s + euler_e);
    }
};

struct power_sum_impl final : young_function::impl {
    double p, r, eps;
    power_sum_impl(double p_, double r_, double eps_) : p(p_), r(r_), eps(eps_) {
        std::ostringstream os;
        os << "power-sum:" << p << ":" << r << ":" << eps;
        name = os.str();
        side = young_side::phi;
    }
    double eval(double s) const override { return std::pow(s, p) + eps * std::pow(s, r); }
    double d1(double s) const override {
        return p * std::pow(s, p - 1.0) + eps * r * std::pow(s, r - 1.0);
    }
    double d2(double s) const override {
        return p * (p - 1.0) * std::pow(s, p - 2.0) + eps * r * (r - 1.0) * std::pow(s, r - 2.0);
    }
    std::optional<double> closed_flux_integral(double t) const override {
        return p * std::pow(t, p - 2.0) / (p - 2.0) + eps * r * std::pow(t, r - 2.0) / (r - 2.0);
    }
};

struct dual_power_sum_impl final : young_function::impl {
    double q, r;
    dual_power_sum_impl(double q_, double r_) : q(q_), r(r_) {
        std::ostringstream os;
        os << "dual-power-sum:" << q << ":" << r;
        name = os.str();
        side = young_side::psi;
    }
    double eval(double s) const override { return std::pow(s, q) + std::pow(s, r); }
    double d1(double s) const override {
        return q * std::pow(s, q - 1.0) + r * std::pow(s, r - 1.0);
    }
    double d2(double s) const override {
        return q * (q - 1.0) * std::pow(s, q - 2.0) + r * (r - 1.0) * std::pow(s, r - 2.0);
    }
};

/// Numeric Legendre conjugate: d1 is the inverse slope by root finding, eval
/// comes from the Young equality st = f(s) + f*(t) at t = f'(s), d2 from the
/// inverse-function rule.
struct numeric_conjugate_impl final : young_function::impl {
    std::shared_ptr<const young_function::impl> base;

    explicit numeric_conjugate_impl(std::shared_ptr<const young_function::impl> b)
        : base(std::move(b)) {
        name = "conjugate(" + base->name + ")";
        side = (base->side == young_side::phi) ? young_side::psi : young_side::phi;
        numeric = true;
    }

    double slope_inverse(double t) const {
        return invert_increasing([&](double x) { return base->d1(x); },
                                 [&](double x) { return base->d2(x); }, t, name.c_str());
    }
    double eval(double t) const override {
        if (t == 0.0) return 0.0;
        double s = slope_inverse(t);
        return t * s - base->eval(s);
    }
    double d1(double t) const override { return slope_inverse(t); }
    double d2(double t) const override {
        if (t == 0.0) return std::numeric_limits<double>::infinity();
        return 1.0 / base->d2(slope_inverse(t));
    }
    std::array<double, 3> eval_all(double t) const override {
        if (t == 0.0) return {0.0, 0.0, std::numeric_limits<double>::infinity()};
        double s = slope_inverse(t);
        return {t * s - base->eval(s), s, 1.0 / base->d2(s)};
    }
    std::shared_ptr<const impl> closed_conjugate() const override {
        return nullptr;  // conjugating a numeric conjugate stays numeric on purpose
    }
};

}  // namespace detail

inline young_function young_function::power_law(double p) {
    if (!(p > 2.0) || !std::isfinite(p))
        throw std::invalid_argument("power_law: exponent must lie in (2, inf), got " +
                                    std::to_string(p));
    return young_function(std::make_shared<detail::power_impl>(p));
}

inline young_function young_function::zygmund_log(double r) {
    if (!(r > 2.0) || !std::isfinite(r))
        throw std::invalid_argument("zygmund_log: exponent must lie in (2, inf), got " +
                                    std::to_string(r));
    return young_function(std::make_shared<detail::zygmund_impl>(r));
}

inline young_function young_function::power_sum(double p, double r, double eps) {
    if (!(r > 2.0) || !(p > r) || !std::isfinite(p))
        throw std::invalid_argument("power_sum: exponents must satisfy 2 < r < p");
    if (!(eps > 0.0) || !(eps <= 1.0))
        throw std::invalid_argument("power_sum: eps must lie in (0, 1], got " +
                                    std::to_string(eps));
    return young_function(std::make_shared<detail::power_sum_impl>(p, r, eps));
}

inline young_function young_function::dual_power_sum(double q, double r) {
    if (!(q > 1.0) || !(r > q) || !(r < 2.0))
        throw std::invalid_argument("dual_power_sum: exponents must satisfy 1 < q < r < 2");
    return young_function(std::make_shared<detail::dual_power_sum_impl>(q, r));
}

/// Legendre conjugate.  Uses the closed form when the family has one
/// (power:p -> power:p/(p-1)), otherwise builds the numeric conjugate.
inline young_function conjugate(const young_function& f) {
    if (auto c = f.implementation().closed_conjugate()) return young_function(std::move(c));
    return young_function(std::make_shared<detail::numeric_conjugate_impl>(f.share()));
}

/// A complementary pair arranged with the phi side first (the one whose
/// characteristic quantities satisfy 2 <= m <= M).
struct conjugate_pair {
    young_function phi;
    young_function psi;
};

inline conjugate_pair make_conjugate_pair(const young_function& f) {
    if (f.side() == young_side::phi) return {f, conjugate(f)};
    return {conjugate(f), f};
}

// ---------------------------------------------------------------------------
// Extremum scans of ratio functions on a log grid
// ---------------------------------------------------------------------------

struct scan_options {
    double lo = 1e-6;
    double hi = 1e6;
    int points = 10000;
    // When the extremum sits on the window boundary the window is extended in
    // decade steps (points_per_decade samples each) until the extremal value
    // stabilizes or the cap is reached.
    double cap_lo = 1e-14;
    double cap_hi = 1e14;
    int points_per_decade = 100;
};

struct scan_extremum {
    double arg = 0.0;
    double value = 0.0;
    bool at_cap = false;  // still improving when the hard cap stopped the extension
};

namespace detail {

inline scan_extremum scan_log_extremum(const std::function<double(double)>& f, bool maximize,
                                       const scan_options& opt) {
    auto better = [&](double a, double b) { return maximize ? a > b : a < b; };

    double llo = std::log(opt.lo), lhi = std::log(opt.hi);
    int n = std::max(opt.points, 3);
    double best_arg = opt.lo, best_val = f(opt.lo);
    double lbest = llo;
    auto consider = [&](double ls) {
        double s = std::exp(ls);
        double v = f(s);
        if (better(v, best_val)) {
            best_val = v;
            best_arg = s;
            lbest = ls;
        }
    };
    for (int i = 1; i < n; ++i) consider(llo + (lhi - llo) * i / (n - 1));

    const double lstep = (lhi - llo) / (n - 1);
    double lcap_lo = std::log(opt.cap_lo), lcap_hi = std::log(opt.cap_hi);

    // extend across decades while the boundary keeps winning
    const double ldec = std::log(10.0);
    bool at_cap = false;
    for (int side = 0; side < 2; ++side) {
        bool low_side = (side == 0);
        double edge = low_side ? llo : lhi;
        if (std::abs(lbest - edge) > lstep * 1.5) continue;
        double cursor = edge;
        while (true) {
            double prev_val = best_val;
            double next = low_side ? cursor - ldec : cursor + ldec;
            if (low_side ? next < lcap_lo - 1e-12 : next > lcap_hi + 1e-12) {
                // would cross the cap: sample up to the cap itself, then stop
                next = low_side ? lcap_lo : lcap_hi;
                if (std::abs(next - cursor) > 1e-12) {
                    for (int i = 1; i <= opt.points_per_decade; ++i)
                        consider(cursor + (next - cursor) * i / opt.points_per_decade);
                }
                if (better(best_val, prev_val) &&
                    std::abs(best_val - prev_val) > 1e-12 * std::abs(best_val))
                    at_cap = true;
                break;
            }
            for (int i = 1; i <= opt.points_per_decade; ++i)
                consider(cursor + (next - cursor) * i / opt.points_per_decade);
            cursor = next;
            bool improved = better(best_val, prev_val) &&
                            std::abs(best_val - prev_val) > 1e-12 * std::abs(best_val);
            if (!improved) break;
        }
    }

    // local ternary refinement around the best sample (log coordinates)
    double width = lstep;
    double a = std::max(lbest - width, lcap_lo), b = std::min(lbest + width, lcap_hi);
    for (int iter = 0; iter < 200 && (b - a) > 1e-13; ++iter) {
        double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
        double f1 = f(std::exp(m1)), f2 = f(std::exp(m2));
        if (better(f1, f2))
            b = m2;
        else
            a = m1;
    }
    double lm = 0.5 * (a + b);
    consider(lm);

    return {best_arg, best_val, at_cap};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Characteristic quantities
// ---------------------------------------------------------------------------

/// The four growth quantities of the phi side,
///   m  = inf s phi'/phi,   M  = sup s phi'/phi,
///   mt = inf s phi''/phi', Mt = sup s phi''/phi',
/// together with the induced exponent p = Mt + 1 and the embedding constant
///   D = max{1, M/mt} * sqrt(mt/Mt * (Mt-1)/(mt-1)).
struct char_quantities {
    double m = 0, M = 0, mt = 0, Mt = 0;
    double p = 0;
    double D = 0;
    scan_extremum m_scan, M_scan, mt_scan, Mt_scan;
};

inline char_quantities compute_char_quantities(const conjugate_pair& pair,
                                               const scan_options& opt = {}) {
    const young_function& phi = pair.phi;
    auto ratio1 = [&](double s) {
        auto [v, d, dd] = phi.eval_all(s);
        (void)dd;
        return s * d / v;
    };
    auto ratio2 = [&](double s) {
        auto [v, d, dd] = phi.eval_all(s);
        (void)v;
        return s * dd / d;
    };

    char_quantities q;
    q.m_scan = detail::scan_log_extremum(ratio1, false, opt);
    q.M_scan = detail::scan_log_extremum(ratio1, true, opt);
    q.mt_scan = detail::scan_log_extremum(ratio2, false, opt);
    q.Mt_scan = detail::scan_log_extremum(ratio2, true, opt);
    q.m = q.m_scan.value;
    q.M = q.M_scan.value;
    q.mt = q.mt_scan.value;
    q.Mt = q.Mt_scan.value;
    q.p = q.Mt + 1.0;
    q.D = std::max(1.0, q.M / q.mt) * std::sqrt(q.mt / q.Mt * (q.Mt - 1.0) / (q.mt - 1.0));
    return q;
}

/// Duality identities between the psi-side ratio scans and phi-side ratio
/// extrema.  Under the slope bijection t = phi'(s) (equivalently s = psi'(t))
/// the pointwise identities
///   t psi'(t) / psi(t)   = r1(s) / (r1(s) - 1),   r1(s) = s phi'(s)/phi(s),
///   t psi''(t) / psi'(t) = 1 / r2(s),             r2(s) = s phi''(s)/phi'(s),
/// turn psi-side window extrema into transforms of phi-side extrema over the
/// matched preimage window.  On wide windows the predictions reduce to
/// M/(M-1), m/(m-1), 1/Mt, 1/mt.  Numeric evaluators are not scanned below
/// 1e-8 (root-solve noise); the phi-side prediction window is matched to that
/// truncation through the slope map, so weights whose ratios are still
/// drifting toward their limits near the floor stay comparable at tight
/// tolerances.
struct dual_quantities_report {
    double inf_ratio1 = 0, sup_ratio1 = 0, inf_ratio2 = 0, sup_ratio2 = 0;
    double pred_inf_ratio1 = 0, pred_sup_ratio1 = 0, pred_inf_ratio2 = 0, pred_sup_ratio2 = 0;
    double max_abs_error = 0;
    double window_lo_used = 0;  // lower edge of the psi-side scan window
    bool numeric_side = false;
};

inline dual_quantities_report verify_dual_quantities(const conjugate_pair& pair,
                                                     const char_quantities& /*global*/,
                                                     scan_options opt = {}) {
    const young_function& phi = pair.phi;
    const young_function& psi = pair.psi;
    dual_quantities_report rep;
    rep.numeric_side = psi.is_numeric() || phi.is_numeric();

    // Effective primal window: the scan caps, floored at 1e-8 when the phi
    // evaluator is numeric (root-solve noise below that).
    double s_lo = opt.cap_lo, s_hi = opt.cap_hi;
    if (phi.is_numeric()) s_lo = std::max(s_lo, 1e-8);
    // Its image under the slope map, with the same floor on the psi side...
    double t_lo = phi.d1(s_lo), t_hi = phi.d1(s_hi);
    if (psi.is_numeric()) t_lo = std::max(t_lo, 1e-8);
    // ...and the exact preimage of the (possibly truncated) image window.
    double sp_lo = psi.d1(t_lo), sp_hi = psi.d1(t_hi);
    rep.window_lo_used = t_lo;

    // Pin base window = caps on both sides so decade extension cannot move
    // either scan off its partner's window.
    scan_options dual = opt;
    dual.lo = dual.cap_lo = t_lo;
    dual.hi = dual.cap_hi = t_hi;
    scan_options primal = opt;
    primal.lo = primal.cap_lo = sp_lo;
    primal.hi = primal.cap_hi = sp_hi;

    auto dual_ratio1 = [&](double t) {
        auto [v, d, dd] = psi.eval_all(t);
        (void)dd;
        return t * d / v;
    };
    auto dual_ratio2 = [&](double t) {
        auto [v, d, dd] = psi.eval_all(t);
        (void)v;
        return t * dd / d;
    };
    rep.inf_ratio1 = detail::scan_log_extremum(dual_ratio1, false, dual).value;
    rep.sup_ratio1 = detail::scan_log_extremum(dual_ratio1, true, dual).value;
    rep.inf_ratio2 = detail::scan_log_extremum(dual_ratio2, false, dual).value;
    rep.sup_ratio2 = detail::scan_log_extremum(dual_ratio2, true, dual).value;

    auto primal_ratio1 = [&](double s) {
        auto [v, d, dd] = phi.eval_all(s);
        (void)dd;
        return s * d / v;
    };
    auto primal_ratio2 = [&](double s) {
        auto [v, d, dd] = phi.eval_all(s);
        (void)v;
        return s * dd / d;
    };
    double m_w = detail::scan_log_extremum(primal_ratio1, false, primal).value;
    double M_w = detail::scan_log_extremum(primal_ratio1, true, primal).value;
    double mt_w = detail::scan_log_extremum(primal_ratio2, false, primal).value;
    double Mt_w = detail::scan_log_extremum(primal_ratio2, true, primal).value;

    rep.pred_inf_ratio1 = M_w / (M_w - 1.0);
    rep.pred_sup_ratio1 = m_w / (m_w - 1.0);
    rep.pred_inf_ratio2 = 1.0 / Mt_w;
    rep.pred_sup_ratio2 = 1.0 / mt_w;
    rep.max_abs_error = std::max(
        std::max(std::abs(rep.inf_ratio1 - rep.pred_inf_ratio1),
                 std::abs(rep.sup_ratio1 - rep.pred_sup_ratio1)),
        std::max(std::abs(rep.inf_ratio2 - rep.pred_inf_ratio2),
                 std::abs(rep.sup_ratio2 - rep.pred_sup_ratio2)));
    return rep;
}

// ---------------------------------------------------------------------------
// Auxiliary integrals I(t) = int_0^t phi'(s)/s^2 ds and
//                     J(t) = int_0^t 1/psi'(s) ds
// ---------------------------------------------------------------------------

/// Cumulative evaluators for the two auxiliary integrals.  Values are stored
/// at quarter-decade knots; the head [0, t0] below the lowest knot is replaced
/// by the midpoint of its two-sided comparison bounds
///   phi'(t)/((Mt-1) t) <= I(t) <= phi'(t)/((mt-1) t),
///   (Mt/(Mt-1)) t/psi'(t) <= J(t) <= (mt/(mt-1)) t/psi'(t),
/// whose half-width is reported as the error bound.  Evaluation between knots
/// adds a fixed-node Gauss-Legendre piece, so both maps are smooth between
/// knots (finite differences across them are stable).
class aux_integrals {
public:
    aux_integrals(const conjugate_pair& pair, const char_quantities& q)
        : phi_(pair.phi), psi_(pair.psi), mt_(q.mt), Mt_(q.Mt) {
        closed_I_ = [this](double t) { return phi_.implementation().closed_flux_integral(t); };
        closed_J_ = [this](double t) {
            return psi_.implementation().closed_inverse_slope_integral(t);
        };
        if (!closed_I_(1.0).has_value()) build(Icum_, [this](double s) { return flux_integrand(s); },
                                               true);
        if (!closed_J_(1.0).has_value())
            build(Jcum_, [this](double s) { return slope_integrand(s); }, false);
    }

    double I(double t) const {
        check_arg(t);
        if (auto c = closed_I_(t)) return *c;
        return lookup(Icum_, t, [this](double s) { return flux_integrand(s); }, true);
    }
    double J(double t) const {
        check_arg(t);
        if (auto c = closed_J_(t)) return *c;
        return lookup(Jcum_, t, [this](double s) { return slope_integrand(s); }, false);
    }

    /// Bound on the absolute error of I(t) (0 for closed forms).
    double I_error_bound(double t) const {
        if (closed_I_(std::max(t, 1e-300)).has_value() || t <= 0.0) return 0.0;
        double tf = std::min(t, knot(0));
        return 0.5 * (1.0 / (mt_ - 1.0) - 1.0 / (Mt_ - 1.0)) * phi_.d1(tf) / tf;
    }
    double J_error_bound(double t) const {
        if (closed_J_(std::max(t, 1e-300)).has_value() || t <= 0.0) return 0.0;
        double tf = std::min(t, knot(0));
        return 0.5 * (mt_ / (mt_ - 1.0) - Mt_ / (Mt_ - 1.0)) * tf / psi_.d1(tf);
    }

    // Two-sided comparison bounds, exposed for the sandwich tests.
    double I_lower(double t) const { return phi_.d1(t) / ((Mt_ - 1.0) * t); }
    double I_upper(double t) const { return phi_.d1(t) / ((mt_ - 1.0) * t); }
    double J_lower(double t) const { return Mt_ / (Mt_ - 1.0) * t / psi_.d1(t); }
    double J_upper(double t) const { return mt_ / (mt_ - 1.0) * t / psi_.d1(t); }

private:
    static constexpr double log10_lo = -30.0;
    static constexpr double log10_hi = 15.0;
    static constexpr int per_decade = 4;
    static constexpr int n_knots =
        static_cast<int>((log10_hi - log10_lo) * per_decade) + 1;  // 181
    static constexpr int gl_order = 12;

    static double knot(int k) { return std::pow(10.0, log10_lo + double(k) / per_decade); }

    static void check_arg(double t) {
        if (!(t >= 0.0) || !std::isfinite(t))
            throw std::invalid_argument("aux_integrals: argument must be finite and >= 0");
    }

    double flux_integrand(double s) const { return phi_.d1(s) / (s * s); }
    double slope_integrand(double s) const { return 1.0 / psi_.d1(s); }

    template <typename F>
    void build(std::vector<double>& cum, F&& integrand, bool is_I) {
        cum.resize(n_knots);
        double t0 = knot(0);
        cum[0] = is_I ? 0.5 * (I_lower(t0) + I_upper(t0)) : 0.5 * (J_lower(t0) + J_upper(t0));
        for (int k = 1; k < n_knots; ++k)
            cum[k] = cum[k - 1] + integrate_gl(integrand, knot(k - 1), knot(k), gl_order);
    }

    template <typename F>
    double lookup(const std::vector<double>& cum, double t, F&& integrand, bool is_I) const {
        if (t == 0.0) return 0.0;
        if (t <= knot(0))
            return is_I ? 0.5 * (I_lower(t) + I_upper(t)) : 0.5 * (J_lower(t) + J_upper(t));
        double pos = (std::log10(t) - log10_lo) * per_decade;
        int k = std::min(static_cast<int>(pos), n_knots - 1);
        return cum[k] + integrate_gl(integrand, knot(k), t, gl_order);
    }

    young_function phi_, psi_;
    double mt_, Mt_;
    std::function<std::optional<double>(double)> closed_I_, closed_J_;
    std::vector<double> Icum_, Jcum_;
};

// ---------------------------------------------------------------------------
// Luxemburg norm
// ---------------------------------------------------------------------------

/// Luxemburg norm of the discrete function with the given |values| and cell
/// volume: the least alpha with sum_i Phi(|f_i|/alpha) * cell_volume <= 1,
/// found by bisection to relative width 1e-10.
inline double luxemburg_norm(const young_function& phi, const std::vector<double>& abs_values,
                             double cell_volume) {
    if (!(cell_volume > 0.0))
        throw std::invalid_argument("luxemburg_norm: cell volume must be positive");
    double vmax = 0.0;
    for (double a : abs_values) {
        if (!(a >= 0.0) || !std::isfinite(a))
            throw std::invalid_argument("luxemburg_norm: values must be finite and >= 0");
        vmax = std::max(vmax, a);
    }
    if (vmax == 0.0) return 0.0;

    auto modular = [&](double alpha) {
        double s = 0.0;
        for (double a : abs_values) s += phi.eval(a / alpha);
        return s * cell_volume;
    };

    double hi = vmax;
    for (int i = 0; modular(hi) > 1.0; ++i) {
        if (i > 2000) throw std::runtime_error("luxemburg_norm: bracket expansion failed");
        hi *= 2.0;
    }
    double lo = hi;
    for (int i = 0; modular(lo) <= 1.0; ++i) {
        if (i > 2000 || lo < 1e-290) { lo = 0.0; break; }
        lo *= 0.5;
    }
    while (hi - lo > 1e-10 * hi) {
        double mid = 0.5 * (lo + hi);
        if (modular(mid) <= 1.0)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Doubling constants and the upper-exponent integral probe
// ---------------------------------------------------------------------------

struct doubling_report {
    double K_phi = 0;  // sup phi(2s)/phi(s)
    double K_psi = 0;  // sup psi(2s)/psi(s)
    double bound_phi = 0;  // 2^M
    double bound_psi = 0;  // 2^(m/(m-1)) <= 4
};

inline doubling_report doubling_constants(const conjugate_pair& pair, const char_quantities& q,
                                          const scan_options& opt = {}) {
    doubling_report rep;
    auto ratio_phi = [&](double s) { return pair.phi.eval(2.0 * s) / pair.phi.eval(s); };
    auto ratio_psi = [&](double s) { return pair.psi.eval(2.0 * s) / pair.psi.eval(s); };
    scan_options o = opt;
    if (pair.psi.is_numeric() || pair.phi.is_numeric()) o.cap_lo = std::max(o.cap_lo, 1e-8);
    rep.K_phi = detail::scan_log_extremum(ratio_phi, true, o).value;
    rep.K_psi = detail::scan_log_extremum(ratio_psi, true, o).value;
    rep.bound_phi = std::pow(2.0, q.M);
    rep.bound_psi = std::pow(2.0, q.m / (q.m - 1.0));
    return rep;
}

enum class tail_class { convergent, divergent, indeterminate };

/// Dyadic-block probe of int_1^inf phi(s)/s^(p+1) ds.  Blocks
/// a_k = int over [2^k, 2^(k+1)] are classified by their tail ratios.
struct tail_probe_report {
    tail_class verdict = tail_class::indeterminate;
    std::vector<double> blocks;
    double tail_ratio_min = 0, tail_ratio_max = 0;
};

inline tail_probe_report cianchi_tail_probe(const young_function& phi, double p,
                                            int n_blocks = 45) {
    if (!(p > 1.0)) throw std::invalid_argument("cianchi_tail_probe: p must be > 1");
    tail_probe_report rep;
    auto integrand = [&](double s) { return phi.eval(s) / std::pow(s, p + 1.0); };
    for (int k = 0; k < n_blocks; ++k) {
        double a = std::pow(2.0, k), b = 2.0 * a;
        rep.blocks.push_back(integrate_gl(integrand, a, b, 24));
    }
    const int tail = 8;
    rep.tail_ratio_min = std::numeric_limits<double>::infinity();
    rep.tail_ratio_max = 0.0;
    for (int k = n_blocks - tail - 1; k + 1 < n_blocks; ++k) {
        double r = rep.blocks[k + 1] / rep.blocks[k];
        rep.tail_ratio_min = std::min(rep.tail_ratio_min, r);
        rep.tail_ratio_max = std::max(rep.tail_ratio_max, r);
    }
    if (rep.tail_ratio_max <= 0.995)
        rep.verdict = tail_class::convergent;
    else if (rep.tail_ratio_min >= 0.9999)
        rep.verdict = tail_class::divergent;
    else
        rep.verdict = tail_class::indeterminate;
    return rep;
}

}  // namespace orlicz
