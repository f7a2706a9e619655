#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "orlicz/common.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/report.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

/// Measurable complex matrix field on a grid; a single stored value means a
/// constant field.  Essential infima/suprema become minima/maxima over nodes.
class matrix_field {
public:
    matrix_field(int d, std::vector<Eigen::MatrixXcd> values, std::string name = "matrix")
        : d_(d), values_(std::move(values)), name_(std::move(name)) {
        if (d_ < 1) throw std::invalid_argument("matrix_field: dimension must be >= 1");
        if (values_.empty()) throw std::invalid_argument("matrix_field: no values");
        for (const auto& m : values_)
            if (m.rows() != d_ || m.cols() != d_)
                throw std::invalid_argument("matrix_field: every value must be d x d");
    }

    static matrix_field constant(Eigen::MatrixXcd m, std::string name = "constant") {
        int d = static_cast<int>(m.rows());
        return matrix_field(d, {std::move(m)}, std::move(name));
    }
    static matrix_field identity(int d) {
        return constant(Eigen::MatrixXcd::Identity(d, d), "identity:" + std::to_string(d));
    }
    /// e^{i phi} I_d
    static matrix_field rotation(double phi, int d) {
        std::ostringstream os;
        os << "rotation:" << phi << ":" << d;
        return constant(complexd(std::cos(phi), std::sin(phi)) *
                            Eigen::MatrixXcd::Identity(d, d),
                        os.str());
    }

    int dim() const { return d_; }
    bool is_constant() const { return values_.size() == 1; }
    std::size_t count() const { return values_.size(); }
    const Eigen::MatrixXcd& at(std::size_t i) const {
        return values_[is_constant() ? 0 : i];
    }
    const std::string& name() const { return name_; }

    /// true when Im A is symmetric at every node (tolerance relative to |A|)
    bool imag_symmetric(double tol = 1e-12) const {
        for (const auto& m : values_) {
            Eigen::MatrixXd im = m.imag();
            double scale = std::max(1e-300, m.cwiseAbs().maxCoeff());
            if ((im - im.transpose()).cwiseAbs().maxCoeff() > tol * scale) return false;
        }
        return true;
    }

private:
    int d_;
    std::vector<Eigen::MatrixXcd> values_;
    std::string name_;
};

// ---------------------------------------------------------------------------
// Ellipticity constants
// ---------------------------------------------------------------------------

/// lambda(A): least eigenvalue of the Hermitian part, minimized over nodes.
inline double lambda_min(const matrix_field& A) {
    double out = std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    for (std::size_t i = 0; i < A.count(); ++i) {
        const auto& m = A.at(i);
        es.compute(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
        out = std::min(out, es.eigenvalues().minCoeff());
    }
    return out;
}

/// Lambda(A): largest singular value, maximized over nodes.
inline double lambda_max_norm(const matrix_field& A) {
    double out = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    for (std::size_t i = 0; i < A.count(); ++i) {
        const auto& m = A.at(i);
        es.compute(m.adjoint() * m, Eigen::EigenvaluesOnly);
        out = std::max(out, std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())));
    }
    return out;
}

namespace detail {

/// min over unit xi in C^d of Re< A xi, xi + mu * conj(xi) >, computed exactly
/// as the least eigenvalue of the real symmetric 2d x 2d form in (Re xi, Im xi).
inline double accretivity_form_min(const Eigen::MatrixXcd& A, double mu) {
    const int d = static_cast<int>(A.rows());
    Eigen::MatrixXd Ar = A.real(), Ai = A.imag();
    Eigen::MatrixXd sym = 0.5 * (Ar + Ar.transpose());
    // cross block of the quadratic form: alpha^T C beta with
    // C = (Ai^T - Ai) - mu (Ai + Ai^T)
    Eigen::MatrixXd C = (Ai.transpose() - Ai) - mu * (Ai + Ai.transpose());
    Eigen::MatrixXd S(2 * d, 2 * d);
    S.topLeftCorner(d, d) = (1.0 + mu) * sym;
    S.bottomRightCorner(d, d) = (1.0 - mu) * sym;
    S.topRightCorner(d, d) = 0.5 * C;
    S.bottomLeftCorner(d, d) = 0.5 * C.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

}  // namespace detail

/// Delta_p(A): nodewise minimum over unit xi of Re< A xi, xi + |1-2/p| conj(xi) >.
inline double delta_p(const matrix_field& A, double p) {
    if (!(p >= 2.0))
        throw std::invalid_argument("delta_p: exponent must lie in [2, inf), got " +
                                    std::to_string(p));
    const double mu = 1.0 - 2.0 / p;
    double out = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < A.count(); ++i)
        out = std::min(out, detail::accretivity_form_min(A.at(i), mu));
    return out;
}

struct delta_phi_result {
    double value = 0.0;
    double coefficient = 0.0;  // attained sup of (s phi'' - phi')/(s phi'' + phi')
    double arg_s = 0.0;
    bool at_cap = false;
};

/// Delta_Phi(A): the Young-function generalization where |1-2/p| is replaced
/// by the coefficient c(s) = (s phi''(s) - phi'(s))/(s phi''(s) + phi'(s)).
/// Evaluated as an infimum over a log-grid of s of the accretivity forms,
/// sharpened by the refined extremal s of the curvature-ratio scan (the form
/// minimum is nonincreasing in the coefficient, so the extremal s decides).
inline delta_phi_result delta_phi(const matrix_field& A, const conjugate_pair& pair,
                                  const scan_options& opt = {}) {
    auto ratio2 = [&](double s) {
        auto [v, d1, d2] = pair.phi.eval_all(s);
        (void)v;
        return s * d2 / d1;
    };
    scan_extremum top = detail::scan_log_extremum(ratio2, true, opt);

    auto coeff = [](double rho) { return (rho - 1.0) / (rho + 1.0); };
    auto form_min = [&](double mu) {
        double out = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < A.count(); ++i)
            out = std::min(out, detail::accretivity_form_min(A.at(i), mu));
        return out;
    };

    delta_phi_result res;
    res.coefficient = coeff(top.value);
    res.arg_s = top.arg;
    res.at_cap = top.at_cap;
    res.value = form_min(res.coefficient);
    const int grid_points = 64;
    for (int i = 0; i < grid_points; ++i) {
        double ls = std::log(opt.lo) + (std::log(opt.hi) - std::log(opt.lo)) * i /
                                           (grid_points - 1.0);
        double v = form_min(coeff(ratio2(std::exp(ls))));
        if (v < res.value) res.value = v;
    }
    return res;
}

/// C_p(A, B) = max{Lambda} / (min{Delta_p} * min{lambda}); requires both
/// matrices to be p-elliptic and accretive.
inline double c_p_constant(const matrix_field& A, const matrix_field& B, double p) {
    double dA = delta_p(A, p), dB = delta_p(B, p);
    if (!(dA > 0.0))
        throw std::invalid_argument("c_p_constant: matrix '" + A.name() +
                                    "' is not p-elliptic at p = " + std::to_string(p) +
                                    " (delta_p = " + std::to_string(dA) + ")");
    if (!(dB > 0.0))
        throw std::invalid_argument("c_p_constant: matrix '" + B.name() +
                                    "' is not p-elliptic at p = " + std::to_string(p) +
                                    " (delta_p = " + std::to_string(dB) + ")");
    double lA = lambda_min(A), lB = lambda_min(B);
    if (!(std::min(lA, lB) > 0.0))
        throw std::invalid_argument("c_p_constant: matrix '" +
                                    (lA <= lB ? A.name() : B.name()) + "' is not accretive");
    return std::max(lambda_max_norm(A), lambda_max_norm(B)) / (std::min(dA, dB) * std::min(lA, lB));
}

/// The structural size parameter of the perturbed Bellman function:
///   delta = (mt-1)/mt * min{ Delta_p(A)/(8 Lambda(A)), Delta_p(B)/(4 Lambda(B)),
///                            lambda(A) Delta_p(B) / (100 max{Lambda(A)^2, Lambda(B)^2}) }
/// with p = Mt + 1.  Always <= (mt-1)/(100 mt).
inline double delta_param(const char_quantities& q, const matrix_field& A,
                          const matrix_field& B) {
    const double p = q.Mt + 1.0;
    double dA = delta_p(A, p), dB = delta_p(B, p);
    if (!(dA > 0.0) || !(dB > 0.0))
        throw std::invalid_argument("delta_param: both matrices must be p-elliptic at p = " +
                                    std::to_string(p));
    double LA = lambda_max_norm(A), LB = lambda_max_norm(B);
    double lA = lambda_min(A);
    double m3 = lA * dB / (100.0 * std::max(LA * LA, LB * LB));
    double val = std::min(dA / (8.0 * LA), std::min(dB / (4.0 * LB), m3));
    return (q.mt - 1.0) / q.mt * val;
}

// ---------------------------------------------------------------------------
// Dissipativity margin checks
// ---------------------------------------------------------------------------

struct cm_margin_result {
    double min_margin = std::numeric_limits<double>::infinity();
    long long samples = 0;
    double argmin_s = 0.0;
    std::size_t argmin_node = 0;
    std::vector<double> margins;  // one per sample, in draw order
};

namespace detail {

/// Shared sampler: margin(s, x, xi) = <Re A xi, xi> - kappa(s) |<Im A xi, xi>|
/// over real unit vectors xi, log-uniform s, and all nodes.
template <typename Kappa>
cm_margin_result cm_margins(const matrix_field& A, Kappa&& kappa, long long n_samples,
                            std::uint64_t seed) {
    if (!A.imag_symmetric())
        throw inapplicable_error("dissipativity check: Im '" + A.name() +
                                 "' must be symmetric at every node");
    cm_margin_result res;
    res.margins.reserve(static_cast<std::size_t>(n_samples));
    const int d = A.dim();
    for (long long i = 0; i < n_samples; ++i) {
        sample_rng rng(seed, static_cast<std::uint64_t>(i));
        double s = rng.log_uniform(1e-3, 1e3);
        Eigen::VectorXd xi(d);
        do {
            for (int j = 0; j < d; ++j) xi[j] = rng.normal();
        } while (xi.norm() < 1e-8);
        xi.normalize();
        double k = kappa(s);
        double sample_min = std::numeric_limits<double>::infinity();
        std::size_t node_arg = 0;
        for (std::size_t nd = 0; nd < A.count(); ++nd) {
            const auto& m = A.at(nd);
            double re = xi.dot(m.real() * xi);
            double im = xi.dot(m.imag() * xi);
            double margin = re - k * std::abs(im);
            if (margin < sample_min) {
                sample_min = margin;
                node_arg = nd;
            }
        }
        res.margins.push_back(sample_min);
        if (sample_min < res.min_margin) {
            res.min_margin = sample_min;
            res.argmin_s = s;
            res.argmin_node = node_arg;
        }
    }
    res.samples = n_samples;
    return res;
}

}  // namespace detail

/// Young-function dissipativity margin: kappa(s) = |phi''(s) - phi'(s)/s| /
/// (2 sqrt(phi'(s) phi''(s) / s)), normalized so the power-law case reduces to
/// the classical |p-2| / (2 sqrt(p-1)) coefficient at every s.
inline cm_margin_result cm_margin_young(const matrix_field& A, const young_function& phi,
                                        long long n_samples, std::uint64_t seed) {
    auto kappa = [&](double s) {
        auto [v, d1, d2] = phi.eval_all(s);
        (void)v;
        return std::abs(d2 - d1 / s) / (2.0 * std::sqrt(d1 * d2 / s));
    };
    return detail::cm_margins(A, kappa, n_samples, seed);
}

/// Classical power dissipativity margin with kappa = |p-2| / (2 sqrt(p-1)).
inline cm_margin_result cm_margin_power(const matrix_field& A, double p, long long n_samples,
                                        std::uint64_t seed) {
    const double k = std::abs(p - 2.0) / (2.0 * std::sqrt(p - 1.0));
    return detail::cm_margins(A, [k](double) { return k; }, n_samples, seed);
}

// ---------------------------------------------------------------------------
// Aggregate report
// ---------------------------------------------------------------------------

struct ellipticity_report {
    double lambda_A = 0, lambda_B = 0;
    double Lambda_A = 0, Lambda_B = 0;
    double delta_p_A = 0, delta_p_B = 0;
    double delta_phi_A = 0, delta_phi_B = 0;
    double p = 0;
    double c_p = 0;
    double delta = 0;
};

inline ellipticity_report make_ellipticity_report(const matrix_field& A, const matrix_field& B,
                                                  const conjugate_pair& pair,
                                                  const char_quantities& q) {
    ellipticity_report r;
    r.p = q.Mt + 1.0;
    r.lambda_A = lambda_min(A);
    r.lambda_B = lambda_min(B);
    r.Lambda_A = lambda_max_norm(A);
    r.Lambda_B = lambda_max_norm(B);
    r.delta_p_A = delta_p(A, r.p);
    r.delta_p_B = delta_p(B, r.p);
    r.delta_phi_A = delta_phi(A, pair).value;
    r.delta_phi_B = delta_phi(B, pair).value;
    r.c_p = c_p_constant(A, B, r.p);
    r.delta = delta_param(q, A, B);
    return r;
}

/// Deterministic random complex matrix with a guaranteed p-ellipticity margin
/// (used by the reference configuration).  Draws I + 0.15 W and re-draws with
/// a shifted stream until delta_p >= min_delta.
inline matrix_field make_random_elliptic(int d, std::uint64_t seed, double p,
                                         double min_delta = 0.05, std::string name = "") {
    for (std::uint64_t attempt = 0;; ++attempt) {
        sample_rng rng(seed, attempt);
        Eigen::MatrixXcd W(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                W(i, j) = complexd(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(d, d) + 0.15 * W;
        matrix_field f = matrix_field::constant(
            M, name.empty() ? "random-elliptic:" + std::to_string(seed) : name);
        if (delta_p(f, p) >= min_delta) return f;
        if (attempt > 1000)
            throw std::runtime_error("make_random_elliptic: no elliptic draw found");
    }
}

}  // namespace orlicz
