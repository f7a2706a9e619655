#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "orlicz/common.hpp"

namespace orlicz {

/// Scalar field on C^2, used for finite-difference cross checks.
using scalar_field = std::function<double(complexd, complexd)>;

// ---------------------------------------------------------------------------
// Contraction of a 4x4 real Hessian with a matrix pair
// ---------------------------------------------------------------------------

/// Generalized Hessian form
///   H[(u,v); (zeta, eta)] = < (Hess (x) I_d) w, M w >
/// where Hess is the 4x4 real Hessian in (Re u, Im u, Re v, Im v), w stacks
/// [Re zeta; Im zeta; Re eta; Im eta] in (R^d)^4, and M w realizes
/// [Re(A zeta); Im(A zeta); Re(B eta); Im(B eta)].
inline double generalized_hessian(const Eigen::Matrix4d& hess, const Eigen::MatrixXcd& A,
                                  const Eigen::MatrixXcd& B, const Eigen::VectorXcd& zeta,
                                  const Eigen::VectorXcd& eta) {
    const auto d = zeta.size();
    if (A.rows() != d || B.rows() != eta.size() || eta.size() != d)
        throw std::invalid_argument("generalized_hessian: dimension mismatch");

    Eigen::MatrixXd w(d, 4);
    w.col(0) = zeta.real();
    w.col(1) = zeta.imag();
    w.col(2) = eta.real();
    w.col(3) = eta.imag();

    Eigen::VectorXcd Az = A * zeta, Be = B * eta;
    Eigen::MatrixXd mw(d, 4);
    mw.col(0) = Az.real();
    mw.col(1) = Az.imag();
    mw.col(2) = Be.real();
    mw.col(3) = Be.imag();

    // sum_{i,j} hess(i,j) <w_j, mw_i>_{R^d}
    double out = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out += hess(i, j) * w.col(j).dot(mw.col(i));
    return out;
}

/// Phase-twisted variant: the same form evaluated at (u/|u|) zeta, (v/|v|) eta.
inline double generalized_hessian_tilde(const Eigen::Matrix4d& hess, const Eigen::MatrixXcd& A,
                                        const Eigen::MatrixXcd& B, complexd u, complexd v,
                                        const Eigen::VectorXcd& zeta,
                                        const Eigen::VectorXcd& eta) {
    double au = std::abs(u), av = std::abs(v);
    if (au == 0.0 || av == 0.0)
        throw pole_error("generalized_hessian_tilde: u and v must be nonzero");
    return generalized_hessian(hess, A, B, (u / au) * zeta, (v / av) * eta);
}

// ---------------------------------------------------------------------------
// 4x4 Hessians of radially structured functions
// ---------------------------------------------------------------------------

/// Hessian in (Re u, Im u, Re v, Im v) of F(u, v) = G(|u|, |v|) given the
/// partials of G at (|u|, |v|):  g1 = dG/dt1, g2 = dG/dt2, g11, g12, g22.
/// Requires u, v off the coordinate planes.
inline Eigen::Matrix4d hessian4_from_radial(double g1, double g2, double g11, double g12,
                                            double g22, complexd u, complexd v) {
    double au = std::abs(u), av = std::abs(v);
    if (au == 0.0 || av == 0.0)
        throw pole_error("hessian4_from_radial: u and v must be nonzero");
    double nu1 = u.real() / au, nu2 = u.imag() / au;
    double mv1 = v.real() / av, mv2 = v.imag() / av;

    Eigen::Matrix4d H;
    // u block: g11 n (x) n + (g1/|u|) (I - n (x) n)
    H(0, 0) = g11 * nu1 * nu1 + g1 / au * nu2 * nu2;
    H(1, 1) = g11 * nu2 * nu2 + g1 / au * nu1 * nu1;
    H(0, 1) = H(1, 0) = (g11 - g1 / au) * nu1 * nu2;
    // v block
    H(2, 2) = g22 * mv1 * mv1 + g2 / av * mv2 * mv2;
    H(3, 3) = g22 * mv2 * mv2 + g2 / av * mv1 * mv1;
    H(2, 3) = H(3, 2) = (g22 - g2 / av) * mv1 * mv2;
    // cross block: g12 n (x) m
    H(0, 2) = H(2, 0) = g12 * nu1 * mv1;
    H(0, 3) = H(3, 0) = g12 * nu1 * mv2;
    H(1, 2) = H(2, 1) = g12 * nu2 * mv1;
    H(1, 3) = H(3, 1) = g12 * nu2 * mv2;
    return H;
}

// ---------------------------------------------------------------------------
// Closed forms of the twisted Hessian for the two structural shapes
// ---------------------------------------------------------------------------

namespace detail {

/// Re< A zeta, a zeta + b conj(zeta) > for real scalars a, b.
inline double re_pairing(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& zeta, double a,
                         double b) {
    Eigen::VectorXcd Az = A * zeta;
    // < Az, zeta > = sum (Az)_j conj(zeta_j);  < Az, conj(zeta) > = sum (Az)_j zeta_j
    complexd herm = 0.0, bil = 0.0;
    for (Eigen::Index j = 0; j < zeta.size(); ++j) {
        herm += Az[j] * std::conj(zeta[j]);
        bil += Az[j] * zeta[j];
    }
    return a * herm.real() + b * bil.real();
}

}  // namespace detail

/// Twisted Hessian of the sum shape P(|u|) + Q(|v|):
///   Re< A zeta, (P'' + P'/|u|)/2 zeta + (P'' - P'/|u|)/2 conj(zeta) >
/// + Re< B eta,  (Q'' + Q'/|v|)/2 eta  + (Q'' - Q'/|v|)/2 conj(eta) >.
inline double closed_tilde_sum_shape(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                     complexd u, complexd v, const Eigen::VectorXcd& zeta,
                                     const Eigen::VectorXcd& eta, double P1, double P2, double Q1,
                                     double Q2) {
    double au = std::abs(u), av = std::abs(v);
    if (au == 0.0 || av == 0.0)
        throw pole_error("closed_tilde_sum_shape: u and v must be nonzero");
    return detail::re_pairing(A, zeta, 0.5 * (P2 + P1 / au), 0.5 * (P2 - P1 / au)) +
           detail::re_pairing(B, eta, 0.5 * (Q2 + Q1 / av), 0.5 * (Q2 - Q1 / av));
}

/// Twisted Hessian of the product shape |u|^2 R(|v|):
///   Re< A zeta, 2 R zeta + 2 |u| R' Re(eta) >
/// + Re< B eta,  2 |u| R' Re(zeta) + |u|^2 R'' Re(eta) + i |u|^2 (R'/|v|) Im(eta) >
/// where Re/Im of a vector are taken componentwise.
inline double closed_tilde_product_shape(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                         complexd u, complexd v, const Eigen::VectorXcd& zeta,
                                         const Eigen::VectorXcd& eta, double R0, double R1,
                                         double R2) {
    double au = std::abs(u), av = std::abs(v);
    if (au == 0.0 || av == 0.0)
        throw pole_error("closed_tilde_product_shape: u and v must be nonzero");

    Eigen::VectorXcd re_eta = eta.real().cast<complexd>();
    Eigen::VectorXcd im_eta = eta.imag().cast<complexd>();
    Eigen::VectorXcd re_zeta = zeta.real().cast<complexd>();

    auto re_inner = [](const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
        complexd s = 0.0;
        for (Eigen::Index j = 0; j < x.size(); ++j) s += x[j] * std::conj(y[j]);
        return s.real();
    };

    Eigen::VectorXcd Az = A * zeta;
    Eigen::VectorXcd target_A = 2.0 * R0 * zeta + 2.0 * au * R1 * re_eta;
    double partA = re_inner(Az, target_A);

    Eigen::VectorXcd Be = B * eta;
    Eigen::VectorXcd target_B = 2.0 * au * R1 * re_zeta + au * au * R2 * re_eta +
                                complexd(0.0, 1.0) * au * au * (R1 / av) * im_eta;
    double partB = re_inner(Be, target_B);
    return partA + partB;
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

/// Central-difference 4x4 Hessian of a scalar field on C^2.  Steps scale with
/// the moduli (eps^(1/4)-balanced for second differences).
inline Eigen::Matrix4d fd_hessian4(const scalar_field& F, complexd u, complexd v,
                                   double rel_step = 1e-4) {
    const double hu = rel_step * std::max(std::abs(u), 1e-30);
    const double hv = rel_step * std::max(std::abs(v), 1e-30);
    const double h[4] = {hu, hu, hv, hv};

    auto shift = [&](int k, double amount, complexd& uu, complexd& vv) {
        switch (k) {
            case 0: uu += amount; break;
            case 1: uu += complexd(0.0, amount); break;
            case 2: vv += amount; break;
            default: vv += complexd(0.0, amount); break;
        }
    };
    auto at = [&](int k, double a, int l, double b) {
        complexd uu = u, vv = v;
        shift(k, a, uu, vv);
        shift(l, b, uu, vv);
        return F(uu, vv);
    };

    Eigen::Matrix4d H;
    const double f0 = F(u, v);
    for (int k = 0; k < 4; ++k) {
        H(k, k) = (at(k, h[k], k, 0.0) - 2.0 * f0 + at(k, -h[k], k, 0.0)) / (h[k] * h[k]);
        for (int l = k + 1; l < 4; ++l) {
            double v1 = at(k, h[k], l, h[l]), v2 = at(k, h[k], l, -h[l]);
            double v3 = at(k, -h[k], l, h[l]), v4 = at(k, -h[k], l, -h[l]);
            H(k, l) = H(l, k) = (v1 - v2 - v3 + v4) / (4.0 * h[k] * h[l]);
        }
    }
    return H;
}

/// Central-difference Wirtinger gradient (d/d conj(u), d/d conj(v)) of a real
/// scalar field: 0.5 (d/dx + i d/dy) in each complex slot.
inline std::pair<complexd, complexd> fd_wirtinger_gradient(const scalar_field& F, complexd u,
                                                           complexd v, double rel_step = 1e-6) {
    const double hu = rel_step * std::max(std::abs(u), 1.0);
    const double hv = rel_step * std::max(std::abs(v), 1.0);
    double dxu = (F(u + hu, v) - F(u - hu, v)) / (2.0 * hu);
    double dyu = (F(u + complexd(0, hu), v) - F(u - complexd(0, hu), v)) / (2.0 * hu);
    double dxv = (F(u, v + hv) - F(u, v - hv)) / (2.0 * hv);
    double dyv = (F(u, v + complexd(0, hv)) - F(u, v - complexd(0, hv))) / (2.0 * hv);
    return {0.5 * complexd(dxu, dyu), 0.5 * complexd(dxv, dyv)};
}

}  // namespace orlicz
