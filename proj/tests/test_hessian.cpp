#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "orlicz/ellipticity.hpp"
#include "orlicz/hessian.hpp"

namespace {

using orlicz::complexd;
using orlicz::fd_hessian4;
using orlicz::fd_wirtinger_gradient;
using orlicz::generalized_hessian;
using orlicz::generalized_hessian_tilde;
using orlicz::hessian4_from_radial;
using orlicz::scalar_field;

struct fixture {
    Eigen::MatrixXcd A, B;
    complexd u, v;
    Eigen::VectorXcd zeta, eta;

    fixture() {
        A = orlicz::make_random_elliptic(2, 5, 4.0).at(0);
        B = orlicz::matrix_field::rotation(0.2, 2).at(0);
        u = complexd(0.7, 0.3);
        v = complexd(-0.4, 1.1);
        zeta.resize(2);
        zeta << complexd(0.5, -0.2), complexd(1.1, 0.4);
        eta.resize(2);
        eta << complexd(-0.3, 0.8), complexd(0.6, -0.5);
    }
};

double max_rel_entry_error(const Eigen::Matrix4d& got, const Eigen::Matrix4d& want) {
    double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
    return (got - want).cwiseAbs().maxCoeff() / scale;
}

TEST(GeneralizedHessian, QuadraticModulusContractsToHermitianForm) {
    fixture f;
    Eigen::Matrix4d hess = Eigen::Matrix4d::Zero();
    hess(0, 0) = hess(1, 1) = 2.0;  // Hessian of |u|^2
    double got = generalized_hessian(hess, f.A, f.B, f.zeta, f.eta);
    double want = 2.0 * std::real(f.zeta.dot(f.A * f.zeta));
    EXPECT_NEAR(got, want, 1e-12 * std::abs(want));

    // unimodular twisting leaves a phase-invariant form unchanged
    double twisted = generalized_hessian_tilde(hess, f.A, f.B, f.u, f.v, f.zeta, f.eta);
    EXPECT_NEAR(twisted, want, 1e-12 * std::abs(want));
}

TEST(GeneralizedHessian, ScalarCaseIsTheRealQuadraticForm) {
    Eigen::Matrix4d hess;
    hess << 2, 1, 0, -1, 1, 3, 0.5, 0, 0, 0.5, 1, 0.25, -1, 0, 0.25, 4;
    Eigen::MatrixXcd one = Eigen::MatrixXcd::Identity(1, 1);
    Eigen::VectorXcd zeta(1), eta(1);
    zeta << complexd(0.3, -0.9);
    eta << complexd(1.2, 0.4);
    Eigen::Vector4d x(zeta[0].real(), zeta[0].imag(), eta[0].real(), eta[0].imag());
    double want = x.dot(hess * x);
    EXPECT_NEAR(generalized_hessian(hess, one, one, zeta, eta), want, 1e-14);
}

TEST(GeneralizedHessian, DimensionMismatchThrows) {
    fixture f;
    Eigen::VectorXcd short_eta(1);
    short_eta << complexd(1.0, 0.0);
    EXPECT_THROW(generalized_hessian(Eigen::Matrix4d::Identity(), f.A, f.B, f.zeta, short_eta),
                 std::invalid_argument);
}

TEST(FiniteDifferences, LinearFieldHasVanishingHessian) {
    scalar_field F = [](complexd u, complexd) { return u.real(); };
    Eigen::Matrix4d H = fd_hessian4(F, complexd(0.4, 0.2), complexd(1.0, -0.3));
    EXPECT_LT(H.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FiniteDifferences, WirtingerGradientOfKnownFields) {
    scalar_field F = [](complexd u, complexd) { return std::norm(u); };
    auto [gu, gv] = fd_wirtinger_gradient(F, complexd(0.7, 0.3), complexd(1.0, 0.0));
    EXPECT_NEAR(std::abs(gu - complexd(0.7, 0.3)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(gv), 0.0, 1e-10);

    scalar_field G = [](complexd u, complexd) { return u.real(); };
    auto [hu, hv] = fd_wirtinger_gradient(G, complexd(0.7, 0.3), complexd(1.0, 0.0));
    EXPECT_NEAR(std::abs(hu - complexd(0.5, 0.0)), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(hv), 0.0, 1e-10);
}

TEST(RadialHessian, MatchesFiniteDifferencesOnSumShape) {
    // G(t1, t2) = t1^4 + t2^2
    scalar_field F = [](complexd u, complexd v) {
        return std::pow(std::abs(u), 4.0) + std::norm(v);
    };
    fixture f;
    double t1 = std::abs(f.u), t2 = std::abs(f.v);
    Eigen::Matrix4d analytic = hessian4_from_radial(4.0 * t1 * t1 * t1, 2.0 * t2,
                                                    12.0 * t1 * t1, 0.0, 2.0, f.u, f.v);
    Eigen::Matrix4d fd = fd_hessian4(F, f.u, f.v);
    EXPECT_LT(max_rel_entry_error(fd, analytic), 1e-6);
}

TEST(RadialHessian, MatchesFiniteDifferencesOnProductShape) {
    // G(t1, t2) = t1^2 t2^2
    scalar_field F = [](complexd u, complexd v) { return std::norm(u) * std::norm(v); };
    fixture f;
    double t1 = std::abs(f.u), t2 = std::abs(f.v);
    Eigen::Matrix4d analytic =
        hessian4_from_radial(2.0 * t1 * t2 * t2, 2.0 * t1 * t1 * t2, 2.0 * t2 * t2,
                             4.0 * t1 * t2, 2.0 * t1 * t1, f.u, f.v);
    Eigen::Matrix4d fd = fd_hessian4(F, f.u, f.v);
    EXPECT_LT(max_rel_entry_error(fd, analytic), 1e-6);
}

TEST(ClosedShapes, SumShapeAgreesWithTwistedContraction) {
    fixture f;
    double t1 = std::abs(f.u), t2 = std::abs(f.v);
    // P(t) = t^4, Q(t) = t^2
    double P1 = 4.0 * t1 * t1 * t1, P2 = 12.0 * t1 * t1;
    double Q1 = 2.0 * t2, Q2 = 2.0;
    Eigen::Matrix4d H = hessian4_from_radial(P1, Q1, P2, 0.0, Q2, f.u, f.v);
    double via_contraction = generalized_hessian_tilde(H, f.A, f.B, f.u, f.v, f.zeta, f.eta);
    double via_closed =
        orlicz::closed_tilde_sum_shape(f.A, f.B, f.u, f.v, f.zeta, f.eta, P1, P2, Q1, Q2);
    EXPECT_NEAR(via_closed, via_contraction, 1e-9 * std::max(1.0, std::abs(via_contraction)));
}

TEST(ClosedShapes, ProductShapeAgreesWithTwistedContraction) {
    fixture f;
    double t1 = std::abs(f.u), t2 = std::abs(f.v);
    // R(t) = t^2 so G = t1^2 t2^2
    double R0 = t2 * t2, R1 = 2.0 * t2, R2 = 2.0;
    Eigen::Matrix4d H =
        hessian4_from_radial(2.0 * t1 * R0, t1 * t1 * R1, 2.0 * R0, 2.0 * t1 * R1,
                             t1 * t1 * R2, f.u, f.v);
    double via_contraction = generalized_hessian_tilde(H, f.A, f.B, f.u, f.v, f.zeta, f.eta);
    double via_closed =
        orlicz::closed_tilde_product_shape(f.A, f.B, f.u, f.v, f.zeta, f.eta, R0, R1, R2);
    EXPECT_NEAR(via_closed, via_contraction, 1e-9 * std::max(1.0, std::abs(via_contraction)));
}

TEST(ClosedShapes, NonsmoothPointsAreRejected) {
    fixture f;
    EXPECT_THROW(generalized_hessian_tilde(Eigen::Matrix4d::Identity(), f.A, f.B, 0.0, f.v,
                                           f.zeta, f.eta),
                 orlicz::pole_error);
    EXPECT_THROW(hessian4_from_radial(1, 1, 1, 0, 1, f.u, 0.0), orlicz::pole_error);
    EXPECT_THROW(
        orlicz::closed_tilde_sum_shape(f.A, f.B, 0.0, f.v, f.zeta, f.eta, 1, 1, 1, 1),
        orlicz::pole_error);
    EXPECT_THROW(
        orlicz::closed_tilde_product_shape(f.A, f.B, f.u, 0.0, f.zeta, f.eta, 1, 1, 1),
        orlicz::pole_error);
}

}  // namespace
