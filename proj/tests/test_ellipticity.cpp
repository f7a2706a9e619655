#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "orlicz/ellipticity.hpp"
#include "orlicz/young.hpp"

namespace {

using orlicz::complexd;
using orlicz::conjugate_pair;
using orlicz::delta_p;
using orlicz::lambda_max_norm;
using orlicz::lambda_min;
using orlicz::make_conjugate_pair;
using orlicz::make_random_elliptic;
using orlicz::matrix_field;
using orlicz::young_function;

Eigen::MatrixXcd diag2(complexd a, complexd b) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

/// Monte-Carlo upper bound for min over complex unit xi of
/// Re <A xi, xi + mu conj(xi)>, drawn independently of the eigensolver path.
double sampled_form_min(const Eigen::MatrixXcd& A, double mu, int n, std::uint64_t seed) {
    const int d = static_cast<int>(A.rows());
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        orlicz::sample_rng rng(seed, static_cast<std::uint64_t>(i));
        Eigen::VectorXcd xi(d);
        for (int j = 0; j < d; ++j) xi[j] = complexd(rng.normal(), rng.normal());
        if (xi.norm() < 1e-12) continue;
        xi.normalize();
        Eigen::VectorXcd probe = xi + mu * xi.conjugate();
        best = std::min(best, std::real(probe.dot(A * xi)));
    }
    return best;
}

TEST(MatrixField, FactoriesAndValidation) {
    matrix_field id = matrix_field::identity(2);
    EXPECT_EQ(id.dim(), 2);
    EXPECT_TRUE(id.is_constant());
    EXPECT_NEAR((id.at(0) - Eigen::MatrixXcd::Identity(2, 2)).norm(), 0.0, 1e-15);

    matrix_field rot = matrix_field::rotation(0.3, 2);
    Eigen::MatrixXcd want = std::exp(complexd(0, 0.3)) * Eigen::MatrixXcd::Identity(2, 2);
    EXPECT_NEAR((rot.at(0) - want).norm(), 0.0, 1e-15);

    EXPECT_THROW(matrix_field::identity(0), std::invalid_argument);
    Eigen::MatrixXcd bad(2, 3);
    bad.setZero();
    EXPECT_THROW(matrix_field::constant(bad, "bad"), std::invalid_argument);
}

TEST(MatrixField, ImagSymmetryDetection) {
    EXPECT_TRUE(matrix_field::rotation(0.4, 2).imag_symmetric());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    m(0, 1) = complexd(0.0, 0.2);
    m(1, 0) = complexd(0.0, -0.2);  // antisymmetric imaginary part
    EXPECT_FALSE(matrix_field::constant(m, "skew").imag_symmetric());
}

TEST(Ellipticity, ScalarMatrixClosedForms) {
    for (double phi : {0.0, 0.3, 0.7, 1.2, -0.9}) {
        matrix_field A = matrix_field::rotation(phi, 2);
        EXPECT_NEAR(lambda_min(A), std::cos(phi), 1e-12) << "phi = " << phi;
        EXPECT_NEAR(lambda_max_norm(A), 1.0, 1e-12);
        for (double p : {2.5, 3.0, 4.0, 6.0}) {
            double mu = std::abs(1.0 - 2.0 / p);
            EXPECT_NEAR(delta_p(A, p), std::cos(phi) - mu, 1e-9)
                << "phi = " << phi << " p = " << p;
        }
    }
    EXPECT_NEAR(lambda_max_norm(matrix_field::constant(
                    diag2(2.0, std::exp(complexd(0, 0.5))), "diag")),
                2.0, 1e-12);
}

TEST(Ellipticity, OneDimensionalClosedForm) {
    // d = 1: the form minimum over the unit circle is Re a - mu |a|.
    for (auto a : {complexd(1.0, 0.4), complexd(0.8, -0.7), complexd(2.0, 0.0)}) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = a;
        matrix_field A = matrix_field::constant(m, "scalar");
        for (double p : {2.0, 3.0, 4.0}) {
            double mu = std::abs(1.0 - 2.0 / p);
            EXPECT_NEAR(delta_p(A, p), a.real() - mu * std::abs(a), 1e-12);
        }
    }
}

TEST(Ellipticity, AtPTwoEqualsAccretivityConstant) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        matrix_field A = make_random_elliptic(2, seed, 4.0);
        EXPECT_NEAR(delta_p(A, 2.0), lambda_min(A), 1e-10) << "seed " << seed;
    }
}

TEST(Ellipticity, EigenSolverMatchesSampledFormMin) {
    for (std::uint64_t seed : {3u, 7u, 21u}) {
        matrix_field A = make_random_elliptic(2, seed, 4.0);
        for (double p : {2.5, 4.0, 6.0}) {
            double mu = std::abs(1.0 - 2.0 / p);
            double exact = delta_p(A, p);
            double sampled = sampled_form_min(A.at(0), mu, 20000, 1234 + seed);
            EXPECT_LE(exact, sampled + 1e-12);
            EXPECT_NEAR(sampled, exact, 0.05);
        }
    }
}

TEST(Ellipticity, NonIncreasingInP) {
    for (std::uint64_t seed : {2u, 9u, 31u}) {
        matrix_field A = make_random_elliptic(2, seed, 2.5);
        double prev = delta_p(A, 2.0);
        for (double p : {2.5, 3.0, 4.0, 6.0, 10.0}) {
            double cur = delta_p(A, p);
            EXPECT_LE(cur, prev + 1e-12) << "seed " << seed << " p " << p;
            prev = cur;
        }
    }
    EXPECT_THROW(delta_p(matrix_field::identity(2), 1.5), std::invalid_argument);
}

TEST(Ellipticity, GeneralizedConstantMatchesPowerCase) {
    std::vector<matrix_field> mats{matrix_field::identity(2), matrix_field::rotation(0.2, 2),
                                   matrix_field::rotation(-0.4, 2)};
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        mats.push_back(make_random_elliptic(2, seed, 4.0));

    std::vector<young_function> bases{young_function::power_law(4.0),
                                      young_function::zygmund_log(3.0),
                                      young_function::power_sum(4.0, 3.0, 1.0),
                                      young_function::dual_power_sum(1.5, 1.8)};
    for (const auto& base : bases) {
        conjugate_pair pair = make_conjugate_pair(base);
        auto q = orlicz::compute_char_quantities(pair);
        for (const auto& A : mats) {
            double general = orlicz::delta_phi(A, pair).value;
            double classical = delta_p(A, q.Mt + 1.0);
            EXPECT_NEAR(general, classical, 1e-6) << base.name() << " on " << A.name();
        }
    }
}

TEST(Ellipticity, FormConstantFrozenValues) {
    matrix_field I = matrix_field::identity(2);
    EXPECT_NEAR(orlicz::c_p_constant(I, I, 4.0), 2.0, 1e-12);
    EXPECT_NEAR(orlicz::c_p_constant(I, I, 2.0), 1.0, 1e-12);

    auto q = orlicz::compute_char_quantities(make_conjugate_pair(young_function::power_law(4.0)));
    EXPECT_NEAR(orlicz::delta_param(q, I, I), 1.0 / 300.0, 1e-14);
    EXPECT_LE(orlicz::delta_param(q, I, I), (q.mt - 1.0) / (100.0 * q.mt) + 1e-15);
}

TEST(Ellipticity, RefusesNonEllipticPairByName) {
    matrix_field bad = matrix_field::rotation(1.5, 2);
    EXPECT_NEAR(delta_p(bad, 4.0), std::cos(1.5) - 0.5, 1e-9);
    EXPECT_LT(delta_p(bad, 4.0), 0.0);
    try {
        orlicz::c_p_constant(bad, matrix_field::identity(2), 4.0);
        FAIL() << "expected a refusal";
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("rotation:1.5"), std::string::npos) << msg;
        EXPECT_NE(msg.find("not p-elliptic"), std::string::npos) << msg;
    }
}

TEST(Dissipativity, PowerCoefficientMatchesYoungCoefficientForPowerLaws) {
    // Dissipativity checks require a symmetric imaginary part.
    Eigen::MatrixXcd m(2, 2);
    m << complexd(1.2, 0.2), complexd(0.1, 0.1), complexd(0.1, 0.1), complexd(0.9, -0.1);
    matrix_field A = matrix_field::constant(m, "sym-im");
    for (double p : {2.5, 4.0}) {
        auto via_power = orlicz::cm_margin_power(A, p, 500, 42);
        auto via_young = orlicz::cm_margin_young(A, young_function::power_law(p), 500, 42);
        ASSERT_EQ(via_power.margins.size(), via_young.margins.size());
        for (std::size_t i = 0; i < via_power.margins.size(); ++i)
            EXPECT_NEAR(via_power.margins[i], via_young.margins[i], 1e-12);
    }
}

TEST(Dissipativity, SignFlipsAtTheCriticalAngle) {
    // For e^{i phi} I the sample margin is cos(phi) - kappa |sin(phi)|,
    // flipping sign where |p-2| tan(phi) = 2 sqrt(p-1).
    const double p = 4.0;
    const double flip = std::atan(2.0 * std::sqrt(p - 1.0) / (p - 2.0));
    auto low = orlicz::cm_margin_power(matrix_field::rotation(flip - 0.05, 2), p, 200, 1);
    auto high = orlicz::cm_margin_power(matrix_field::rotation(flip + 0.05, 2), p, 200, 1);
    EXPECT_GT(low.min_margin, 0.0);
    EXPECT_LT(high.min_margin, 0.0);
}

TEST(Dissipativity, RequiresSymmetricImaginaryPart) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
    m(0, 1) = complexd(0.0, 0.2);
    m(1, 0) = complexd(0.0, -0.2);
    matrix_field A = matrix_field::constant(m, "skew");
    EXPECT_THROW(orlicz::cm_margin_power(A, 4.0, 10, 1), orlicz::inapplicable_error);
}

TEST(RandomElliptic, DeterministicAndInsideTheMarginTarget) {
    matrix_field a1 = make_random_elliptic(2, 11, 4.0, 0.05);
    matrix_field a2 = make_random_elliptic(2, 11, 4.0, 0.05);
    EXPECT_NEAR((a1.at(0) - a2.at(0)).norm(), 0.0, 0.0);
    EXPECT_GE(delta_p(a1, 4.0), 0.05);

    matrix_field b = make_random_elliptic(2, 12, 4.0, 0.05);
    EXPECT_GT((a1.at(0) - b.at(0)).norm(), 1e-6);  // different seeds differ
}

TEST(Report, AggregateMatchesStandaloneFunctions) {
    matrix_field A = matrix_field::rotation(0.2, 2);
    matrix_field B = matrix_field::rotation(-0.2, 2);
    conjugate_pair pair = make_conjugate_pair(young_function::power_law(4.0));
    auto q = orlicz::compute_char_quantities(pair);
    auto rep = orlicz::make_ellipticity_report(A, B, pair, q);
    EXPECT_DOUBLE_EQ(rep.lambda_A, lambda_min(A));
    EXPECT_DOUBLE_EQ(rep.Lambda_B, lambda_max_norm(B));
    EXPECT_DOUBLE_EQ(rep.delta_p_A, delta_p(A, q.Mt + 1.0));
    EXPECT_DOUBLE_EQ(rep.c_p, orlicz::c_p_constant(A, B, q.Mt + 1.0));
    EXPECT_DOUBLE_EQ(rep.delta, orlicz::delta_param(q, A, B));
    EXPECT_NEAR(rep.delta_phi_A, rep.delta_p_A, 1e-6);
}

}  // namespace
