#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "orlicz/semigroup.hpp"

namespace {

using orlicz::assemble_operator;
using orlicz::complexd;
using orlicz::discrete_operator;
using orlicz::evolve;
using orlicz::evolve_expm;
using orlicz::evolve_fourier;
using orlicz::fourier_mode;
using orlicz::gaussian_bump;
using orlicz::grid;
using orlicz::grid_function;
using orlicz::matrix_field;
using orlicz::young_function;

grid_function mixed_data(const grid& g) {
    grid_function f = gaussian_bump(g, std::vector<double>(g.d, 0.3 * g.length), 0.15 * g.length,
                                    complexd(1.0, 0.0));
    grid_function m = fourier_mode(g, std::vector<int>(g.d, 1), complexd(0.3, 0.2));
    f.values += m.values;
    return f;
}

TEST(Grid, ValidationAndIndexing) {
    EXPECT_THROW(grid(3, 8, 1.0), std::invalid_argument);
    EXPECT_THROW(grid(1, 3, 1.0), std::invalid_argument);
    EXPECT_THROW(grid(1, 8, -1.0), std::invalid_argument);
    grid g(2, 8, 2.0);
    EXPECT_EQ(g.size(), 64);
    EXPECT_DOUBLE_EQ(g.h(), 0.25);
    EXPECT_EQ(g.flat(-1, 9), g.flat(7, 1));
    EXPECT_THROW(grid_function(g, Eigen::VectorXcd::Zero(5)), std::invalid_argument);
    EXPECT_THROW(fourier_mode(g, {1}), std::invalid_argument);
    EXPECT_THROW(gaussian_bump(g, {0.5, 0.5}, 0.0, 1.0), std::invalid_argument);
}

TEST(Assembly, OneDimensionalIdentityIsTheThreePointStencil) {
    grid g(1, 8, 1.0);
    discrete_operator op = assemble_operator(matrix_field::identity(1), g);
    double inv_h2 = 1.0 / (g.h() * g.h());
    Eigen::MatrixXcd dense = Eigen::MatrixXcd(op.L);
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            complexd want = 0.0;
            if (i == j) want = 2.0 * inv_h2;
            else if (g.wrap(i - j) == 1 || g.wrap(j - i) == 1) want = -inv_h2;
            EXPECT_NEAR(std::abs(dense(i, j) - want), 0.0, 1e-12 * inv_h2) << i << "," << j;
        }
    EXPECT_THROW(assemble_operator(matrix_field::identity(2), g), std::invalid_argument);
}

TEST(Assembly, RowAndColumnSumsVanish) {
    grid g(2, 16, 1.0);
    std::vector<matrix_field> fields = {matrix_field::identity(2),
                                        matrix_field::rotation(0.2, 2),
                                        orlicz::make_random_elliptic(2, 9, 4.0)};
    // node-varying accretive field
    std::vector<Eigen::MatrixXcd> values;
    for (int idx = 0; idx < g.size(); ++idx) {
        double s = 1.0 + 0.3 * std::sin(2.0 * M_PI * (idx % 16) / 16.0);
        values.push_back(s * Eigen::MatrixXcd::Identity(2, 2));
    }
    fields.push_back(matrix_field(2, values, "varying"));

    for (const auto& A : fields) {
        discrete_operator op = assemble_operator(A, g);
        Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(g.size());
        EXPECT_LT((op.L * ones).cwiseAbs().maxCoeff(), 1e-9) << A.name();
        EXPECT_LT((op.L.adjoint() * ones).cwiseAbs().maxCoeff(), 1e-9) << A.name();
    }
}

TEST(Assembly, FourierModesDiagonalizeConstantCoefficients) {
    for (int d : {1, 2}) {
        grid g(d, 16, 1.0);
        matrix_field A = d == 1 ? matrix_field::rotation(0.3, 1)
                                : orlicz::make_random_elliptic(2, 4, 4.0);
        discrete_operator op = assemble_operator(A, g);
        std::vector<std::vector<int>> ks =
            d == 1 ? std::vector<std::vector<int>>{{1}, {3}, {7}}
                   : std::vector<std::vector<int>>{{1, 0}, {2, 3}, {7, 5}};
        for (const auto& k : ks) {
            grid_function mode = fourier_mode(g, k);
            complexd sigma = orlicz::fourier_symbol(A.at(0), g, k);
            Eigen::VectorXcd resid = op.L * mode.values - sigma * mode.values;
            EXPECT_LT(resid.cwiseAbs().maxCoeff(), 1e-10 * std::abs(sigma))
                << "d=" << d << " k0=" << k[0];

            // the sesquilinear form picks out the symbol
            complexd form = orlicz::operator_form(op, mode);
            double mass = mode.norm_l2() * mode.norm_l2();
            EXPECT_NEAR(std::abs(form - sigma * mass), 0.0, 1e-10 * std::abs(sigma) * mass);
        }
    }
}

TEST(Assembly, FormEqualsCoefficientTimesGradientEnergy) {
    grid g(2, 16, 1.0);
    double phi = 0.2;
    discrete_operator op = assemble_operator(matrix_field::rotation(phi, 2), g);
    grid_function f = mixed_data(g);
    auto mags = orlicz::gradient_magnitude(orlicz::discrete_gradient(f));
    double energy = 0.0;
    for (double m : mags) energy += m * m;
    energy *= g.cell_volume();
    complexd form = orlicz::operator_form(op, f);
    EXPECT_NEAR(form.real(), std::cos(phi) * energy, 1e-10 * energy);
    EXPECT_NEAR(form.imag(), std::sin(phi) * energy, 1e-10 * energy);
}

TEST(Evolution, AgreesWithDenseAndSpectralOracles) {
    grid g(1, 64, 1.0);
    discrete_operator op = assemble_operator(matrix_field::rotation(0.3, 1), g);
    grid_function f = mixed_data(g);
    for (double t : {0.01, 0.1}) {
        grid_function marched = evolve(op, f, t);
        grid_function dense = evolve_expm(op, f, t);
        grid_function spectral = evolve_fourier(op, f, t);
        double scale = dense.norm_l2();
        EXPECT_LT((marched.values - dense.values).norm() * std::sqrt(g.cell_volume()),
                  1e-6 * scale)
            << "t=" << t;
        EXPECT_LT((spectral.values - dense.values).norm() * std::sqrt(g.cell_volume()),
                  1e-9 * scale)
            << "t=" << t;
    }
}

TEST(Evolution, SemigroupPropertyAndGuards) {
    grid g(1, 64, 1.0);
    discrete_operator op = assemble_operator(matrix_field::rotation(0.3, 1), g);
    grid_function f = mixed_data(g);
    grid_function one_hop = evolve(op, f, 0.15);
    grid_function two_hop = evolve(op, evolve(op, f, 0.05), 0.1);
    EXPECT_LT((one_hop.values - two_hop.values).norm(), 1e-7 * one_hop.values.norm());

    orlicz::heat_trajectory tr(op, f);
    tr.advance_to(0.1);
    EXPECT_THROW(tr.advance_to(0.05), std::invalid_argument);
    EXPECT_THROW(orlicz::heat_trajectory(op, grid_function(grid(1, 32, 1.0))),
                 std::invalid_argument);

    grid big(1, 4100, 1.0);
    discrete_operator op_big = assemble_operator(matrix_field::identity(1), big);
    EXPECT_THROW(evolve_expm(op_big, grid_function(big), 0.1), std::invalid_argument);

    std::vector<Eigen::MatrixXcd> values(g.size(), Eigen::MatrixXcd::Identity(1, 1));
    values[3](0, 0) = 1.5;
    discrete_operator op_var = assemble_operator(matrix_field(1, values, "varying"), g);
    EXPECT_THROW(evolve_fourier(op_var, f, 0.1), std::invalid_argument);
}

TEST(Evolution, ContractsInL2AndConservesTheMean) {
    grid g(1, 48, 1.0);
    discrete_operator op = assemble_operator(matrix_field::rotation(0.3, 1), g);
    grid_function f = mixed_data(g);
    complexd mean0 = f.mean();
    double prev = f.norm_l2();
    orlicz::heat_trajectory tr(op, f);
    for (double t : {1e-4, 1e-3, 1e-2, 0.1, 0.5, 2.0}) {
        tr.advance_to(t);
        double cur = tr.state().norm_l2();
        EXPECT_LE(cur, prev + 1e-12 * f.norm_l2()) << "t=" << t;
        EXPECT_NEAR(std::abs(tr.state().mean() - mean0), 0.0, 1e-12 * std::abs(mean0));
        prev = cur;
    }
}

TEST(GradientIntegral, SingleModeMatchesTheClosedDissipation) {
    grid g(1, 32, 1.0);
    discrete_operator op = assemble_operator(matrix_field::identity(1), g);
    grid_function f = fourier_mode(g, {3}, complexd(0.8, 0.1));
    complexd sigma = orlicz::fourier_symbol(op.A.at(0), g, {3});
    double cross0 = orlicz::cross_gradient_sum(f, f);
    double closed = cross0 / (2.0 * sigma.real());
    auto breakdown = orlicz::bilinear_embedding_lhs(op, op, f, f);
    EXPECT_NEAR(breakdown.lhs, closed, 0.02 * closed);
    EXPECT_GE(breakdown.lhs, closed * (1.0 - 1e-9));  // trapezoid + tail overestimate decay
}

TEST(GradientIntegral, CertifiedTailIsNegligibleAtTheDefaultHorizon) {
    grid g(1, 64, 1.0);
    discrete_operator op = assemble_operator(matrix_field::rotation(0.2, 1), g);
    grid_function f = gaussian_bump(g, {0.3}, 0.15, 1.0);
    grid_function h = gaussian_bump(g, {0.7}, 0.2, std::polar(0.8, 0.5));
    auto breakdown = orlicz::bilinear_embedding_lhs(op, op, f, h);
    EXPECT_GT(breakdown.quadrature, 0.0);
    EXPECT_LE(breakdown.tail_bound, 1e-6 * breakdown.quadrature);
    EXPECT_DOUBLE_EQ(breakdown.t_max,
                     std::log(1e10) / (2.0 * op.lambda * op.sigma_min));
    ASSERT_GE(breakdown.times.size(), 2u);
    EXPECT_NEAR(breakdown.times[1] / breakdown.times[0], 1.15, 1e-12);
}

TEST(EndToEnd, EmbeddingHoldsOnACoarseGrid) {
    auto pair = orlicz::make_conjugate_pair(young_function::power_law(4.0));
    auto ctx = orlicz::make_bellman_context(pair, matrix_field::identity(1),
                                            matrix_field::identity(1));
    grid g(1, 16, 1.0);
    grid_function f = gaussian_bump(g, {0.3}, 0.15, 1.0);
    grid_function h = gaussian_bump(g, {0.7}, 0.2, std::polar(0.8, 0.5));
    auto run = orlicz::verify_embedding(ctx, g, f, h);
    EXPECT_TRUE(run.pass);
    EXPECT_GT(run.margin_homogeneous, 0.0);
    EXPECT_GT(run.margin_dehomogenized, 0.0);
    EXPECT_TRUE(run.flow.derivative_margin.pass);
    EXPECT_TRUE(run.flow.monotone_margin.pass);
    EXPECT_TRUE(run.flow.initial_margin.pass);
    EXPECT_GT(run.lhs.lhs, 0.0);
    EXPECT_LT(run.lhs.lhs, run.rhs.homogeneous);
}

TEST(EndToEnd, NonAccretiveOperatorIsRefusedByName) {
    auto pair = orlicz::make_conjugate_pair(young_function::power_law(4.0));
    auto ctx = orlicz::make_bellman_context(pair, matrix_field::identity(1),
                                            matrix_field::identity(1));
    ctx.A = matrix_field::rotation(2.0, 1);  // bypasses construction-time rejection
    grid g(1, 16, 1.0);
    grid_function f = gaussian_bump(g, {0.3}, 0.15, 1.0);
    try {
        orlicz::verify_embedding(ctx, g, f, f);
        FAIL() << "expected a refusal";
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("rotation:2"), std::string::npos) << msg;
        EXPECT_NE(msg.find("not accretive"), std::string::npos) << msg;
    }
}

}  // namespace
