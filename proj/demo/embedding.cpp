// End-to-end verification on a small 1-d torus: march the two heat
// semigroups, integrate the gradient product, and compare against both
// right-hand sides.

#include <iostream>

#include "orlicz/semigroup.hpp"
#include "orlicz/suite.hpp"

int main() {
    using namespace orlicz;

    conjugate_pair pair = make_conjugate_pair(young_function::power_law(4.0));
    matrix_field A = matrix_field::rotation(0.2, 1);
    matrix_field B = matrix_field::rotation(-0.2, 1);
    bellman_context ctx = make_bellman_context(pair, A, B);
    std::cout << "delta = " << ctx.delta << ",  C_p = " << ctx.c_p
              << ",  hessian floor coefficient = " << ctx.hessian_coeff << "\n";

    grid g(1, 64, 1.0);
    grid_function f0 = gaussian_bump(g, {0.3}, 0.15, 1.0);
    grid_function g0 = gaussian_bump(g, {0.7}, 0.2, complexd(0.7, 0.4));

    embedding_run_result run = verify_embedding(ctx, g, f0, g0);
    std::cout << "gradient-product integral = " << run.lhs.lhs << "\n";
    std::cout << "homogeneous rhs   = " << run.rhs.homogeneous
              << "  (margin " << run.margin_homogeneous << ")\n";
    std::cout << "dehomogenized rhs = " << run.rhs.dehomogenized
              << "  (margin " << run.margin_dehomogenized << ")\n";
    std::cout << "energy monotone: " << (run.flow.monotone_margin.pass ? "yes" : "NO")
              << ",  dissipation floor: " << (run.flow.derivative_margin.pass ? "yes" : "NO")
              << "\n";
    std::cout << (run.pass ? "pass" : "FAIL") << "\n";
    return run.pass ? 0 : 1;
}
