// Walkthrough of the scalar calculus: build a Young function, take its
// conjugate, read off the growth quantities, and evaluate the ellipticity
// constants of a complex coefficient matrix against it.

#include <iostream>

#include "orlicz/ellipticity.hpp"
#include "orlicz/young.hpp"

int main() {
    using namespace orlicz;

    // Phi(s) = s^4 + s^3: a perturbed power law.  The conjugate has no closed
    // form, so psi is evaluated through the Legendre transform.
    young_function phi = young_function::power_sum(4.0, 3.0, 1.0);
    conjugate_pair pair = make_conjugate_pair(phi);
    std::cout << "phi  = " << pair.phi.name() << "\n";
    std::cout << "psi  = " << pair.psi.name() << "\n\n";

    // Young's inequality s t <= phi(s) + psi(t), equality at t = phi'(s).
    for (double s : {0.5, 1.0, 3.0}) {
        double t = pair.phi.d1(s);
        std::cout << "s = " << s << ":  s*t = " << s * t
                  << "  phi(s) + psi(t) = " << pair.phi.eval(s) + pair.psi.eval(t) << "\n";
    }
    std::cout << "\n";

    // Growth exponents and the derived constants.
    char_quantities q = compute_char_quantities(pair);
    std::cout << "(m, M, mt, Mt) = (" << q.m << ", " << q.M << ", " << q.mt << ", " << q.Mt
              << ")\n";
    std::cout << "p = Mt + 1 = " << q.p << ",  D = " << q.D << "\n\n";

    // Ellipticity of a rotated identity: lambda = cos(phi), and the p-form
    // constant drops by |1 - 2/p|.
    matrix_field A = matrix_field::rotation(0.3, 2);
    std::cout << "A = " << A.name() << "\n";
    std::cout << "lambda(A)   = " << lambda_min(A) << "\n";
    std::cout << "Lambda(A)   = " << lambda_max_norm(A) << "\n";
    std::cout << "delta_p(A)  = " << delta_p(A, q.p) << "  at p = " << q.p << "\n";
    std::cout << "delta_Phi(A) = " << delta_phi(A, pair).value << "\n";
    return 0;
}
