#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "orlicz/bellman.hpp"
#include "orlicz/common.hpp"
#include "orlicz/ellipticity.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/report.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

// ---------------------------------------------------------------------------
// Divergence-form operator L = -div(A grad) in flux form
// ---------------------------------------------------------------------------

/// Assembled operator together with the spectral constants used by the decay
/// certificates.  sigma_min/sigma_max are the extreme values of the scalar
/// (A = I) gradient symbol |g(k)|^2 = sum_j (2 - 2 cos(2 pi k_j / N)) / h^2
/// over nonzero (resp. all) lattice modes; they give the discrete Poincare
/// inequality sigma_min |f - mean|^2 <= |grad f|^2 <= sigma_max |f - mean|^2.
struct discrete_operator {
    grid g;
    matrix_field A;
    Eigen::SparseMatrix<complexd> L;
    double lambda = 0.0;     ///< least eigenvalue of the Hermitian part of A
    double sigma_min = 0.0;  ///< scalar symbol minimum over k != 0
    double sigma_max = 0.0;  ///< scalar symbol maximum
};

/// Flux-form assembly: the flux through face j at node x uses the arithmetic
/// average of the coefficient at the two adjacent nodes,
///   F_j(x) = sum_k (A(x) + A(x + h e_j))_jk / 2 * (f(x + e_k) - f(x)) / h,
/// and (L f)(x) = -(F_j(x) - F_j(x - e_j)) / h summed over j.  Row and column
/// sums of L vanish, so constants are invariant and the mean is conserved.
inline discrete_operator assemble_operator(const matrix_field& A, const grid& g) {
    if (A.dim() != g.d)
        throw std::invalid_argument("assemble_operator: matrix dimension must match the grid");
    if (!A.is_constant() && A.count() != static_cast<std::size_t>(g.size()))
        throw std::invalid_argument(
            "assemble_operator: matrix field needs one value per node (or a constant)");

    const int n = g.size();
    const double inv_h2 = 1.0 / (g.h() * g.h());
    std::vector<Eigen::Triplet<complexd>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 4 * g.d * g.d);

    auto neighbor = [&](int idx, int axis, int step) {
        auto [i0, i1] = g.coords(idx);
        return axis == 0 ? g.flat(i0 + step, i1) : g.flat(i0, i1 + step);
    };

    for (int y = 0; y < n; ++y) {
        for (int j = 0; j < g.d; ++j) {
            int yj = neighbor(y, j, +1);
            Eigen::MatrixXcd face = 0.5 * (A.at(static_cast<std::size_t>(y)) +
                                           A.at(static_cast<std::size_t>(yj)));
            for (int k = 0; k < g.d; ++k) {
                complexd c = face(j, k) * inv_h2;
                if (c == complexd(0.0, 0.0)) continue;
                int yk = neighbor(y, k, +1);
                // -(1/h) F_j(y) in row y
                trip.emplace_back(y, yk, -c);
                trip.emplace_back(y, y, c);
                // +(1/h) F_j(y) in row y + e_j
                trip.emplace_back(yj, yk, c);
                trip.emplace_back(yj, y, -c);
            }
        }
    }

    discrete_operator op{g, A, Eigen::SparseMatrix<complexd>(n, n)};
    op.L.setFromTriplets(trip.begin(), trip.end());
    op.lambda = lambda_min(A);

    const double tau = 6.283185307179586476925286766559;
    double smin = std::numeric_limits<double>::infinity(), smax = 0.0;
    auto axis_symbol = [&](int k) { return (2.0 - 2.0 * std::cos(tau * k / g.N)) * inv_h2; };
    if (g.d == 1) {
        for (int k = 0; k < g.N; ++k) {
            double s = axis_symbol(k);
            if (k != 0) smin = std::min(smin, s);
            smax = std::max(smax, s);
        }
    } else {
        for (int k0 = 0; k0 < g.N; ++k0)
            for (int k1 = 0; k1 < g.N; ++k1) {
                double s = axis_symbol(k0) + axis_symbol(k1);
                if (k0 != 0 || k1 != 0) smin = std::min(smin, s);
                smax = std::max(smax, s);
            }
    }
    op.sigma_min = smin;
    op.sigma_max = smax;
    return op;
}

/// Sesquilinear form <L f, f> with cell-volume weights.
inline complexd operator_form(const discrete_operator& op, const grid_function& f) {
    return f.values.dot(op.L * f.values) * op.g.cell_volume();
}

/// Fourier symbol of the assembled operator for a constant coefficient matrix:
/// sigma(k) = sum_{j,l} conj(g_j) A_jl g_l with g_j = (e^{i 2 pi k_j / N} - 1)/h.
inline complexd fourier_symbol(const Eigen::MatrixXcd& A, const grid& g,
                               const std::vector<int>& k) {
    if (static_cast<int>(k.size()) != g.d)
        throw std::invalid_argument("fourier_symbol: wave-number dimension mismatch");
    const double tau = 6.283185307179586476925286766559;
    Eigen::VectorXcd gv(g.d);
    for (int j = 0; j < g.d; ++j) {
        double th = tau * k[j] / g.N;
        gv[j] = (complexd(std::cos(th), std::sin(th)) - 1.0) / g.h();
    }
    return (gv.adjoint() * (A * gv))(0, 0);
}

// ---------------------------------------------------------------------------
// Crank-Nicolson marching with step-doubling error control
// ---------------------------------------------------------------------------

/// One trajectory of dy/dt = -L y, advanced monotonically in time.  Each step
/// is accepted from the halved-step solution when the step-doubling estimate
/// meets the relative tolerance; LU factorizations are cached per step size.
class heat_trajectory {
  public:
    heat_trajectory(const discrete_operator& op, grid_function initial, double rel_tol = 1e-9)
        : op_(&op), state_(std::move(initial)), rel_tol_(rel_tol) {
        if (state_.g != op.g)
            throw std::invalid_argument("heat_trajectory: data does not live on the operator grid");
        identity_.resize(op.L.rows(), op.L.cols());
        identity_.setIdentity();
    }

    double time() const { return time_; }
    const grid_function& state() const { return state_; }

    void advance_to(double t_target) {
        if (t_target < time_ - 1e-15 * std::max(1.0, std::abs(time_)))
            throw std::invalid_argument("heat_trajectory: cannot march backwards");
        while (time_ < t_target) {
            double remaining = t_target - time_;
            if (remaining <= 1e-18 * std::max(1.0, t_target)) break;
            if (dt_hint_ <= 0.0) dt_hint_ = remaining / 16.0;
            double dt = std::min(dt_hint_, remaining);
            for (;;) {
                Eigen::VectorXcd coarse = cn_step(state_.values, dt);
                Eigen::VectorXcd fine = cn_step(cn_step(state_.values, 0.5 * dt), 0.5 * dt);
                double err = (fine - coarse).norm() / std::max(fine.norm(), 1e-300);
                if (err <= rel_tol_ || dt <= 1e-16 * t_target) {
                    state_.values = std::move(fine);
                    time_ += dt;
                    if (err < 0.0625 * rel_tol_) dt_hint_ = 2.0 * dt;
                    else dt_hint_ = dt;
                    break;
                }
                dt *= 0.5;
                dt_hint_ = dt;
            }
        }
        time_ = std::max(time_, t_target);
    }

  private:
    Eigen::VectorXcd cn_step(const Eigen::VectorXcd& y, double dt) {
        auto& solver = factorization(dt);
        Eigen::VectorXcd rhs = y - (0.5 * dt) * (op_->L * y);
        Eigen::VectorXcd out = solver.solve(rhs);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("heat_trajectory: linear solve failed");
        return out;
    }

    Eigen::SparseLU<Eigen::SparseMatrix<complexd>>& factorization(double dt) {
        auto it = lu_.find(dt);
        if (it != lu_.end()) return *it->second;
        // The march visits many distinct step sizes (every quadrature node
        // clamps dt to the remaining interval), and a factorization of a 2-d
        // operator runs tens of MB; an unbounded cache can reach machine
        // memory over a long trajectory.  Active steps reuse only a couple of
        // sizes, so dropping the cache when it fills is nearly free.
        if (lu_.size() >= 12) lu_.clear();
        auto solver = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<complexd>>>();
        Eigen::SparseMatrix<complexd> M = identity_ + complexd(0.5 * dt) * op_->L;
        solver->compute(M);
        if (solver->info() != Eigen::Success)
            throw std::runtime_error("heat_trajectory: factorization failed");
        auto [pos, ok] = lu_.emplace(dt, std::move(solver));
        (void)ok;
        return *pos->second;
    }

    const discrete_operator* op_;
    grid_function state_;
    double time_ = 0.0;
    double rel_tol_;
    double dt_hint_ = 0.0;
    Eigen::SparseMatrix<complexd> identity_;
    std::map<double, std::unique_ptr<Eigen::SparseLU<Eigen::SparseMatrix<complexd>>>> lu_;
};

/// March the semigroup from 0 to t in one call.
inline grid_function evolve(const discrete_operator& op, const grid_function& f, double t,
                            double rel_tol = 1e-9) {
    heat_trajectory tr(op, f, rel_tol);
    tr.advance_to(t);
    return tr.state();
}

/// Dense matrix-exponential oracle (independent of the marching code).
inline grid_function evolve_expm(const discrete_operator& op, const grid_function& f, double t) {
    const int n = op.g.size();
    if (n > 4096)
        throw std::invalid_argument("evolve_expm: dense oracle capped at 4096 unknowns");
    Eigen::MatrixXcd dense = Eigen::MatrixXcd(op.L) * (-t);
    Eigen::MatrixXcd E = dense.exp();
    return grid_function(op.g, E * f.values);
}

/// Spectral oracle for constant coefficients: diagonalizes via the discrete
/// Fourier basis and damps each mode by exp(-t sigma(k)).
inline grid_function evolve_fourier(const discrete_operator& op, const grid_function& f,
                                    double t) {
    if (!op.A.is_constant())
        throw std::invalid_argument("evolve_fourier: needs a constant coefficient matrix");
    const grid& g = op.g;
    const int n = g.size();
    const double tau = 6.283185307179586476925286766559;

    auto mode_phase = [&](int kflat, int xflat) {
        auto [k0, k1] = g.coords(kflat);
        auto [x0, x1] = g.coords(xflat);
        double ph = tau * k0 * x0 / g.N;
        if (g.d == 2) ph += tau * k1 * x1 / g.N;
        return complexd(std::cos(ph), std::sin(ph));
    };

    // forward coefficients c_k = (1/n) sum_x f(x) conj(mode_k(x))
    Eigen::VectorXcd coeff(n);
    for (int k = 0; k < n; ++k) {
        complexd acc = 0.0;
        for (int x = 0; x < n; ++x) acc += f.values[x] * std::conj(mode_phase(k, x));
        coeff[k] = acc / double(n);
    }
    // damp and reconstruct
    for (int k = 0; k < n; ++k) {
        auto [k0, k1] = g.coords(k);
        std::vector<int> kv = g.d == 1 ? std::vector<int>{k0} : std::vector<int>{k0, k1};
        coeff[k] *= std::exp(-t * fourier_symbol(op.A.at(0), g, kv));
    }
    grid_function out(g);
    for (int x = 0; x < n; ++x) {
        complexd acc = 0.0;
        for (int k = 0; k < n; ++k) acc += coeff[k] * mode_phase(k, x);
        out.values[x] = acc;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bilinear gradient integral
// ---------------------------------------------------------------------------

struct embedding_options {
    double time_ratio = 1.15;     ///< geometric spacing of quadrature nodes
    double head_fraction = 1e-4;  ///< first node near head_fraction * t_max
    double t_max = 0.0;           ///< 0 = choose from the decay certificate
    double cn_tol = 1e-9;
};

/// Quadrature of int_0^infinity sum_x |grad T_t f| |grad T_t g| h^d dt:
/// a rectangle on [0, t_1], trapezoids on the geometric nodes, and a certified
/// remainder from the decay estimate
///   tail <= sigma_max |f_T - mean| |g_T - mean| / (2 min(lambda) sigma_min).
struct embedding_breakdown {
    std::vector<double> times;
    std::vector<double> integrand;
    double quadrature = 0.0;
    double tail_bound = 0.0;
    double lhs = 0.0;  ///< quadrature + tail bound
    double t_max = 0.0;
    double sigma_min = 0.0, sigma_max = 0.0;
};

inline double cross_gradient_sum(const grid_function& f, const grid_function& g) {
    auto mf = gradient_magnitude(discrete_gradient(f));
    auto mg = gradient_magnitude(discrete_gradient(g));
    double acc = 0.0;
    for (std::size_t i = 0; i < mf.size(); ++i) acc += mf[i] * mg[i];
    return acc * f.g.cell_volume();
}

inline double auto_t_max(const discrete_operator& opA, const discrete_operator& opB) {
    double lam = std::min(opA.lambda, opB.lambda);
    if (!(lam > 0.0))
        throw std::invalid_argument("auto_t_max: operators must be accretive (lambda > 0)");
    return std::log(1e10) / (2.0 * lam * opA.sigma_min);
}

inline embedding_breakdown bilinear_embedding_lhs(const discrete_operator& opA,
                                                  const discrete_operator& opB,
                                                  const grid_function& f, const grid_function& g,
                                                  const embedding_options& opt = {}) {
    if (!(opA.g == opB.g))
        throw std::invalid_argument("bilinear_embedding_lhs: operators on different grids");
    embedding_breakdown out;
    out.sigma_min = opA.sigma_min;
    out.sigma_max = opA.sigma_max;
    out.t_max = opt.t_max > 0.0 ? opt.t_max : auto_t_max(opA, opB);

    const double rho = opt.time_ratio;
    const int K =
        static_cast<int>(std::ceil(std::log(1.0 / opt.head_fraction) / std::log(rho))) + 1;
    out.times.resize(K);
    for (int k = 0; k < K; ++k) out.times[k] = out.t_max * std::pow(rho, k - (K - 1));

    heat_trajectory trf(opA, f, opt.cn_tol), trg(opB, g, opt.cn_tol);
    out.integrand.resize(K);
    for (int k = 0; k < K; ++k) {
        trf.advance_to(out.times[k]);
        trg.advance_to(out.times[k]);
        out.integrand[k] = cross_gradient_sum(trf.state(), trg.state());
    }

    out.quadrature = out.integrand[0] * out.times[0];  // head rectangle
    for (int k = 0; k + 1 < K; ++k)
        out.quadrature +=
            0.5 * (out.integrand[k] + out.integrand[k + 1]) * (out.times[k + 1] - out.times[k]);

    auto centered_norm = [](const grid_function& v) {
        grid_function w = v;
        w.values.array() -= v.mean();
        return w.norm_l2();
    };
    double lam = std::min(opA.lambda, opB.lambda);
    out.tail_bound = opA.sigma_max * centered_norm(trf.state()) * centered_norm(trg.state()) /
                     (2.0 * lam * opA.sigma_min);
    out.lhs = out.quadrature + out.tail_bound;
    return out;
}

/// Right-hand sides: the homogeneous product bound and the modular bound.
struct embedding_rhs {
    double norm_f = 0, norm_g = 0;        ///< Luxemburg norms
    double modular_f = 0, modular_g = 0;  ///< sums of Phi(|f|), Psi(|g|)
    double c_p = 0, D = 0;
    double homogeneous = 0;    ///< 40 c_p D |f|_Phi |g|_Psi
    double dehomogenized = 0;  ///< 20 c_p D (modular_f + modular_g)
};

inline embedding_rhs bilinear_embedding_rhs(const conjugate_pair& pair, const char_quantities& q,
                                            const matrix_field& A, const matrix_field& B,
                                            const grid_function& f, const grid_function& g) {
    embedding_rhs r;
    r.c_p = c_p_constant(A, B, q.p);
    r.D = q.D;
    r.norm_f = luxemburg_norm(pair.phi, f);
    r.norm_g = luxemburg_norm(pair.psi, g);
    double mf = 0.0, mg = 0.0;
    for (int i = 0; i < f.g.size(); ++i) mf += pair.phi.eval(std::abs(f.values[i]));
    for (int i = 0; i < g.g.size(); ++i) mg += pair.psi.eval(std::abs(g.values[i]));
    r.modular_f = mf * f.g.cell_volume();
    r.modular_g = mg * g.g.cell_volume();
    r.homogeneous = 40.0 * r.c_p * r.D * r.norm_f * r.norm_g;
    r.dehomogenized = 20.0 * r.c_p * r.D * (r.modular_f + r.modular_g);
    return r;
}

// ---------------------------------------------------------------------------
// Heat-flow energy monotonicity
// ---------------------------------------------------------------------------

/// Time series of E(t) = sum_x Bellman(T_t f, T_t g) h^d along the flow,
/// its central-difference derivative, and the dissipation floor
///   -E'(t) >= hessian_coeff * sum_x |grad T_t f| |grad T_t g| h^d.
/// Margins are normalized by E(0).
struct heat_flow_result {
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> derivative;   ///< dE/dt by central differences
    std::vector<double> dissipation;  ///< floor for -E'
    double e0 = 0.0;
    double e0_bound = 0.0;  ///< 2 max{1, M/mt} (modular_f + modular_g)
    margin_report derivative_margin;
    margin_report monotone_margin;
    margin_report initial_margin;
};

inline heat_flow_result heat_flow_check(const bellman_context& ctx, const discrete_operator& opA,
                                        const discrete_operator& opB, const grid_function& f,
                                        const grid_function& g,
                                        const embedding_options& opt = {}) {
    if (!(opA.g == opB.g))
        throw std::invalid_argument("heat_flow_check: operators on different grids");
    heat_flow_result out;
    const double t_max = opt.t_max > 0.0 ? opt.t_max : auto_t_max(opA, opB);
    const double rho = opt.time_ratio;
    const int K =
        static_cast<int>(std::ceil(std::log(1.0 / opt.head_fraction) / std::log(rho))) + 1;
    out.times.resize(K);
    for (int k = 0; k < K; ++k) out.times[k] = t_max * std::pow(rho, k - (K - 1));

    const double vol = opA.g.cell_volume();
    auto energy_of = [&](const grid_function& a, const grid_function& b) {
        double acc = 0.0;
        for (int i = 0; i < a.g.size(); ++i)
            acc += bellman_eval(ctx, a.values[i], b.values[i]);
        return acc * vol;
    };

    out.e0 = energy_of(f, g);
    double mf = 0.0, mg = 0.0;
    for (int i = 0; i < f.g.size(); ++i) mf += ctx.pair.phi.eval(std::abs(f.values[i]));
    for (int i = 0; i < g.g.size(); ++i) mg += ctx.pair.psi.eval(std::abs(g.values[i]));
    out.e0_bound = ctx.factor_upper * (mf + mg) * vol;

    // march once through the sorted sequence t_k (1 - s), t_k, t_k (1 + s)
    const double shift = 1e-4;
    heat_trajectory trf(opA, f, opt.cn_tol), trg(opB, g, opt.cn_tol);
    out.energy.resize(K);
    out.derivative.resize(K);
    out.dissipation.resize(K);
    for (int k = 0; k < K; ++k) {
        double t = out.times[k], dt = shift * t;
        trf.advance_to(t - dt);
        trg.advance_to(t - dt);
        double e_minus = energy_of(trf.state(), trg.state());
        trf.advance_to(t);
        trg.advance_to(t);
        out.energy[k] = energy_of(trf.state(), trg.state());
        out.dissipation[k] =
            ctx.hessian_coeff * cross_gradient_sum(trf.state(), trg.state());
        trf.advance_to(t + dt);
        trg.advance_to(t + dt);
        double e_plus = energy_of(trf.state(), trg.state());
        out.derivative[k] = (e_plus - e_minus) / (2.0 * dt);
    }

    out.derivative_margin.name = "heat-flow-dissipation";
    out.derivative_margin.samples = K;
    out.derivative_margin.tolerance = 1e-6;
    out.derivative_margin.min_margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        double margin = (-out.derivative[k] - out.dissipation[k]) / out.e0;
        if (margin < out.derivative_margin.min_margin) {
            out.derivative_margin.min_margin = margin;
            out.derivative_margin.argmin = "t=" + format_double(out.times[k], 9);
        }
    }
    out.derivative_margin.pass = out.derivative_margin.min_margin >= -1e-6;

    out.monotone_margin.name = "heat-flow-monotone";
    out.monotone_margin.samples = K;
    out.monotone_margin.tolerance = 1e-6;
    out.monotone_margin.min_margin = std::numeric_limits<double>::infinity();
    double prev = out.e0;
    for (int k = 0; k < K; ++k) {
        double margin = (prev - out.energy[k]) / out.e0;
        if (margin < out.monotone_margin.min_margin) {
            out.monotone_margin.min_margin = margin;
            out.monotone_margin.argmin = "t=" + format_double(out.times[k], 9);
        }
        prev = out.energy[k];
    }
    out.monotone_margin.pass = out.monotone_margin.min_margin >= -1e-6;

    out.initial_margin.name = "heat-flow-initial-bound";
    out.initial_margin.samples = 1;
    out.initial_margin.tolerance = 1e-9;
    out.initial_margin.min_margin = (out.e0_bound - out.e0) / out.e0_bound;
    out.initial_margin.pass = out.initial_margin.min_margin >= -1e-9;
    return out;
}

// ---------------------------------------------------------------------------
// Full verification run
// ---------------------------------------------------------------------------

struct embedding_run_result {
    embedding_breakdown lhs;
    embedding_rhs rhs;
    heat_flow_result flow;
    bool with_flow = false;
    double margin_homogeneous = 0.0;    ///< (rhs - lhs)/rhs
    double margin_dehomogenized = 0.0;
    bool pass = false;
};

/// End-to-end check of the gradient-product integral against both right-hand
/// sides, optionally with the energy-monotonicity series.  Construction of the
/// bellman_context has already rejected non-elliptic matrix pairs.
inline embedding_run_result verify_embedding(const bellman_context& ctx, const grid& g,
                                             const grid_function& f0, const grid_function& g0,
                                             const embedding_options& opt = {},
                                             bool with_flow = true) {
    discrete_operator opA = assemble_operator(ctx.A, g);
    discrete_operator opB = assemble_operator(ctx.B, g);
    if (!(opA.lambda > 0.0))
        throw std::invalid_argument("verify_embedding: matrix '" + ctx.A.name() +
                                    "' is not accretive");
    if (!(opB.lambda > 0.0))
        throw std::invalid_argument("verify_embedding: matrix '" + ctx.B.name() +
                                    "' is not accretive");

    embedding_run_result out;
    out.lhs = bilinear_embedding_lhs(opA, opB, f0, g0, opt);
    out.rhs = bilinear_embedding_rhs(ctx.pair, ctx.q, ctx.A, ctx.B, f0, g0);
    out.margin_homogeneous = (out.rhs.homogeneous - out.lhs.lhs) / out.rhs.homogeneous;
    out.margin_dehomogenized = (out.rhs.dehomogenized - out.lhs.lhs) / out.rhs.dehomogenized;
    out.with_flow = with_flow;
    if (with_flow) out.flow = heat_flow_check(ctx, opA, opB, f0, g0, opt);
    out.pass = out.margin_homogeneous > 0.0 && out.margin_dehomogenized > 0.0 &&
               (!with_flow || (out.flow.derivative_margin.pass && out.flow.monotone_margin.pass &&
                               out.flow.initial_margin.pass));
    return out;
}

}  // namespace orlicz
