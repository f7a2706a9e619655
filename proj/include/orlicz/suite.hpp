#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "orlicz/bellman.hpp"
#include "orlicz/ellipticity.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/report.hpp"
#include "orlicz/semigroup.hpp"
#include "orlicz/young.hpp"

namespace orlicz {

// ---------------------------------------------------------------------------
// Reference fixtures
// ---------------------------------------------------------------------------

struct named_family {
    std::string name;
    young_function base;
};

inline std::vector<named_family> reference_families() {
    return {
        {"power:4", young_function::power_law(4.0)},
        {"zygmund:3", young_function::zygmund_log(3.0)},
        {"power-sum:4:3:1", young_function::power_sum(4.0, 3.0, 1.0)},
        {"power-sum:4:3:0.01", young_function::power_sum(4.0, 3.0, 0.01)},
        {"dual-power-sum:1.5:1.8", young_function::dual_power_sum(1.5, 1.8)},
    };
}

struct named_matrix_pair {
    std::string name;
    matrix_field A, B;
};

/// Identity pair, counter-rotated pair, and a deterministic random elliptic
/// pair (all with a p = 4 ellipticity margin of at least 0.05).
inline std::vector<named_matrix_pair> reference_matrix_pairs(int d) {
    return {
        {"identity", matrix_field::identity(d), matrix_field::identity(d)},
        {"rotation-0.2", matrix_field::rotation(0.2, d), matrix_field::rotation(-0.2, d)},
        {"random-elliptic", make_random_elliptic(d, 11, 4.0, 0.05, "random-elliptic:11"),
         make_random_elliptic(d, 12, 4.0, 0.05, "random-elliptic:12")},
    };
}

inline std::vector<grid> reference_grids() {
    return {grid(1, 64, 1.0), grid(1, 128, 1.0), grid(2, 32, 1.0)};
}

/// Smooth complex initial data for the evolution runs.
inline std::pair<grid_function, grid_function> reference_data(const grid& g) {
    std::vector<double> c1(g.d, 0.3 * g.length), c2(g.d, 0.7 * g.length);
    grid_function f = gaussian_bump(g, c1, 0.15 * g.length, complexd(1.0, 0.0));
    grid_function h = gaussian_bump(g, c2, 0.20 * g.length,
                                    0.8 * complexd(std::cos(0.5), std::sin(0.5)));
    return {f, h};
}

// ---------------------------------------------------------------------------
// Aggregated margin suite over the reference configuration
// ---------------------------------------------------------------------------

struct suite_options {
    long pointwise_samples = 100000;
    long mollified_samples = 100;
    long cm_samples = 10000;
    std::uint64_t seed = 1;
    double nu = 0.05;
    int mollifier_radial = 12;
    int mollifier_angular = 12;
    bool with_mollified = true;
    bool with_embedding = true;
};

struct suite_result {
    std::vector<margin_report> margins;
    std::vector<quantity_row> quantities;
    bool pass = true;
};

namespace detail {

inline void push_margin(suite_result& out, margin_report rep, const std::string& tag) {
    rep.name += ":" + tag;
    out.pass = out.pass && rep.pass;
    out.margins.push_back(std::move(rep));
}

}  // namespace detail

/// Runs every certificate check of the reference configuration and aggregates
/// the margins.  Deterministic for a fixed seed and fixed budgets.
inline suite_result run_reference_suite(const suite_options& opt = {}) {
    suite_result out;
    auto families = reference_families();
    auto pairs2 = reference_matrix_pairs(2);

    for (const auto& fam : families) {
        conjugate_pair pair = make_conjugate_pair(fam.base);
        char_quantities q = compute_char_quantities(pair);
        out.quantities.push_back({"m:" + fam.name, q.m, 0.0, 0.0});
        out.quantities.push_back({"M:" + fam.name, q.M, 0.0, 0.0});
        out.quantities.push_back({"mt:" + fam.name, q.mt, 0.0, 0.0});
        out.quantities.push_back({"Mt:" + fam.name, q.Mt, 0.0, 0.0});
        out.quantities.push_back({"p:" + fam.name, q.p, 0.0, 0.0});
        out.quantities.push_back({"D:" + fam.name, q.D, 0.0, 0.0});

        auto dbl = doubling_constants(pair, q);
        out.quantities.push_back(
            {"doubling-phi:" + fam.name, dbl.K_phi, dbl.bound_phi, dbl.bound_phi - dbl.K_phi});
        out.quantities.push_back(
            {"doubling-psi:" + fam.name, dbl.K_psi, dbl.bound_psi, dbl.bound_psi - dbl.K_psi});
        margin_report dm;
        dm.name = "doubling";
        dm.samples = 2;
        dm.tolerance = 1e-9;
        dm.min_margin = std::min((dbl.bound_phi - dbl.K_phi) / dbl.bound_phi,
                                 (dbl.bound_psi - dbl.K_psi) / dbl.bound_psi);
        dm.pass = dm.min_margin >= -dm.tolerance;
        detail::push_margin(out, dm, fam.name);

        auto dual = verify_dual_quantities(pair, q);
        margin_report dq;
        dq.name = "dual-quantities";
        dq.samples = 4;
        dq.tolerance = 1e-3;
        dq.min_margin = dq.tolerance - dual.max_abs_error;
        dq.pass = dual.max_abs_error <= dq.tolerance;
        dq.note = dual.numeric_side ? "numeric conjugate side" : "";
        detail::push_margin(out, dq, fam.name);

        for (const auto& mp : pairs2) {
            const std::string tag = fam.name + ":" + mp.name;
            bellman_context ctx = make_bellman_context(pair, mp.A, mp.B);

            out.quantities.push_back(
                {"delta:" + tag, ctx.delta, ctx.delta_budget(), ctx.delta_budget() - ctx.delta});
            out.quantities.push_back({"c_p:" + tag, ctx.c_p, 0.0, 0.0});

            detail::push_margin(out, verify_upper_bound(ctx, opt.pointwise_samples, opt.seed),
                                tag);
            detail::push_margin(out, verify_gradient_bound(ctx, opt.pointwise_samples, opt.seed),
                                tag);
            detail::push_margin(out, verify_hessian_lower(ctx, opt.pointwise_samples, opt.seed),
                                tag);

            if (mp.A.imag_symmetric() && mp.B.imag_symmetric()) {
                auto cm = cm_margin_young(mp.A, pair.phi, opt.cm_samples, opt.seed);
                margin_report rep;
                rep.name = "dissipativity";
                rep.samples = cm.samples;
                rep.tolerance = 1e-9;
                rep.min_margin = cm.min_margin;
                rep.pass = cm.min_margin >= -rep.tolerance;
                rep.argmin = "s=" + format_double(cm.argmin_s, 9);
                detail::push_margin(out, rep, tag);
            }
        }
    }

    if (opt.with_mollified) {
        mollifier moll(opt.nu, opt.mollifier_radial, opt.mollifier_angular);
        // all families against the identity pair, plus every pair for the
        // first family: the mollified value and gradient do not depend on the
        // matrices at all, so the pair sweep only exercises the Hessian floor
        auto add = [&](const named_family& fam, const named_matrix_pair& mp) {
            conjugate_pair pair = make_conjugate_pair(fam.base);
            bellman_context ctx = make_bellman_context(pair, mp.A, mp.B);
            auto rep = verify_mollified(ctx, moll, opt.mollified_samples, opt.seed);
            const std::string tag = fam.name + ":" + mp.name;
            detail::push_margin(out, rep.bound, tag);
            detail::push_margin(out, rep.gradient, tag);
            detail::push_margin(out, rep.hessian, tag);
        };
        for (const auto& fam : families) add(fam, pairs2[0]);
        for (std::size_t i = 1; i < pairs2.size(); ++i) add(families[0], pairs2[i]);
    }

    if (opt.with_embedding) {
        for (const auto& g : reference_grids()) {
            auto pairs = reference_matrix_pairs(g.d);
            auto [f0, g0] = reference_data(g);
            for (const auto& fam : families) {
                conjugate_pair pair = make_conjugate_pair(fam.base);
                for (const auto& mp : pairs) {
                    std::ostringstream tag;
                    tag << fam.name << ":" << mp.name << ":d" << g.d << "N" << g.N;
                    bellman_context ctx = make_bellman_context(pair, mp.A, mp.B);
                    auto run = verify_embedding(ctx, g, f0, g0);

                    margin_report hom;
                    hom.name = "embedding-homogeneous";
                    hom.samples = 1;
                    hom.tolerance = 0.0;
                    hom.min_margin = run.margin_homogeneous;
                    hom.pass = run.margin_homogeneous > 0.0;
                    detail::push_margin(out, hom, tag.str());

                    margin_report deh;
                    deh.name = "embedding-dehomogenized";
                    deh.samples = 1;
                    deh.tolerance = 0.0;
                    deh.min_margin = run.margin_dehomogenized;
                    deh.pass = run.margin_dehomogenized > 0.0;
                    detail::push_margin(out, deh, tag.str());

                    detail::push_margin(out, run.flow.derivative_margin, tag.str());
                    detail::push_margin(out, run.flow.monotone_margin, tag.str());
                    detail::push_margin(out, run.flow.initial_margin, tag.str());
                }
            }
        }
    }

    return out;
}

}  // namespace orlicz
