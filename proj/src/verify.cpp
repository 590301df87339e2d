#include "hrsim/verify.hpp"

#include "hrsim/errors.hpp"
#include "hrsim/parallel.hpp"
#include "hrsim/pullback.hpp"
#include "hrsim/report_io.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace hrsim {

namespace {

using Check = std::function<CheckResult()>;

CheckResult result(std::string name, bool ok, const std::string& detail) {
    return {std::move(name), ok, detail};
}

std::string num(double x) {
    return format_number(x);
}

} // namespace

std::vector<CheckResult> run_property_checks(const RunConfig& cfg) {
    const std::uint64_t seed = cfg.seed;
    const SpatialGrid grid = SpatialGrid::box(1, 32, 1.0);
    const HRParameters typical = preset("paper-typical");

    std::vector<Check> checks = {
        [&] {
            const auto path = sample_path(seed, -10, 10, 1e-3);
            const auto again = sample_path(seed, -10, 10, 1e-3);
            const bool ok = path.evaluate(0.0) == 0.0 &&
                            std::equal(path.raw_values().begin(), path.raw_values().end(),
                                       again.raw_values().begin());
            return result("path: W(0) = 0 and reproducible", ok, "");
        },
        [&] {
            const auto path = sample_path(seed, 0, 100, 1e-3);
            double ss = 0.0;
            const std::size_t n = path.node_count() - 1;
            for (std::size_t k = 0; k < n; ++k) {
                const double d = path.node_value(k + 1) - path.node_value(k);
                ss += d * d;
            }
            const double ratio = ss / static_cast<double>(n) / 1e-3;
            return result("path: increment variance matches dt", std::abs(ratio - 1.0) < 0.05,
                          "variance/dt = " + num(ratio));
        },
        [&] {
            const auto path = sample_path(seed, 0, 1, 1e-4);
            const auto r = integrate_exact_sde(path, 1.0, 1.0, 1e-4);
            return result("sde: Heun matches exp(-W)", r.max_rel_error < 1e-2,
                          "max relative error = " + num(r.max_rel_error));
        },
        [&] {
            const auto ones = ScalarField(grid.size(), 3.5);
            const auto lap = neumann_laplacian(ones, grid);
            double mx = 0.0;
            for (double x : lap) mx = std::max(mx, std::abs(x));
            return result("grid: Laplacian annihilates constants", mx == 0.0, "max = " + num(mx));
        },
        [&] {
            ScalarField f(grid.size()), g(grid.size());
            for (std::size_t i = 0; i < f.size(); ++i) {
                const double x = grid.coordinate(i, 0);
                f[i] = std::sin(3.0 * x) + x * x;
                g[i] = std::cos(5.0 * x) - x;
            }
            const double lhs = inner(neumann_laplacian(f, grid), g, grid);
            const double rhs = inner(f, neumann_laplacian(g, grid), grid);
            const double self = inner(neumann_laplacian(f, grid), f, grid);
            const bool ok = std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs)) && self <= 1e-10;
            return result("grid: Laplacian self-adjoint and nonpositive", ok,
                          "asymmetry = " + num(std::abs(lhs - rhs)) + ", <Lf,f> = " + num(self));
        },
        [&] {
            const Triple g{0.7, -1.3, 0.4};
            const double Q = 1.7;
            const Triple lhs = random_reaction({Q * g[0], Q * g[1], Q * g[2]}, Q, typical);
            const Triple rhs = reaction(g, typical);
            double err = 0.0;
            for (int i = 0; i < 3; ++i) err = std::max(err, std::abs(lhs[i] - Q * rhs[i]));
            return result("model: transform identity F(Qg, Q) = Q f(g)", err < 1e-12,
                          "max error = " + num(err));
        },
        [&] {
            HRParameters p = typical;
            p.eps = 0.0;
            const auto path = sample_path(seed, -1, 2, 1e-3);
            const StateField g0 = sample_initial_state(grid, 1.0, seed, 0);
            SolverOptions o;
            o.record_energy = false;
            o.cg_tol = 1e-12;
            const auto a = solve_direct_spde(g0, 0, 1, 1e-3, path, p, grid, o);
            const auto b = solve_transformed(g0, 0, 1, 1e-3, path, p, grid, o);
            const double d = l2_norm(a.final_state() - b.final_state(), grid);
            // Same arithmetic up to operation order; only rounding and CG residuals differ.
            const double tol = 1e-10 * (1.0 + l2_norm(g0, grid));
            return result("solver: eps = 0 direct and transformed agree", d < tol,
                          "difference = " + num(d));
        },
        [&] {
            HRParameters p = typical;
            const auto path = sample_path(seed, -1, 2, 1e-3);
            const StateField g0 = StateField::constant(grid, 0.3, -0.5, 0.2);
            SolverOptions o;
            o.record_energy = false;
            // The IMEX step is first order, so the RK4 oracle is run at the same small dt.
            const auto rec = solve_transformed(g0, 0.0, 1.0, 1e-4, path, p, grid, o);
            const auto ref = random_ode_reference({0.3, -0.5, 0.2}, 0.0, 1.0, 1e-4, path, p);
            const auto& G = rec.final_state();
            double spread = 0.0;
            for (std::size_t i = 0; i < G.U.size(); ++i) spread = std::max(spread, std::abs(G.U[i] - G.U[0]));
            const double err = std::abs(G.U[0] - ref.back()[0]) + std::abs(G.V[0] - ref.back()[1]) +
                               std::abs(G.Z[0] - ref.back()[2]);
            return result("solver: homogeneous data follow the random ODE",
                          spread < 1e-12 && err < 1e-2,
                          "spread = " + num(spread) + ", |G - ode| = " + num(err));
        },
        [&] {
            const auto path = sample_path(seed, -1, 4, 1e-3);
            const StateField g0 = sample_initial_state(grid, 5.0, seed, 1);
            SolverOptions o;
            o.record_energy = false;
            o.cg_tol = 1e-12;
            const double s = 1.0;
            const double t = 2.0;
            const auto one = cocycle_phi(t + s, path, g0, 1e-3, typical, grid, CocycleForm::Forward, o);
            const auto mid = cocycle_phi(s, path, g0, 1e-3, typical, grid, CocycleForm::Forward, o);
            const auto two =
                cocycle_phi(t, path.shifted(s), mid, 1e-3, typical, grid, CocycleForm::Forward, o);
            const double d = l2_norm(one - two, grid);
            const double tol = 1e-10 * (1.0 + l2_norm(g0, grid));
            const bool id = cocycle_phi(0.0, path, g0, 1e-3, typical, grid) == g0;
            return result("pullback: cocycle identity and Phi(0) = id", d <= tol && id,
                          "difference = " + num(d) + " (tolerance " + num(tol) + ")");
        },
        [&] {
            HRParameters p = typical;
            p.eps = 0.0;
            const auto path = sample_path(seed, -2000, 0, 0.01);
            BoundsOptions bo;
            bo.truncation_T = 2000;
            const auto b = absorbing_bounds(path, p, grid, bo);
            const double ref = r0_closed_form(p, grid, 2000);
            const double rel = std::abs(b.r0 / ref - 1.0);
            return result("bounds: eps = 0 r0 matches closed form", rel < 1e-8,
                          "relative difference = " + num(rel));
        },
        [&] {
            const std::vector<StateField> A{StateField::zeros(grid)};
            const std::vector<StateField> B{StateField::constant(grid, 1, 1, 1), StateField::zeros(grid)};
            const std::vector<StateField> C{StateField::constant(grid, 1, 1, 1)};
            const bool ok = hausdorff_semidistance(A, A, grid) == 0.0 &&
                            hausdorff_semidistance(A, B, grid) == 0.0 &&
                            std::abs(hausdorff_semidistance(A, C, grid) - std::sqrt(3.0)) < 1e-12;
            return result("pullback: Hausdorff semi-distance basics", ok, "");
        },
        [&] {
            std::istringstream in(serialize_config(cfg));
            const RunConfig back = parse_config(in);
            return result("cli: config round trip", back == cfg, "");
        },
    };

    // The checks are independent; each result depends only on its index.
    return parallel_map(checks.size(), cfg.threads, [&](std::size_t i) {
        try {
            return checks[i]();
        } catch (const std::exception& e) {
            return result("check " + std::to_string(i), false, std::string("threw: ") + e.what());
        }
    });
}

} // namespace hrsim
