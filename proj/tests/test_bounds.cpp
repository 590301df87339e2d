#include "hrsim/errors.hpp"
#include "hrsim/pullback.hpp"

#include <doctest.h>

#include <cmath>

using namespace hrsim;

namespace {

const SpatialGrid kGrid = SpatialGrid::box(1, 32, 1.0);

BoundsOptions with_T(double T) {
    BoundsOptions b;
    b.truncation_T = T;
    return b;
}

// Independent oracle for eps = 0: integral of e^{sigma (1 + s)} over [-T, -1].
double r0_oracle(const HRParameters& p, double T) {
    const double c1 = (p.beta * p.beta + 3) / p.b;
    const double r = p.r, q = p.q, c = p.c;
    const double br = c1 * c1 * (2.5 + 1 / r) + q * q / r;
    const double c2 = 0.5 * p.J * p.J + br * br + 2 * p.alpha * p.alpha + q * q * c * c / r;
    const double sigma = 0.5 * std::min(1.0, r);
    const double bracket = 2 * c2 + c1 * c1 / 32 + 2 * std::pow(c1 * p.a, 4);
    const double integral = (1 - std::exp(-sigma * (T - 1))) / sigma;
    return std::sqrt(1 + kGrid.measure() / std::min(c1, 1.0) * bracket * integral);
}

} // namespace

TEST_CASE("eps = 0: quadrature matches the closed form") {
    HRParameters p = preset("paper-typical");
    p.eps = 0.0;
    const auto path = sample_path(1, -2000, 0, 0.01);
    const auto b = absorbing_bounds(path, p, kGrid, with_T(2000));
    const double ref = r0_closed_form(p, kGrid, 2000);
    CHECK(std::abs(b.r0 / ref - 1) < 1e-8);
    CHECK(std::abs(ref / r0_oracle(p, 2000) - 1) < 1e-12);
    CHECK(b.C_omega == 1.0);
    CHECK(b.tail_growth_rate == 0.0);
}

TEST_CASE("bounds are ordered and finite where representable") {
    const HRParameters p = preset("paper-typical");
    const auto path = sample_path(42, -3000, 0, 1e-2);
    const auto b = absorbing_bounds(path, p, kGrid, with_T(3000));
    for (double x : {b.r0, b.R0, b.R1, b.K, b.C_omega, b.P0, b.N1, b.N2, b.N3}) {
        CHECK(std::isfinite(x));
        CHECK(x >= 0.0);
    }
    CHECK(b.r0 > 1.0);
    CHECK(b.R0 > b.r0);
    CHECK(b.C_omega >= 1.0);
    CHECK(b.tail_bound >= 0.0);
    CHECK(b.tail_bound < b.tail_tolerance);
    CHECK(b.truncation_T == 3000);
    CHECK(std::isfinite(b.ln_M));
    CHECK(b.ln_M >= b.ln_gradient_bound);
    CHECK(b.ln_M >= std::log(b.P0));
    if (std::isfinite(b.M)) CHECK(std::log(b.M) == doctest::Approx(b.ln_M));
}

TEST_CASE("C(w) is the exponential of the sup over [-2, 0]") {
    const HRParameters p = preset("paper-typical");
    const auto path = sample_path(9, -3000, 0, 1e-2);
    const auto b = absorbing_bounds(path, p, kGrid, with_T(3000));
    double sup = 0.0;
    for (double t = -2.0; t <= 1e-12; t += 1e-2) sup = std::max(sup, std::abs(path.evaluate(t)));
    CHECK(b.C_omega == doctest::Approx(std::exp(p.eps * sup)).epsilon(1e-12));
}

TEST_CASE("doubling the truncation moves r0 by less than the tail bound") {
    const HRParameters p = preset("paper-typical");
    const auto path = sample_path(42, -8000, 0, 1e-2);
    const auto a = absorbing_bounds(path, p, kGrid, with_T(4000));
    const auto b = absorbing_bounds(path, p, kGrid, with_T(8000));
    CHECK(std::abs(b.r0 - a.r0) < a.tail_bound);
}

TEST_CASE("bounds errors") {
    const HRParameters p = preset("paper-typical");
    const auto short_path = sample_path(1, -100, 0, 1e-2);
    CHECK_THROWS_AS(absorbing_bounds(short_path, p, kGrid, with_T(200)), RangeError);
    // a short truncation leaves a tail far above tolerance
    CHECK_THROWS_AS(absorbing_bounds(short_path, p, kGrid, with_T(50)), DomainError);
    BoundsOptions bad = with_T(50);
    bad.quad_dt = 0.0;
    CHECK_THROWS_AS(absorbing_bounds(short_path, p, kGrid, bad), Error);
}

TEST_CASE("energy audit of the zero state is minus the forcing") {
    const HRParameters p = preset("paper-typical");
    const auto path = sample_path(3, 0, 1, 1e-3);
    TrajectoryRecord traj;
    traj.dt = 0.1;
    for (int k = 0; k <= 3; ++k) {
        traj.times.push_back(0.1 * k);
        traj.states.push_back(StateField::zeros(kGrid));
    }
    const auto rows = energy_audit(traj, path, p, kGrid);
    REQUIRE(rows.size() == 4);
    const DerivedConstants k = derived_constants(p);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double Q = rows[i].q_t;
        const double expected = -(k.q2_coeff() * Q * Q * kGrid.measure() +
                                  2 * std::pow(k.c1 * p.a, 4) * std::pow(Q, 4) * kGrid.measure());
        CHECK(rows[i].ineq_residual == doctest::Approx(expected).epsilon(1e-12));
        CHECK(rows[i].ineq_residual == doctest::Approx(-energy_forcing(Q, p, k, kGrid)).epsilon(1e-12));
    }
    CHECK_FALSE(rows[0].has_residual);

    traj.times[2] = 0.25;
    CHECK_THROWS_AS(energy_audit(traj, path, p, kGrid), ShapeError);
}

TEST_CASE("energy audit at a steady state") {
    HRParameters p = preset("paper-typical");
    p.eps = 0.0;
    double u = -1.5;
    for (int it = 0; it < 100; ++it) {
        const double g = p.a * u * u - p.b * u * u * u + p.alpha - p.beta * u * u - p.q * (u - p.c) / p.r + p.J;
        const double dg = 2 * p.a * u - 3 * p.b * u * u - 2 * p.beta * u - p.q / p.r;
        u -= g / dg;
    }
    const auto e = StateField::constant(kGrid, u, p.alpha - p.beta * u * u, p.q * (u - p.c) / p.r);
    const auto path = sample_path(3, 0, 1, 1e-3);
    const auto traj = solve_transformed(e, 0, 0.5, 1e-3, path, p, kGrid);
    const auto rows = energy_audit(traj, path, p, kGrid);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double deriv = (rows[i].weighted_energy - rows[i - 1].weighted_energy) / 1e-3;
        CHECK(std::abs(deriv) < 1e-6);
        CHECK(rows[i].ineq_residual < 0.0);
    }
}

TEST_CASE("energy tolerance and summary") {
    CHECK(energy_tolerance(1e-3) == 1e-3);
    CHECK(energy_tolerance(5e-4) == energy_tolerance(1e-3) / 2);
    CHECK(energy_tolerance(1e-3, 4.0) == 4e-3);

    const HRParameters p = preset("paper-typical");
    const auto path = sample_path(3, 0, 1, 1e-3);
    const auto traj = solve_transformed(sample_initial_state(kGrid, 5, 3, 0), 0, 0.2, 1e-3, path, p, kGrid);
    const auto s = summarize_energy(traj.energy_rows, energy_tolerance(1e-3), p, kGrid);
    CHECK(s.audited == 200);
    CHECK(s.within == 200);
    CHECK(s.fraction_within == 1.0);
    CHECK(s.max_residual < 0.0);
    CHECK(s.max_lhs_over_rhs < 1.0);

    // the audit from snapshots reproduces the per-step rows
    const auto rows = energy_audit(traj, path, p, kGrid);
    REQUIRE(rows.size() == traj.energy_rows.size());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].ineq_residual == doctest::Approx(traj.energy_rows[i].ineq_residual).epsilon(1e-12));
    }
}

TEST_CASE("direct-scheme snapshots are audited in transformed variables") {
    HRParameters p = preset("paper-typical");
    p.eps = 0.5;
    const auto path = sample_path(4, 0, 1, 1e-3);
    const auto traj = solve_direct_spde(sample_initial_state(kGrid, 2, 4, 0), 0, 0.1, 1e-3, path, p, kGrid);
    const auto rows = energy_audit(traj, path, p, kGrid);
    const double Q = q_weight(path, p.eps, 0.1);
    CHECK(rows.back().weighted_energy ==
          doctest::Approx(traj.energy_rows.back().weighted_energy).epsilon(1e-12));
    CHECK(rows.back().q_t == doctest::Approx(Q));
}

TEST_CASE("H1 monitor") {
    const HRParameters p = preset("paper-typical");
    const auto path = sample_path(42, -3000, 0, 1e-2);
    const auto bounds = absorbing_bounds(path, p, kGrid, with_T(3000));

    const auto zero = solve_transformed(StateField::zeros(kGrid), -2, 0, 1e-2,
                                        sample_path(1, -3, 0, 1e-2), preset("dissipative"), kGrid);
    const H1Report z = h1_monitor(zero, bounds);
    CHECK(z.sup_grad_sq == 0.0);
    CHECK(z.max_window_integral == 0.0);
    CHECK(z.e_norm_sq_at_0 == 0.0);
    CHECK(z.grad_within);
    CHECK(z.e_norm_within);
    CHECK(z.integral_within_N1);

    const auto run = solve_transformed(sample_initial_state(kGrid, 5, 42, 0), -3, 0, 1e-3, path, p, kGrid);
    const H1Report h = h1_monitor(run, bounds);
    CHECK(h.t_star >= -2.0 - 1e-9);
    CHECK(h.t_star <= -1.0 + 1e-9);
    CHECK(h.sup_grad_sq > 0.0);
    CHECK(h.max_window_integral > 0.0);
    CHECK(h.grad_within);
    CHECK(h.e_norm_within);
    CHECK(h.integral_within_N1);
    CHECK(h.integral_within_K);

    const auto short_run = solve_transformed(StateField::zeros(kGrid), -1, 0, 1e-2, path, p, kGrid);
    CHECK_THROWS_AS(h1_monitor(short_run, bounds), RangeError);
}
