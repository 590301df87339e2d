#pragma once

#include "hrsim/energy.hpp"
#include "hrsim/grid.hpp"
#include "hrsim/model.hpp"
#include "hrsim/stochastic.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hrsim {

enum class Scheme { TransformedImex, DirectStratonovich, OdeRk4 };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SolverOptions {
    double cg_tol = 1e-10;            ///< relative residual of the implicit diffusion solve
    std::size_t cg_iter_factor = 10;  ///< iteration cap = factor * n_cells
    std::size_t stride = 1;           ///< snapshot every `stride` steps (plus first and last)
    bool record_energy = true;
    double eta = 1.0;
};

/// Snapshots and per-step energy rows of one run. Energy rows are indexed by
/// step; row 0 describes the initial state and has no residual.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<StateField> states;
    std::vector<EnergyRecord> energy_rows;
    Scheme scheme = Scheme::TransformedImex;
    double dt = 0.0;
    std::uint64_t path_seed = 0;
    std::size_t steps = 0;
    std::size_t max_cg_iterations = 0;

    const StateField& final_state() const { return states.back(); }
    double final_time() const { return times.back(); }
};

/// Result of the implicit solve (I - coeff * Laplacian) x = b.
struct CgStats {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

/// Conjugate gradients on the symmetric positive definite operator
/// I - coeff * Laplacian (coeff >= 0). `x` holds the initial guess on entry.
/// Throws NumericalError (at time `t`) when the iteration cap is reached.
CgStats solve_implicit_diffusion(std::span<const double> b, double coeff, const SpatialGrid& grid,
                                 std::span<double> x, double tol, std::size_t max_iter, double t);

/// Number of steps used to cover [t0, t1] with step dt; the last step is
/// shortened so that the run lands exactly on t1.
std::size_t step_count(double t0, double t1, double dt);

/// One IMEX step of the transformed random system: explicit reaction with
/// Q evaluated at the left endpoint t, implicit backward-Euler diffusion.
StateField step_transformed(const StateField& G, double t, double dt, const WienerPath& path,
                            const HRParameters& p, const SpatialGrid& grid,
                            const SolverOptions& opts = {});

/// Iterates step_transformed from G_tau at tau to t_end.
TrajectoryRecord solve_transformed(const StateField& G_tau, double tau, double t_end, double dt,
                                   const WienerPath& path, const HRParameters& p,
                                   const SpatialGrid& grid, const SolverOptions& opts = {});

/// Integrates the original equation dg = (Ag + f(g)) dt + eps g o dW with a
/// Heun predictor-corrector on the Stratonovich noise, explicit reaction and
/// implicit diffusion. Energy rows are recorded for G = Q g.
TrajectoryRecord solve_direct_spde(const StateField& g0, double t0, double t_end, double dt,
                                   const WienerPath& path, const HRParameters& p,
                                   const SpatialGrid& grid, const SolverOptions& opts = {});

struct OdeSeries {
    std::vector<double> t;
    std::vector<double> u;
    std::vector<double> v;
    std::vector<double> z;
};

/// Classical RK4 on the three-variable model with J replaced by J_override.
OdeSeries ode_trajectory(const Triple& x0, const HRParameters& p, double J_override, double T,
                         double dt);

/// RK4 on the spatially constant reduction of the random system,
/// dG/dt = F(G, Q(t)) with Q frozen over each step at its left endpoint.
/// Shares no code with the PDE stepper; used as an oracle.
std::vector<Triple> random_ode_reference(const Triple& G0, double tau, double t_end, double dt,
                                         const WienerPath& path, const HRParameters& p);

struct RegimeThresholds {
    double u_threshold = 0.0;     ///< upward crossing level of u
    double tonic_cv_max = 0.05;   ///< ISI coefficient of variation below which spiking is tonic
    double chaotic_cv_min = 0.5;  ///< ISI CV above which bursting counts as irregular
    double burst_gap_ratio = 3.0; ///< inter/intra-burst ISI ratio required for bimodality
    double burst_repeat_cv = 0.05; ///< burst sizes and periods this regular count as periodic

    bool operator==(const RegimeThresholds&) const = default;
};

struct RegimeReport {
    std::size_t spike_count = 0;
    std::vector<double> spike_times;
    std::vector<double> isi;
    double isi_mean = 0.0;
    double isi_cv = 0.0;
    bool bimodal = false;
    double burst_size_cv = 0.0;
    double burst_period_cv = 0.0; ///< CV of the inter-burst (long) intervals
    std::string label;
};

/// Threshold-crossing spike detection and ISI statistics after `transient_cut`.
/// Labels: resting, tonic-spiking, regular-bursting, chaotic-bursting,
/// irregular-spiking. Bimodal ISI trains whose burst sizes and periods repeat
/// are regular bursting whatever their ISI CV; chaotic bursting needs both an
/// ISI CV of at least chaotic_cv_min and a non-repeating burst pattern.
RegimeReport classify_regime(const OdeSeries& series, double transient_cut,
                             const RegimeThresholds& thresholds = {});

} // namespace hrsim
