#pragma once

#include "hrsim/energy.hpp"
#include "hrsim/grid.hpp"
#include "hrsim/model.hpp"
#include "hrsim/solver.hpp"
#include "hrsim/stochastic.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hrsim {

/// Evaluated absorbing-set and H1 bounds for one noise path.
///
/// M and the Gronwall factor (N1 + N3) e^{N2} overflow double precision at the
/// classical constants, so both are also kept as natural logarithms; the
/// plain fields hold +inf when they overflow.
struct TheoreticalBounds {
    double r0 = 0.0;
    double R0 = 0.0;
    double R1 = 0.0;
    double K = 0.0;
    double C_omega = 1.0;
    double P0 = 0.0;
    double N1 = 0.0;
    double N2 = 0.0;
    double N3 = 0.0;
    double M = 0.0;
    double ln_M = 0.0;
    double gradient_bound = 0.0;    ///< (N1 + N3) e^{N2}
    double ln_gradient_bound = 0.0;
    double truncation_T = 0.0;
    double quad_dt = 0.0;
    double tail_bound = 0.0;        ///< bound on the truncation error of r0 (same units as r0)
    double tail_tolerance = 0.0;
    double tail_growth_rate = 0.0;  ///< max |w(s)|/|s| on [-T, -T/2]
};

struct BoundsOptions {
    double truncation_T = 6000.0;
    double quad_dt = 0.01;
    double eta = 1.0;
    /// Largest admissible tail_bound, relative to r0.
    double tail_rel_tolerance = 0.1;
};

/// Trapezoid evaluation of r0, R0, R1, C, K, P0, N1-N3 and M. Throws RangeError
/// when the path does not cover [-truncation_T, 0] and DomainError when the
/// truncated tail does not converge (increase truncation_T).
TheoreticalBounds absorbing_bounds(const WienerPath& path, const HRParameters& p,
                                   const SpatialGrid& grid, const BoundsOptions& opts = {});

/// r0 for eps = 0 in closed form; the reference for the quadrature.
double r0_closed_form(const HRParameters& p, const SpatialGrid& grid, double truncation_T,
                      double eta = 1.0);

enum class CocycleForm { Pullback, Forward };

/// Pullback form: Phi(t, theta_{-t} w, g0) = G(0; -t, Q(-t) g0) / Q(0).
/// Forward form: Phi(t, w, g0) = G(t; 0, g0) / Q(t).
/// t = 0 returns g0 unchanged.
StateField cocycle_phi(double t, const WienerPath& path, const StateField& g0, double dt,
                       const HRParameters& p, const SpatialGrid& grid,
                       CocycleForm form = CocycleForm::Pullback, const SolverOptions& opts = {});

struct PullbackOptions {
    SolverOptions solver{.record_energy = false};
    unsigned threads = 1;
    double cauchy_tol = 1e-6;     ///< successive endpoint distance flagged as converged
    bool keep_states = false;
};

struct PullbackReport {
    std::vector<double> pullback_times;
    std::vector<double> endpoint_norms;           ///< sup over samples for ensembles
    std::vector<StateField> endpoint_states;      ///< filled when keep_states is set
    std::vector<double> successive_distances;     ///< |Phi(t_k) - Phi(t_{k-1})|, size n - 1
    double R0_used = 0.0;
    std::optional<double> entry_time;             ///< first t after which all norms <= R0
    bool converged = false;
};

/// Runs the pullback form of the cocycle for each ladder entry.
PullbackReport pullback_quasi_trajectory(const StateField& g0, const std::vector<double>& t_ladder,
                                         const WienerPath& path, double dt, const HRParameters& p,
                                         const SpatialGrid& grid, double R0,
                                         const PullbackOptions& opts = {});

/// Random smooth initial state: a few cosine modes per component, scaled to
/// an L2 norm of `radius`. Deterministic in (seed, index).
StateField sample_initial_state(const SpatialGrid& grid, double radius, std::uint64_t seed,
                                std::size_t index);

struct AbsorbingReport {
    PullbackReport pullback;                 ///< endpoint_norms holds the sup over samples
    std::vector<std::vector<double>> sample_norms; ///< [ladder entry][sample]
    std::vector<double> initial_norms;
    double rho = 0.0;
    std::size_t n_samples = 0;
    bool all_within = true;
    double empirical_sup = 0.0;
    double tail_variation = 0.0;             ///< (max - min) / max of the sup over the ladder tail
};

/// Samples initial states with norm at most rho (uniform radius in [0, rho])
/// and runs the pullback ladder for each. Bound violations are reported, not
/// thrown.
AbsorbingReport verify_absorbing(double rho, std::size_t n_samples,
                                 const std::vector<double>& t_ladder, const WienerPath& path,
                                 double dt, const HRParameters& p, const SpatialGrid& grid,
                                 double R0, std::uint64_t seed, const PullbackOptions& opts = {});

/// The last ceil(n/2) ladder indices.
std::size_t ladder_tail_start(std::size_t n);

/// sup_{a in A} inf_{b in B} |a - b|_{L2}.
double hausdorff_semidistance(const std::vector<StateField>& A, const std::vector<StateField>& B,
                              const SpatialGrid& grid);

struct AttractorOptions {
    PullbackOptions pullback;
    double radius_cap = 10.0;       ///< largest simulable B0 sampling radius
    double decay_rel_tol = 0.05;    ///< slack for "non-increasing" on the ladder tail
    double decay_abs_tol = 1e-12;
};

struct AttractorReport {
    std::vector<double> ladder;
    double R0 = 0.0;
    double radius_used = 0.0;
    bool capped = false;
    std::vector<std::vector<StateField>> images;  ///< [ladder entry][sample]
    /// dist(image_k, image_{k-1}), size n - 1
    std::vector<double> consecutive_distances;
    bool tail_non_increasing = false;  ///< within decay tolerances
    bool tail_strictly_decreasing = false;
    double final_distance = 0.0;
    const std::vector<StateField>& attractor_approximation() const { return images.back(); }
};

AttractorReport attractor_approximation(std::size_t n_samples, const std::vector<double>& t_ladder,
                                        const WienerPath& path, double dt, const HRParameters& p,
                                        const SpatialGrid& grid, double R0, std::uint64_t seed,
                                        const AttractorOptions& opts = {});

/// Energy-inequality rows recomputed from trajectory snapshots; the time
/// derivative is the backward difference over the snapshot spacing. Throws
/// ShapeError when snapshots are not evenly spaced (stride mismatch).
std::vector<EnergyRecord> energy_audit(const TrajectoryRecord& traj, const WienerPath& path,
                                       const HRParameters& p, const SpatialGrid& grid,
                                       double eta = 1.0);

/// Residual tolerance tol(dt) = scale * dt of the discrete audit.
double energy_tolerance(double dt, double scale = 1.0);

struct EnergySummary {
    std::size_t audited = 0;
    std::size_t within = 0;
    double fraction_within = 0.0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    double max_lhs_over_rhs = 0.0;  ///< sharpness of the inequality on this run
};

EnergySummary summarize_energy(const std::vector<EnergyRecord>& rows, double tolerance,
                               const HRParameters& p, const SpatialGrid& grid, double eta = 1.0);

struct H1Report {
    double t_star = 0.0;
    double grad_at_t_star = 0.0;
    double sup_grad_sq = 0.0;           ///< sup of |grad G|^2 over [t* + 1, 0]
    double e_norm_sq_at_0 = 0.0;        ///< |G(0)|^2 + |grad G(0)|^2
    double max_window_integral = 0.0;   ///< max over t in [-2, -1] of int_t^{t+1} |grad G|^2
    double ln_gradient_bound = 0.0;
    double ln_M = 0.0;
    double N1 = 0.0;
    double K = 0.0;
    bool grad_within = true;
    bool e_norm_within = true;
    bool integral_within_N1 = true;
    bool integral_within_K = true;
};

/// Monitors H1 quantities of a transformed trajectory covering [-2, 0] whose
/// energy rows were recorded every step.
H1Report h1_monitor(const TrajectoryRecord& traj, const TheoreticalBounds& bounds);

} // namespace hrsim
