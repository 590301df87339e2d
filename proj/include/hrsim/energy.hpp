#pragma once

#include "hrsim/grid.hpp"
#include "hrsim/model.hpp"

namespace hrsim {

/// One audited time of the weighted energy inequality
///   d/dt E + 2d (c1|grad U|^2 + |grad V|^2 + |grad Z|^2) + (c1|U|^2 + |V|^2 + r|Z|^2)/2
///     <= (2 c2 + c1^2/32) Q^2 |Omega| + 2 (c1 a)^4 Q^4 |Omega|
/// with E = c1|U|^2 + |V|^2 + |Z|^2. `ineq_residual` is LHS - RHS, with the time
/// derivative taken as a backward difference.
struct EnergyRecord {
    double t = 0.0;
    double l2_U2 = 0.0;
    double l2_V2 = 0.0;
    double l2_Z2 = 0.0;
    double weighted_energy = 0.0;
    double grad_G2 = 0.0;     ///< |grad U|^2 + |grad V|^2 + |grad Z|^2 (unweighted)
    double grad_term = 0.0;   ///< 2d (c1|grad U|^2 + |grad V|^2 + |grad Z|^2)
    double l4_U4 = 0.0;
    double q_t = 1.0;
    double ineq_residual = 0.0;
    bool has_residual = false; ///< false for the first row of a run
};

/// Norm part of a record (everything except the residual).
EnergyRecord measure_energy(const StateField& G, double t, double Q, const HRParameters& p,
                            const DerivedConstants& k, const SpatialGrid& grid);

/// Fills `rec.ineq_residual` from the backward difference against `prev_weighted`
/// over `dt`.
void complete_residual(EnergyRecord& rec, double prev_weighted, double dt, const HRParameters& p,
                       const DerivedConstants& k, const SpatialGrid& grid);

/// Right-hand side forcing of the inequality at weight Q.
double energy_forcing(double Q, const HRParameters& p, const DerivedConstants& k,
                      const SpatialGrid& grid);

} // namespace hrsim
