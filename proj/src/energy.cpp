#include "hrsim/energy.hpp"

#include <cmath>

namespace hrsim {

EnergyRecord measure_energy(const StateField& G, double t, double Q, const HRParameters& p,
                            const DerivedConstants& k, const SpatialGrid& grid) {
    EnergyRecord rec;
    rec.t = t;
    rec.q_t = Q;
    rec.l2_U2 = inner(G.U, G.U, grid);
    rec.l2_V2 = inner(G.V, G.V, grid);
    rec.l2_Z2 = inner(G.Z, G.Z, grid);
    rec.weighted_energy = k.c1 * rec.l2_U2 + rec.l2_V2 + rec.l2_Z2;
    const double gu = h1_seminorm_sq(std::span<const double>(G.U), grid);
    const double gv = h1_seminorm_sq(std::span<const double>(G.V), grid);
    const double gz = h1_seminorm_sq(std::span<const double>(G.Z), grid);
    rec.grad_G2 = gu + gv + gz;
    rec.grad_term = 2.0 * k.d * (k.c1 * gu + gv + gz);
    const double l4 = l4_norm(G.U, grid);
    rec.l4_U4 = l4 * l4 * l4 * l4;
    (void)p;
    return rec;
}

double energy_forcing(double Q, const HRParameters& p, const DerivedConstants& k,
                      const SpatialGrid& grid) {
    const double q2 = Q * Q;
    const double c1a = k.c1 * p.a;
    const double c1a2 = c1a * c1a;
    return k.q2_coeff() * q2 * grid.measure() + 2.0 * c1a2 * c1a2 * q2 * q2 * grid.measure();
}

void complete_residual(EnergyRecord& rec, double prev_weighted, double dt, const HRParameters& p,
                       const DerivedConstants& k, const SpatialGrid& grid) {
    const double ddt = (rec.weighted_energy - prev_weighted) / dt;
    const double damping = 0.5 * (k.c1 * rec.l2_U2 + rec.l2_V2 + p.r * rec.l2_Z2);
    rec.ineq_residual = ddt + rec.grad_term + damping - energy_forcing(rec.q_t, p, k, grid);
    rec.has_residual = true;
}

} // namespace hrsim
