#pragma once

#include "hrsim/pullback.hpp"
#include "hrsim/solver.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace hrsim {

/// Shortest text that round-trips the double exactly.
std::string format_number(double x);

/// t, norm_U, norm_V, norm_Z, grad_G, Q. Norms are taken of the transformed
/// state G (direct runs are converted with G = Q g).
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& traj, const WienerPath& path,
                          const HRParameters& p, const SpatialGrid& grid);

/// t, u, v, z; every `stride`-th sample plus the last.
void write_ode_csv(std::ostream& os, const OdeSeries& series, std::size_t stride = 1);

/// t, weighted_energy, grad_term, residual, Q. The residual is empty on rows
/// without a predecessor.
void write_energy_csv(std::ostream& os, const std::vector<EnergyRecord>& rows);

/// t, sup_norm, R0, within_bound.
void write_pullback_csv(std::ostream& os, const PullbackReport& rep);

/// name, value, truncation_T, tail_bound.
void write_bounds_csv(std::ostream& os, const TheoreticalBounds& b,
                      const std::vector<std::pair<std::string, double>>& extra = {});

/// index, t_from, t_to, semidistance.
void write_attractor_csv(std::ostream& os, const AttractorReport& rep);

/// Generic two-column summary: key, value.
void write_summary_csv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& rows);

struct PlotSpec {
    std::string csv;      ///< file name relative to the script
    std::string title;
    int x_column = 1;
    std::vector<std::pair<int, std::string>> y_columns; ///< (column, label)
    bool log_y = false;
};

/// gnuplot script drawing each spec into its own PNG next to the CSVs.
void write_plot_script(std::ostream& os, const std::vector<PlotSpec>& plots);

} // namespace hrsim
