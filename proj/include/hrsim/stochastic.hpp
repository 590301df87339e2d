#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

namespace hrsim {

/// A sampled two-sided Brownian trajectory on a uniform lattice.
///
/// Node k of the stored lattice sits at raw time (k - zero_index) * dt_grid and
/// the node at raw time 0 holds exactly 0. Values between nodes are obtained by
/// linear interpolation, so Hoelder statistics are limited by the lattice.
///
/// A path is an immutable view: shifting produces a new view over the same
/// samples with a different offset, re-based so that it vanishes at 0.
/// Evaluating the view at t returns raw(t + offset) - raw(offset).
class WienerPath {
public:
    /// Sample a path covering at least [t_min, t_max]. The forward and
    /// backward halves draw from independent counter-based streams of `seed`,
    /// so widening the horizon never changes previously generated nodes.
    static WienerPath sample(std::uint64_t seed, double t_min, double t_max, double dt_grid);

    /// Build a path from explicit lattice values (test doubles, imports).
    /// `values[zero_index]` must be 0.
    static WienerPath from_lattice(double dt_grid, std::size_t zero_index,
                                   std::vector<double> values, std::uint64_t seed = 0);

    double evaluate(double t) const;
    WienerPath shifted(double s) const;

    std::uint64_t seed() const noexcept { return seed_; }
    double dt_grid() const noexcept { return dt_grid_; }
    double shift_offset() const noexcept { return offset_; }

    /// Horizon in the coordinates of this view.
    double t_min() const noexcept;
    double t_max() const noexcept;
    bool covers(double t) const noexcept;

    /// Lattice nodes of this view: times (view coordinates) and re-based values.
    std::size_t node_count() const noexcept { return values_->size(); }
    double node_time(std::size_t k) const noexcept;
    double node_value(std::size_t k) const;

    /// Raw stored samples (unshifted, not re-based).
    std::span<const double> raw_values() const noexcept { return *values_; }
    std::size_t zero_index() const noexcept { return zero_index_; }

private:
    WienerPath(std::uint64_t seed, double dt_grid, std::size_t zero_index,
               std::shared_ptr<const std::vector<double>> values, double offset);

    double raw(double t) const;

    std::uint64_t seed_ = 0;
    double dt_grid_ = 1.0;
    std::size_t zero_index_ = 0;
    std::shared_ptr<const std::vector<double>> values_;
    double offset_ = 0.0;
    double base_ = 0.0; // raw(offset_)
};

struct ScalarSDEResult {
    std::vector<double> times;
    std::vector<double> numeric;
    std::vector<double> exact;
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
};

WienerPath sample_path(std::uint64_t seed, double t_min, double t_max, double dt_grid);
double evaluate(const WienerPath& path, double t);
WienerPath shift(const WienerPath& path, double s);

/// Q(t, w) = exp(-eps * W(t)), the exponential weight of the transform.
double q_weight(const WienerPath& path, double eps, double t);

/// max |W(t)| / |t| over lattice nodes with |t| >= t_tail.
double sublinear_growth_stat(const WienerPath& path, double t_tail);

/// Same statistic restricted to nodes with t in [t_from, t_to].
double growth_rate_on(const WienerPath& path, double t_from, double t_to);

/// sup over lattice pairs s < t in [n, n + 1] of |W(t) - W(s)| / |t - s|^gamma.
double holder_quotient(const WienerPath& path, double gamma, double window_start);

/// Heun (Stratonovich) integration of dX = -lambda X o dW from X(0) = 1,
/// compared node by node against the exact solution exp(-lambda W(t)).
ScalarSDEResult integrate_exact_sde(const WienerPath& path, double lambda, double t_end, double dt);

/// CSV export (t, W) at lattice resolution with seed and horizon in the header.
void write_path_csv(std::ostream& os, const WienerPath& path);

} // namespace hrsim
