#include "hrsim/pullback.hpp"

#include "hrsim/errors.hpp"
#include "hrsim/parallel.hpp"
#include "hrsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace hrsim {

StateField cocycle_phi(double t, const WienerPath& path, const StateField& g0, double dt,
                       const HRParameters& p, const SpatialGrid& grid, CocycleForm form,
                       const SolverOptions& opts) {
    if (!(t >= 0.0)) {
        throw DomainError("cocycle_phi: t must be nonnegative");
    }
    check_conforms(g0, grid);
    if (t == 0.0) {
        return g0;
    }
    SolverOptions run_opts = opts;
    run_opts.stride = std::numeric_limits<std::size_t>::max(); // keep first and last only

    if (form == CocycleForm::Pullback) {
        const StateField G_tau = q_weight(path, p.eps, -t) * g0;
        const TrajectoryRecord rec = solve_transformed(G_tau, -t, 0.0, dt, path, p, grid, run_opts);
        return (1.0 / q_weight(path, p.eps, 0.0)) * rec.final_state();
    }
    const StateField G0 = q_weight(path, p.eps, 0.0) * g0;
    const TrajectoryRecord rec = solve_transformed(G0, 0.0, t, dt, path, p, grid, run_opts);
    return (1.0 / q_weight(path, p.eps, t)) * rec.final_state();
}

namespace {

void check_ladder(const std::vector<double>& ladder) {
    if (ladder.empty()) {
        throw DomainError("pullback ladder is empty");
    }
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] >= 0.0)) {
            throw DomainError("pullback ladder entries must be nonnegative");
        }
        if (i > 0 && ladder[i] < ladder[i - 1]) {
            throw DomainError("pullback ladder must be nondecreasing");
        }
    }
}

std::optional<double> entry_time_of(const std::vector<double>& times,
                                    const std::vector<double>& norms, double R0) {
    std::optional<double> entry;
    for (std::size_t i = norms.size(); i-- > 0;) {
        if (!(norms[i] <= R0)) {
            break;
        }
        entry = times[i];
    }
    return entry;
}

// Runs every (ladder entry, sample) pair as an independent task.
std::vector<std::vector<StateField>> pullback_images(const std::vector<StateField>& samples,
                                                     const std::vector<double>& ladder,
                                                     const WienerPath& path, double dt,
                                                     const HRParameters& p,
                                                     const SpatialGrid& grid,
                                                     const PullbackOptions& opts) {
    const std::size_t ns = samples.size();
    auto flat = parallel_map(ladder.size() * ns, opts.threads, [&](std::size_t task) {
        const std::size_t li = task / ns;
        const std::size_t si = task % ns;
        try {
            return cocycle_phi(ladder[li], path, samples[si], dt, p, grid, CocycleForm::Pullback,
                               opts.solver);
        } catch (const NumericalError& e) {
            throw NumericalError(e.detail() + " at ladder entry t = " +
                                     std::to_string(ladder[li]),
                                 e.time());
        }
    });
    std::vector<std::vector<StateField>> images(ladder.size());
    for (std::size_t li = 0; li < ladder.size(); ++li) {
        images[li].assign(std::make_move_iterator(flat.begin() + li * ns),
                          std::make_move_iterator(flat.begin() + (li + 1) * ns));
    }
    return images;
}

double tail_variation_of(const std::vector<double>& v) {
    if (v.empty()) {
        return 0.0;
    }
    const auto start = v.begin() + static_cast<std::ptrdiff_t>(ladder_tail_start(v.size()));
    const auto [lo, hi] = std::minmax_element(start, v.end());
    return *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
}

} // namespace

std::size_t ladder_tail_start(std::size_t n) {
    return n / 2;
}

PullbackReport pullback_quasi_trajectory(const StateField& g0, const std::vector<double>& t_ladder,
                                         const WienerPath& path, double dt, const HRParameters& p,
                                         const SpatialGrid& grid, double R0,
                                         const PullbackOptions& opts) {
    check_ladder(t_ladder);
    check_conforms(g0, grid);
    if (!path.covers(-t_ladder.back())) {
        throw RangeError("pullback ladder reaches t = -" + std::to_string(t_ladder.back()) +
                         " outside the noise horizon; resample with a wider horizon");
    }
    auto images = pullback_images({g0}, t_ladder, path, dt, p, grid, opts);

    PullbackReport rep;
    rep.pullback_times = t_ladder;
    rep.R0_used = R0;
    for (std::size_t i = 0; i < images.size(); ++i) {
        const StateField& end = images[i].front();
        rep.endpoint_norms.push_back(l2_norm(end, grid));
        if (i > 0) {
            rep.successive_distances.push_back(l2_norm(end - images[i - 1].front(), grid));
        }
    }
    rep.converged = !rep.successive_distances.empty() &&
                    rep.successive_distances.back() < opts.cauchy_tol;
    rep.entry_time = entry_time_of(rep.pullback_times, rep.endpoint_norms, R0);
    if (opts.keep_states) {
        for (auto& img : images) {
            rep.endpoint_states.push_back(std::move(img.front()));
        }
    }
    return rep;
}

StateField sample_initial_state(const SpatialGrid& grid, double radius, std::uint64_t seed,
                                std::size_t index) {
    if (!(radius >= 0.0)) {
        throw DomainError("sample radius must be nonnegative");
    }
    constexpr int kTerms = 4;
    constexpr int kMaxMode = 3;
    const std::uint64_t stream = rng::kSampleStreamBase + index;
    StateField f = StateField::zeros(grid);
    std::uint64_t counter = 1; // counter 0 is reserved for the radius draw
    for (int c = 0; c < 3; ++c) {
        auto& comp = f.component(c);
        for (int term = 0; term < kTerms; ++term) {
            const double coeff = rng::normal(seed, stream, counter++);
            std::array<int, 3> mode{0, 0, 0};
            for (int ax = 0; ax < grid.dim(); ++ax) {
                mode[ax] = static_cast<int>(rng::uniform(seed, stream, counter++) * (kMaxMode + 1));
            }
            for (std::size_t i = 0; i < comp.size(); ++i) {
                double v = coeff;
                for (int ax = 0; ax < grid.dim(); ++ax) {
                    v *= std::cos(mode[ax] * std::numbers::pi * grid.coordinate(i, ax) /
                                  grid.extent(ax));
                }
                comp[i] += v;
            }
        }
    }
    const double norm = l2_norm(f, grid);
    return norm > 0.0 ? (radius / norm) * f : StateField::zeros(grid);
}

namespace {

std::vector<StateField> ball_samples(const SpatialGrid& grid, double rho, std::size_t n,
                                     std::uint64_t seed) {
    if (!(rho >= 0.0)) {
        throw DomainError("sampling radius must be nonnegative");
    }
    if (rho == 0.0) {
        return {StateField::zeros(grid)};
    }
    if (n == 0) {
        throw DomainError("at least one initial sample is required");
    }
    std::vector<StateField> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double radius = rho * rng::uniform(seed, rng::kSampleStreamBase + i, 0);
        samples.push_back(sample_initial_state(grid, radius, seed, i));
    }
    return samples;
}

} // namespace

AbsorbingReport verify_absorbing(double rho, std::size_t n_samples,
                                 const std::vector<double>& t_ladder, const WienerPath& path,
                                 double dt, const HRParameters& p, const SpatialGrid& grid,
                                 double R0, std::uint64_t seed, const PullbackOptions& opts) {
    check_ladder(t_ladder);
    if (!path.covers(-t_ladder.back())) {
        throw RangeError("pullback ladder outside the noise horizon; resample with a wider horizon");
    }
    const auto samples = ball_samples(grid, rho, n_samples, seed);
    auto images = pullback_images(samples, t_ladder, path, dt, p, grid, opts);

    AbsorbingReport rep;
    rep.rho = rho;
    rep.n_samples = samples.size();
    for (const auto& s : samples) {
        rep.initial_norms.push_back(l2_norm(s, grid));
    }
    rep.pullback.pullback_times = t_ladder;
    rep.pullback.R0_used = R0;
    for (std::size_t li = 0; li < images.size(); ++li) {
        std::vector<double> norms;
        for (const auto& img : images[li]) {
            norms.push_back(l2_norm(img, grid));
        }
        const double sup = *std::max_element(norms.begin(), norms.end());
        rep.pullback.endpoint_norms.push_back(sup);
        rep.sample_norms.push_back(std::move(norms));
        if (li > 0) {
            double d = 0.0;
            for (std::size_t si = 0; si < images[li].size(); ++si) {
                d = std::max(d, l2_norm(images[li][si] - images[li - 1][si], grid));
            }
            rep.pullback.successive_distances.push_back(d);
        }
    }
    const auto& sups = rep.pullback.endpoint_norms;
    rep.empirical_sup = *std::max_element(sups.begin(), sups.end());
    rep.all_within = std::all_of(sups.begin(), sups.end(), [&](double s) { return s <= R0; });
    rep.pullback.entry_time = entry_time_of(t_ladder, sups, R0);
    rep.pullback.converged = !rep.pullback.successive_distances.empty() &&
                             rep.pullback.successive_distances.back() < opts.cauchy_tol;
    rep.tail_variation = tail_variation_of(sups);
    if (opts.keep_states) {
        for (auto& img : images) {
            rep.pullback.endpoint_states.push_back(img.front());
        }
    }
    return rep;
}

double hausdorff_semidistance(const std::vector<StateField>& A, const std::vector<StateField>& B,
                              const SpatialGrid& grid) {
    if (A.empty() || B.empty()) {
        throw DomainError("hausdorff_semidistance: sets must be nonempty");
    }
    double sup = 0.0;
    for (const auto& a : A) {
        check_conforms(a, grid);
        double inf = std::numeric_limits<double>::infinity();
        for (const auto& b : B) {
            check_conforms(b, grid);
            inf = std::min(inf, l2_norm(a - b, grid));
            if (inf == 0.0) {
                break;
            }
        }
        sup = std::max(sup, inf);
    }
    return sup;
}

AttractorReport attractor_approximation(std::size_t n_samples, const std::vector<double>& t_ladder,
                                        const WienerPath& path, double dt, const HRParameters& p,
                                        const SpatialGrid& grid, double R0, std::uint64_t seed,
                                        const AttractorOptions& opts) {
    check_ladder(t_ladder);
    if (t_ladder.size() < 3) {
        throw DomainError("attractor_approximation: ladder needs at least 3 entries");
    }
    if (!path.covers(-t_ladder.back())) {
        throw RangeError("pullback ladder outside the noise horizon; resample with a wider horizon");
    }
    AttractorReport rep;
    rep.ladder = t_ladder;
    rep.R0 = R0;
    rep.capped = R0 > opts.radius_cap;
    rep.radius_used = std::min(R0, opts.radius_cap);
    const auto samples = ball_samples(grid, rep.radius_used, n_samples, seed);
    rep.images = pullback_images(samples, t_ladder, path, dt, p, grid, opts.pullback);

    for (std::size_t k = 1; k < rep.images.size(); ++k) {
        rep.consecutive_distances.push_back(
            hausdorff_semidistance(rep.images[k], rep.images[k - 1], grid));
    }
    const auto& d = rep.consecutive_distances;
    rep.tail_non_increasing = true;
    rep.tail_strictly_decreasing = true;
    for (std::size_t k = std::max<std::size_t>(1, ladder_tail_start(d.size())); k < d.size(); ++k) {
        if (d[k] > d[k - 1] * (1.0 + opts.decay_rel_tol) + opts.decay_abs_tol) {
            rep.tail_non_increasing = false;
        }
        if (!(d[k] < d[k - 1])) {
            rep.tail_strictly_decreasing = false;
        }
    }
    rep.final_distance = d.back();
    return rep;
}

std::vector<EnergyRecord> energy_audit(const TrajectoryRecord& traj, const WienerPath& path,
                                       const HRParameters& p, const SpatialGrid& grid, double eta) {
    const auto& ts = traj.times;
    if (ts.size() < 2 || traj.states.size() != ts.size()) {
        throw ShapeError("energy_audit: trajectory needs at least 2 aligned snapshots");
    }
    const double spacing = ts[1] - ts[0];
    const double ratio = spacing / traj.dt;
    if (!(spacing > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-7 * std::max(1.0, ratio)) {
        throw ShapeError("energy_audit: stride mismatch (snapshot spacing is not a multiple of dt)");
    }
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double h = ts[i] - ts[i - 1];
        const bool last = i + 1 == ts.size();
        const bool uniform = std::abs(h - spacing) <= 1e-9 * std::max(1.0, spacing);
        if (!(uniform || (last && h > 0.0 && h < spacing))) {
            throw ShapeError("energy_audit: stride mismatch (uneven snapshot spacing)");
        }
    }
    const DerivedConstants k = derived_constants(p, eta);
    std::vector<EnergyRecord> rows;
    rows.reserve(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double Q = q_weight(path, p.eps, ts[i]);
        const StateField G =
            traj.scheme == Scheme::DirectStratonovich ? Q * traj.states[i] : traj.states[i];
        EnergyRecord row = measure_energy(G, ts[i], Q, p, k, grid);
        if (i > 0) {
            complete_residual(row, rows.back().weighted_energy, ts[i] - ts[i - 1], p, k, grid);
        }
        rows.push_back(row);
    }
    return rows;
}

double energy_tolerance(double dt, double scale) {
    return scale * dt;
}

EnergySummary summarize_energy(const std::vector<EnergyRecord>& rows, double tolerance,
                               const HRParameters& p, const SpatialGrid& grid, double eta) {
    const DerivedConstants k = derived_constants(p, eta);
    EnergySummary s;
    s.tolerance = tolerance;
    s.max_residual = -std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        if (!r.has_residual) {
            continue;
        }
        ++s.audited;
        if (r.ineq_residual <= tolerance) {
            ++s.within;
        }
        s.max_residual = std::max(s.max_residual, r.ineq_residual);
        const double rhs = energy_forcing(r.q_t, p, k, grid);
        s.max_lhs_over_rhs = std::max(s.max_lhs_over_rhs, (r.ineq_residual + rhs) / rhs);
    }
    if (s.audited == 0) {
        throw ShapeError("summarize_energy: no audited rows");
    }
    s.fraction_within = static_cast<double>(s.within) / static_cast<double>(s.audited);
    return s;
}

H1Report h1_monitor(const TrajectoryRecord& traj, const TheoreticalBounds& bounds) {
    const auto& rows = traj.energy_rows;
    constexpr double kTimeTol = 1e-9;
    if (rows.size() < 2 || rows.front().t > -2.0 + kTimeTol || std::abs(rows.back().t) > kTimeTol) {
        throw RangeError("h1_monitor: energy rows must cover the window [-2, 0]");
    }
    H1Report rep;
    rep.ln_gradient_bound = bounds.ln_gradient_bound;
    rep.ln_M = bounds.ln_M;
    rep.N1 = bounds.N1;
    rep.K = bounds.K;

    // cumulative trapezoid of |grad G|^2
    std::vector<double> cum(rows.size(), 0.0);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        cum[i] = cum[i - 1] + 0.5 * (rows[i].t - rows[i - 1].t) * (rows[i].grad_G2 + rows[i - 1].grad_G2);
    }
    auto index_at = [&](double t) {
        auto it = std::lower_bound(rows.begin(), rows.end(), t - kTimeTol,
                                   [](const EnergyRecord& r, double v) { return r.t < v; });
        return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - rows.begin(),
                                                                 static_cast<std::ptrdiff_t>(rows.size() - 1)));
    };

    bool found = false;
    for (std::size_t i = index_at(-2.0); i < rows.size() && rows[i].t <= -1.0 + kTimeTol; ++i) {
        if (!found || rows[i].grad_G2 < rep.grad_at_t_star) {
            rep.t_star = rows[i].t;
            rep.grad_at_t_star = rows[i].grad_G2;
            found = true;
        }
        const std::size_t j = index_at(rows[i].t + 1.0);
        rep.max_window_integral = std::max(rep.max_window_integral, cum[j] - cum[i]);
    }
    for (std::size_t i = index_at(rep.t_star + 1.0); i < rows.size(); ++i) {
        rep.sup_grad_sq = std::max(rep.sup_grad_sq, rows[i].grad_G2);
    }
    const auto& last = rows.back();
    rep.e_norm_sq_at_0 = last.l2_U2 + last.l2_V2 + last.l2_Z2 + last.grad_G2;

    auto within_log = [](double value, double ln_bound) {
        return value <= 0.0 || std::log(value) <= ln_bound;
    };
    rep.grad_within = within_log(rep.sup_grad_sq, rep.ln_gradient_bound);
    rep.e_norm_within = within_log(rep.e_norm_sq_at_0, rep.ln_M);
    rep.integral_within_N1 = rep.max_window_integral <= bounds.N1;
    rep.integral_within_K = rep.max_window_integral <= bounds.K;
    return rep;
}

} // namespace hrsim
