#include "hrsim/solver.hpp"

#include "hrsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hrsim {

std::string to_string(Scheme s) {
    switch (s) {
    case Scheme::TransformedImex:
        return "transformed-imex";
    case Scheme::DirectStratonovich:
        return "direct-stratonovich";
    case Scheme::OdeRk4:
        return "ode-rk4";
    }
    return "unknown";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "transformed-imex") return Scheme::TransformedImex;
    if (s == "direct-stratonovich") return Scheme::DirectStratonovich;
    if (s == "ode-rk4") return Scheme::OdeRk4;
    throw ConfigError("unknown scheme '" + s + "'");
}

std::size_t step_count(double t0, double t1, double dt) {
    if (!(dt > 0.0)) {
        throw DomainError("time step must be positive");
    }
    if (t1 < t0) {
        throw DomainError("end time precedes start time");
    }
    const double x = (t1 - t0) / dt;
    const double nearest = std::round(x);
    if (std::abs(x - nearest) < 1e-7 * std::max(1.0, nearest)) {
        return static_cast<std::size_t>(nearest);
    }
    return static_cast<std::size_t>(std::ceil(x));
}

namespace {

double step_time(double t0, double t1, double dt, std::size_t k, std::size_t n) {
    return k == n ? t1 : t0 + static_cast<double>(k) * dt;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

// Workspace for repeated implicit solves on one grid.
struct DiffusionSolver {
    const SpatialGrid& grid;
    double tol;
    std::size_t max_iter;
    std::vector<double> r, pdir, ap, lap;
    std::size_t max_iterations_seen = 0;

    DiffusionSolver(const SpatialGrid& g, const SolverOptions& opts)
        : grid(g), tol(opts.cg_tol), max_iter(opts.cg_iter_factor * g.size()),
          r(g.size()), pdir(g.size()), ap(g.size()), lap(g.size()) {}

    void apply(std::span<const double> x, double coeff, std::span<double> out) {
        neumann_laplacian_into(x, grid, lap);
        for (std::size_t i = 0; i < x.size(); ++i) {
            out[i] = x[i] - coeff * lap[i];
        }
    }

    // Solves in place: x holds the right-hand side on entry.
    void solve(std::span<double> x, double coeff, double t) {
        if (coeff == 0.0) {
            return;
        }
        std::vector<double> b(x.begin(), x.end());
        const CgStats st = cg(b, coeff, x, t);
        max_iterations_seen = std::max(max_iterations_seen, st.iterations);
    }

    CgStats cg(std::span<const double> b, double coeff, std::span<double> x, double t) {
        CgStats st;
        const double bnorm = std::sqrt(dot(b, b));
        if (bnorm == 0.0) {
            std::fill(x.begin(), x.end(), 0.0);
            return st;
        }
        apply(x, coeff, ap);
        for (std::size_t i = 0; i < b.size(); ++i) {
            r[i] = b[i] - ap[i];
        }
        double rr = dot(r, r);
        std::copy(r.begin(), r.end(), pdir.begin());
        const double target = tol * bnorm;
        while (std::sqrt(rr) > target) {
            if (st.iterations >= max_iter) {
                throw NumericalError("conjugate gradient did not converge in " +
                                         std::to_string(max_iter) + " iterations (relative residual " +
                                         std::to_string(std::sqrt(rr) / bnorm) + ")",
                                     t);
            }
            apply(pdir, coeff, ap);
            const double alpha = rr / dot(pdir, ap);
            for (std::size_t i = 0; i < b.size(); ++i) {
                x[i] += alpha * pdir[i];
                r[i] -= alpha * ap[i];
            }
            const double rr_new = dot(r, r);
            const double beta = rr_new / rr;
            rr = rr_new;
            for (std::size_t i = 0; i < b.size(); ++i) {
                pdir[i] = r[i] + beta * pdir[i];
            }
            ++st.iterations;
            if (!std::isfinite(rr)) {
                throw NumericalError("conjugate gradient produced non-finite residual", t);
            }
        }
        st.relative_residual = std::sqrt(rr) / bnorm;
        return st;
    }
};

// Explicit reaction displacement of the transformed system, added in place.
void add_random_reaction(StateField& out, const StateField& G, double Q, double dt,
                         const HRParameters& p) {
    for (std::size_t i = 0; i < G.U.size(); ++i) {
        const Triple f = random_reaction({G.U[i], G.V[i], G.Z[i]}, Q, p);
        out.U[i] += dt * f[0];
        out.V[i] += dt * f[1];
        out.Z[i] += dt * f[2];
    }
}

class TransformedStepper {
public:
    TransformedStepper(const HRParameters& p, const SpatialGrid& grid, const SolverOptions& opts)
        : p_(p), grid_(grid), solver_(grid, opts) {}

    StateField step(const StateField& G, double t, double dt, double Q) {
        StateField next = G;
        add_random_reaction(next, G, Q, dt, p_);
        solver_.solve(next.U, dt * p_.d1, t);
        solver_.solve(next.V, dt * p_.d2, t);
        solver_.solve(next.Z, dt * p_.d3, t);
        if (!next.all_finite()) {
            throw NumericalError("non-finite state (blow-up); reduce dt", t + dt);
        }
        return next;
    }

    std::size_t max_iterations() const { return solver_.max_iterations_seen; }

private:
    const HRParameters& p_;
    const SpatialGrid& grid_;
    DiffusionSolver solver_;
};

class DirectStepper {
public:
    DirectStepper(const HRParameters& p, const SpatialGrid& grid, const SolverOptions& opts)
        : p_(p), solver_(grid, opts) {}

    StateField step(const StateField& g, double t, double dt, double dw) {
        const double e = p_.eps;
        StateField next = g;
        for (std::size_t i = 0; i < g.U.size(); ++i) {
            const Triple f = reaction({g.U[i], g.V[i], g.Z[i]}, p_);
            for (int c = 0; c < 3; ++c) {
                const double gi = g.component(c)[i];
                const double drift = gi + dt * f[c];
                const double predictor = drift + e * gi * dw;
                next.component(c)[i] = drift + 0.5 * e * (gi + predictor) * dw;
            }
        }
        solver_.solve(next.U, dt * p_.d1, t);
        solver_.solve(next.V, dt * p_.d2, t);
        solver_.solve(next.Z, dt * p_.d3, t);
        if (!next.all_finite()) {
            throw NumericalError("non-finite state (blow-up); reduce dt", t + dt);
        }
        return next;
    }

    std::size_t max_iterations() const { return solver_.max_iterations_seen; }

private:
    const HRParameters& p_;
    DiffusionSolver solver_;
};

void check_run(const StateField& g, double t0, double t1, const WienerPath& path,
               const HRParameters& p, const SpatialGrid& grid) {
    p.validate();
    check_conforms(g, grid);
    if (t1 < t0) {
        throw DomainError("end time precedes start time");
    }
    if (!path.covers(t0) || !path.covers(t1)) {
        throw RangeError("noise path does not cover [" + std::to_string(t0) + ", " +
                         std::to_string(t1) + "]; resample with a wider horizon");
    }
}

// Shared driver: `advance(state, t, h)` returns the next state,
// `energy_state(state, Q)` maps to transformed variables.
template <typename Advance, typename ToTransformed>
TrajectoryRecord run(const StateField& start, double t0, double t1, double dt,
                     const WienerPath& path, const HRParameters& p, const SpatialGrid& grid,
                     const SolverOptions& opts, Scheme scheme, Advance&& advance,
                     ToTransformed&& to_transformed) {
    const std::size_t n = step_count(t0, t1, dt);
    const DerivedConstants k = derived_constants(p, opts.eta);
    const std::size_t stride = std::max<std::size_t>(1, opts.stride);

    TrajectoryRecord rec;
    rec.scheme = scheme;
    rec.dt = dt;
    rec.path_seed = path.seed();
    rec.steps = n;
    rec.times.push_back(t0);
    rec.states.push_back(start);

    StateField state = start;
    double prev_weighted = 0.0;
    if (opts.record_energy) {
        const double Q = q_weight(path, p.eps, t0);
        EnergyRecord row = measure_energy(to_transformed(state, Q), t0, Q, p, k, grid);
        prev_weighted = row.weighted_energy;
        rec.energy_rows.push_back(row);
    }
    for (std::size_t s = 0; s < n; ++s) {
        const double t = step_time(t0, t1, dt, s, n);
        const double t_next = step_time(t0, t1, dt, s + 1, n);
        const double h = t_next - t;
        state = advance(state, t, h, t_next);
        if (opts.record_energy) {
            const double Q = q_weight(path, p.eps, t_next);
            EnergyRecord row = measure_energy(to_transformed(state, Q), t_next, Q, p, k, grid);
            complete_residual(row, prev_weighted, h, p, k, grid);
            prev_weighted = row.weighted_energy;
            rec.energy_rows.push_back(row);
        }
        if ((s + 1) % stride == 0 || s + 1 == n) {
            rec.times.push_back(t_next);
            rec.states.push_back(state);
        }
    }
    return rec;
}

} // namespace

CgStats solve_implicit_diffusion(std::span<const double> b, double coeff, const SpatialGrid& grid,
                                 std::span<double> x, double tol, std::size_t max_iter, double t) {
    check_conforms(b, grid);
    check_conforms(x, grid);
    if (coeff < 0.0) {
        throw DomainError("implicit diffusion coefficient must be nonnegative");
    }
    SolverOptions opts;
    opts.cg_tol = tol;
    DiffusionSolver solver(grid, opts);
    solver.max_iter = max_iter;
    return solver.cg(b, coeff, x, t);
}

StateField step_transformed(const StateField& G, double t, double dt, const WienerPath& path,
                            const HRParameters& p, const SpatialGrid& grid,
                            const SolverOptions& opts) {
    if (!(dt > 0.0)) {
        throw DomainError("step_transformed: dt must be positive");
    }
    check_conforms(G, grid);
    TransformedStepper stepper(p, grid, opts);
    return stepper.step(G, t, dt, q_weight(path, p.eps, t));
}

TrajectoryRecord solve_transformed(const StateField& G_tau, double tau, double t_end, double dt,
                                   const WienerPath& path, const HRParameters& p,
                                   const SpatialGrid& grid, const SolverOptions& opts) {
    check_run(G_tau, tau, t_end, path, p, grid);
    TransformedStepper stepper(p, grid, opts);
    auto rec = run(
        G_tau, tau, t_end, dt, path, p, grid, opts, Scheme::TransformedImex,
        [&](const StateField& G, double t, double h, double) {
            return stepper.step(G, t, h, q_weight(path, p.eps, t));
        },
        [](const StateField& G, double) -> const StateField& { return G; });
    rec.max_cg_iterations = stepper.max_iterations();
    return rec;
}

TrajectoryRecord solve_direct_spde(const StateField& g0, double t0, double t_end, double dt,
                                   const WienerPath& path, const HRParameters& p,
                                   const SpatialGrid& grid, const SolverOptions& opts) {
    check_run(g0, t0, t_end, path, p, grid);
    DirectStepper stepper(p, grid, opts);
    auto rec = run(
        g0, t0, t_end, dt, path, p, grid, opts, Scheme::DirectStratonovich,
        [&](const StateField& g, double t, double h, double t_next) {
            const double dw = p.eps == 0.0 ? 0.0 : path.evaluate(t_next) - path.evaluate(t);
            return stepper.step(g, t, h, dw);
        },
        [](const StateField& g, double Q) { return Q * g; });
    rec.max_cg_iterations = stepper.max_iterations();
    return rec;
}

namespace {

Triple axpy(const Triple& x, double a, const Triple& y) {
    return {x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
}

template <typename Field>
Triple rk4_step(const Triple& x, double h, Field&& f) {
    const Triple k1 = f(x);
    const Triple k2 = f(axpy(x, 0.5 * h, k1));
    const Triple k3 = f(axpy(x, 0.5 * h, k2));
    const Triple k4 = f(axpy(x, h, k3));
    Triple out;
    for (int i = 0; i < 3; ++i) {
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return out;
}

bool blown_up(const Triple& x) {
    return !std::all_of(x.begin(), x.end(),
                        [](double v) { return std::isfinite(v) && std::abs(v) < 1e100; });
}

} // namespace

OdeSeries ode_trajectory(const Triple& x0, const HRParameters& p, double J_override, double T,
                         double dt) {
    if (!(dt > 0.0)) {
        throw DomainError("ode_trajectory: dt must be positive");
    }
    HRParameters q = p;
    q.J = J_override;
    const std::size_t n = step_count(0.0, T, dt);
    OdeSeries s;
    s.t.reserve(n + 1);
    s.u.reserve(n + 1);
    s.v.reserve(n + 1);
    s.z.reserve(n + 1);
    Triple x = x0;
    auto push = [&](double t) {
        s.t.push_back(t);
        s.u.push_back(x[0]);
        s.v.push_back(x[1]);
        s.z.push_back(x[2]);
    };
    push(0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double t_next = k + 1 == n ? T : static_cast<double>(k + 1) * dt;
        x = rk4_step(x, t_next - t, [&](const Triple& y) { return reaction(y, q); });
        if (blown_up(x)) {
            throw NumericalError("ODE trajectory blew up", t_next);
        }
        push(t_next);
    }
    return s;
}

std::vector<Triple> random_ode_reference(const Triple& G0, double tau, double t_end, double dt,
                                         const WienerPath& path, const HRParameters& p) {
    const std::size_t n = step_count(tau, t_end, dt);
    std::vector<Triple> out;
    out.reserve(n + 1);
    Triple x = G0;
    out.push_back(x);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = step_time(tau, t_end, dt, k, n);
        const double t_next = step_time(tau, t_end, dt, k + 1, n);
        const double Q = q_weight(path, p.eps, t);
        x = rk4_step(x, t_next - t, [&](const Triple& y) { return random_reaction(y, Q, p); });
        out.push_back(x);
    }
    return out;
}

} // namespace hrsim
