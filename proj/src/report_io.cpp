#include "hrsim/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace hrsim {

std::string format_number(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& traj, const WienerPath& path,
                          const HRParameters& p, const SpatialGrid& grid) {
    os << "t,norm_U,norm_V,norm_Z,grad_G,Q\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const double Q = q_weight(path, p.eps, t);
        const StateField G =
            traj.scheme == Scheme::DirectStratonovich ? Q * traj.states[i] : traj.states[i];
        os << format_number(t) << ',' << format_number(l2_norm(G.U, grid)) << ','
           << format_number(l2_norm(G.V, grid)) << ',' << format_number(l2_norm(G.Z, grid)) << ','
           << format_number(std::sqrt(h1_seminorm_sq(G, grid))) << ',' << format_number(Q) << '\n';
    }
}

void write_ode_csv(std::ostream& os, const OdeSeries& s, std::size_t stride) {
    stride = std::max<std::size_t>(stride, 1);
    os << "t,u,v,z\n";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        if (i % stride != 0 && i + 1 != s.t.size()) {
            continue;
        }
        os << format_number(s.t[i]) << ',' << format_number(s.u[i]) << ',' << format_number(s.v[i])
           << ',' << format_number(s.z[i]) << '\n';
    }
}

void write_energy_csv(std::ostream& os, const std::vector<EnergyRecord>& rows) {
    os << "t,weighted_energy,grad_term,residual,Q\n";
    for (const auto& r : rows) {
        os << format_number(r.t) << ',' << format_number(r.weighted_energy) << ','
           << format_number(r.grad_term) << ','
           << (r.has_residual ? format_number(r.ineq_residual) : std::string()) << ','
           << format_number(r.q_t) << '\n';
    }
}

void write_pullback_csv(std::ostream& os, const PullbackReport& rep) {
    os << "t,sup_norm,R0,within_bound\n";
    for (std::size_t i = 0; i < rep.pullback_times.size(); ++i) {
        const double n = rep.endpoint_norms[i];
        os << format_number(rep.pullback_times[i]) << ',' << format_number(n) << ','
           << format_number(rep.R0_used) << ',' << (n <= rep.R0_used ? 1 : 0) << '\n';
    }
}

void write_bounds_csv(std::ostream& os, const TheoreticalBounds& b,
                      const std::vector<std::pair<std::string, double>>& extra) {
    os << "name,value,truncation_T,tail_bound\n";
    const std::vector<std::pair<std::string, double>> rows = {
        {"r0", b.r0},
        {"R0", b.R0},
        {"R1", b.R1},
        {"K", b.K},
        {"C_omega", b.C_omega},
        {"P0", b.P0},
        {"N1", b.N1},
        {"N2", b.N2},
        {"N3", b.N3},
        {"M", b.M},
        {"ln_M", b.ln_M},
        {"gradient_bound", b.gradient_bound},
        {"ln_gradient_bound", b.ln_gradient_bound},
        {"tail_tolerance", b.tail_tolerance},
        {"tail_growth_rate", b.tail_growth_rate},
        {"quad_dt", b.quad_dt},
    };
    auto emit = [&](const std::string& name, double v) {
        os << name << ',' << format_number(v) << ',' << format_number(b.truncation_T) << ','
           << format_number(b.tail_bound) << '\n';
    };
    for (const auto& [name, v] : rows) {
        emit(name, v);
    }
    for (const auto& [name, v] : extra) {
        emit(name, v);
    }
}

void write_attractor_csv(std::ostream& os, const AttractorReport& rep) {
    os << "index,t_from,t_to,semidistance\n";
    for (std::size_t k = 0; k < rep.consecutive_distances.size(); ++k) {
        os << k + 1 << ',' << format_number(rep.ladder[k]) << ',' << format_number(rep.ladder[k + 1])
           << ',' << format_number(rep.consecutive_distances[k]) << '\n';
    }
}

void write_summary_csv(std::ostream& os,
                       const std::vector<std::pair<std::string, std::string>>& rows) {
    os << "key,value\n";
    for (const auto& [k, v] : rows) {
        os << k << ',' << v << '\n';
    }
}

void write_plot_script(std::ostream& os, const std::vector<PlotSpec>& plots) {
    os << "# gnuplot script; run with: gnuplot plot.gp\n"
       << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set terminal pngcairo size 900,600\n";
    for (const auto& p : plots) {
        std::string stem = p.csv.substr(0, p.csv.rfind('.'));
        os << "\nset output '" << stem << ".png'\n"
           << "set title '" << p.title << "'\n"
           << (p.log_y ? "set logscale y\n" : "unset logscale y\n") << "plot ";
        for (std::size_t i = 0; i < p.y_columns.size(); ++i) {
            os << (i ? ", \\\n     " : "") << "'" << p.csv << "' using " << p.x_column << ':'
               << p.y_columns[i].first << " with lines title '" << p.y_columns[i].second << "'";
        }
        os << '\n';
    }
}

} // namespace hrsim
