#include "hrsim/cli.hpp"

#include "hrsim/errors.hpp"
#include "hrsim/pullback.hpp"
#include "hrsim/report_io.hpp"
#include "hrsim/verify.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

namespace hrsim {

namespace fs = std::filesystem;

std::string git_blob_sha1(const std::string& content) {
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, header.data(), header.size()) != 1 ||
        EVP_DigestUpdate(ctx, content.data(), content.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("SHA-1 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) {
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    }
    return os.str();
}

namespace {

using Rows = std::vector<std::pair<std::string, std::string>>;

// Collects artifacts in memory so the manifest can hash exactly what was written.
class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary);
        f << content;
        if (!f) {
            throw ConfigError("cannot write " + (dir_ / name).string());
        }
        files_.emplace_back(name, git_blob_sha1(content));
    }

    template <typename Writer>
    void csv(const std::string& name, Writer&& w) {
        std::ostringstream os;
        w(os);
        add(name, os.str());
    }

    const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

std::string yes_no(bool b) {
    return b ? "true" : "false";
}

SolverOptions solver_options(const RunConfig& c, bool record_energy) {
    SolverOptions o;
    o.cg_tol = c.cg_tol;
    o.cg_iter_factor = c.cg_iter_factor;
    o.stride = c.stride;
    o.record_energy = record_energy;
    o.eta = c.eta;
    return o;
}

PullbackOptions pullback_options(const RunConfig& c) {
    PullbackOptions o;
    o.solver = solver_options(c, false);
    o.threads = c.threads;
    o.cauchy_tol = c.cauchy_tol;
    return o;
}

BoundsOptions bounds_options(const RunConfig& c) {
    BoundsOptions b;
    b.truncation_T = c.truncation_T;
    b.quad_dt = c.quad_dt;
    b.eta = c.eta;
    b.tail_rel_tolerance = c.tail_rel_tol;
    return b;
}

WienerPath backward_path(const RunConfig& c) {
    return sample_path(c.seed, -c.truncation_T, 0.0, c.effective_path_dt());
}

int cmd_ode(const RunConfig& c, Artifacts& art, std::ostream& log) {
    const auto series =
        ode_trajectory({c.u0, c.v0, c.z0}, c.params, c.params.J, c.ode_T, c.ode_dt);
    const auto rep = classify_regime(series, c.transient, c.regime);
    art.csv("ode.csv", [&](std::ostream& os) { write_ode_csv(os, series, c.ode_stride); });
    art.csv("regime.csv", [&](std::ostream& os) {
        write_summary_csv(os, {{"J", format_number(c.params.J)},
                               {"label", rep.label},
                               {"spike_count", std::to_string(rep.spike_count)},
                               {"isi_mean", format_number(rep.isi_mean)},
                               {"isi_cv", format_number(rep.isi_cv)},
                               {"bimodal", yes_no(rep.bimodal)},
                               {"burst_size_cv", format_number(rep.burst_size_cv)},
                               {"burst_period_cv", format_number(rep.burst_period_cv)}});
    });
    art.csv("plot.gp", [](std::ostream& os) {
        write_plot_script(os, {{"ode.csv", "membrane potential", 1, {{2, "u"}}, false}});
    });
    log << "regime: " << rep.label << " (spikes " << rep.spike_count << ", ISI CV "
        << format_number(rep.isi_cv) << ")\n";
    return kExitOk;
}

int cmd_simulate(const RunConfig& c, Artifacts& art, std::ostream& log) {
    const SpatialGrid grid = SpatialGrid::parse(c.grid);
    const WienerPath path = sample_path(c.seed, 0.0, c.t_end, c.effective_path_dt());
    const StateField g0 = sample_initial_state(grid, c.init_radius, c.seed, 0);
    const SolverOptions o = solver_options(c, true);
    const TrajectoryRecord traj =
        c.scheme == Scheme::DirectStratonovich
            ? solve_direct_spde(g0, 0.0, c.t_end, c.dt, path, c.params, grid, o)
            : solve_transformed(g0, 0.0, c.t_end, c.dt, path, c.params, grid, o);
    const double tol = energy_tolerance(c.dt, c.energy_tol_scale);
    const auto summary = summarize_energy(traj.energy_rows, tol, c.params, grid, c.eta);

    art.csv("trajectory.csv",
            [&](std::ostream& os) { write_trajectory_csv(os, traj, path, c.params, grid); });
    art.csv("energy.csv", [&](std::ostream& os) { write_energy_csv(os, traj.energy_rows); });
    const StateField& last = traj.final_state();
    art.csv("summary.csv", [&](std::ostream& os) {
        write_summary_csv(os, {{"scheme", to_string(traj.scheme)},
                               {"steps", std::to_string(traj.steps)},
                               {"final_time", format_number(traj.final_time())},
                               {"final_norm", format_number(l2_norm(last, grid))},
                               {"max_cg_iterations", std::to_string(traj.max_cg_iterations)},
                               {"energy_audited", std::to_string(summary.audited)},
                               {"energy_fraction_within", format_number(summary.fraction_within)},
                               {"energy_tolerance", format_number(summary.tolerance)},
                               {"energy_max_residual", format_number(summary.max_residual)},
                               {"energy_max_lhs_over_rhs", format_number(summary.max_lhs_over_rhs)}});
    });
    if (c.snapshots) {
        std::ostringstream a, b;
        write_field_binary(a, traj.states.front(), grid);
        write_field_binary(b, last, grid);
        art.add("initial.bin", a.str());
        art.add("final.bin", b.str());
        art.csv("final_field.csv", [&](std::ostream& os) { write_field_csv(os, last, grid); });
    }
    art.csv("plot.gp", [](std::ostream& os) {
        write_plot_script(os, {{"trajectory.csv", "norms", 1, {{2, "|U|"}, {3, "|V|"}, {4, "|Z|"}, {5, "|grad G|"}}, false},
                               {"energy.csv", "weighted energy", 1, {{2, "E"}}, false}});
    });
    log << "simulate: " << traj.steps << " steps, energy audit " << summary.within << '/'
        << summary.audited << " within tolerance\n";
    return c.strict && summary.fraction_within < 0.99 ? kExitViolation : kExitOk;
}

int cmd_pullback(const RunConfig& c, Artifacts& art, std::ostream& log) {
    const SpatialGrid grid = SpatialGrid::parse(c.grid);
    const WienerPath path = backward_path(c);
    const TheoreticalBounds b = absorbing_bounds(path, c.params, grid, bounds_options(c));
    const StateField g0 = sample_initial_state(grid, c.init_radius, c.seed, 0);
    const PullbackReport rep =
        pullback_quasi_trajectory(g0, c.ladder, path, c.dt, c.params, grid, b.R0, pullback_options(c));

    art.csv("pullback.csv", [&](std::ostream& os) { write_pullback_csv(os, rep); });
    art.csv("bounds.csv", [&](std::ostream& os) { write_bounds_csv(os, b); });
    bool violation = !std::all_of(rep.endpoint_norms.begin(), rep.endpoint_norms.end(),
                                  [&](double n) { return n <= b.R0; });
    Rows rows = {{"R0", format_number(b.R0)},
                 {"entry_time", rep.entry_time ? format_number(*rep.entry_time) : "none"},
                 {"converged", yes_no(rep.converged)},
                 {"final_successive_distance",
                  rep.successive_distances.empty() ? "none" : format_number(rep.successive_distances.back())}};

    const double t_last = c.ladder.back();
    if (t_last >= 2.0) {
        SolverOptions o = solver_options(c, true);
        o.stride = std::numeric_limits<std::size_t>::max();
        const auto traj = solve_transformed(q_weight(path, c.params.eps, -t_last) * g0, -t_last, 0.0,
                                            c.dt, path, c.params, grid, o);
        const H1Report h = h1_monitor(traj, b);
        rows.insert(rows.end(), {{"t_star", format_number(h.t_star)},
                                 {"sup_grad_sq", format_number(h.sup_grad_sq)},
                                 {"ln_gradient_bound", format_number(h.ln_gradient_bound)},
                                 {"e_norm_sq_at_0", format_number(h.e_norm_sq_at_0)},
                                 {"ln_M", format_number(h.ln_M)},
                                 {"max_window_integral", format_number(h.max_window_integral)},
                                 {"N1", format_number(h.N1)},
                                 {"K", format_number(h.K)},
                                 {"grad_within", yes_no(h.grad_within)},
                                 {"e_norm_within", yes_no(h.e_norm_within)},
                                 {"integral_within_N1", yes_no(h.integral_within_N1)},
                                 {"integral_within_K", yes_no(h.integral_within_K)}});
        violation = violation || !(h.grad_within && h.e_norm_within && h.integral_within_N1 &&
                                   h.integral_within_K);
    }
    art.csv("summary.csv", [&](std::ostream& os) { write_summary_csv(os, rows); });
    art.csv("plot.gp", [](std::ostream& os) {
        write_plot_script(os, {{"pullback.csv", "pullback endpoint norms", 1, {{2, "|Phi|"}}, false}});
    });
    log << "pullback: R0 = " << format_number(b.R0) << ", endpoint norms";
    for (double n : rep.endpoint_norms) log << ' ' << format_number(n);
    log << '\n';
    return c.strict && violation ? kExitViolation : kExitOk;
}

int cmd_absorb(const RunConfig& c, Artifacts& art, std::ostream& log) {
    const SpatialGrid grid = SpatialGrid::parse(c.grid);
    const WienerPath path = backward_path(c);
    const TheoreticalBounds b = absorbing_bounds(path, c.params, grid, bounds_options(c));
    std::vector<std::pair<std::string, double>> extra;
    if (c.params.eps == 0.0) {
        const double ref = r0_closed_form(c.params, grid, c.truncation_T, c.eta);
        extra = {{"r0_closed_form", ref}, {"r0_relative_difference", std::abs(b.r0 / ref - 1.0)}};
        log << "absorb: r0 = " << format_number(b.r0) << ", closed form " << format_number(ref)
            << '\n';
    }
    const AbsorbingReport ar = verify_absorbing(c.rho, c.samples, c.ladder, path, c.dt, c.params,
                                                grid, b.R0, c.seed, pullback_options(c));
    art.csv("bounds.csv", [&](std::ostream& os) { write_bounds_csv(os, b, extra); });
    art.csv("absorb.csv", [&](std::ostream& os) { write_pullback_csv(os, ar.pullback); });
    art.csv("absorb_samples.csv", [&](std::ostream& os) {
        os << "t,sample,initial_norm,endpoint_norm\n";
        for (std::size_t li = 0; li < c.ladder.size(); ++li) {
            for (std::size_t si = 0; si < ar.sample_norms[li].size(); ++si) {
                os << format_number(c.ladder[li]) << ',' << si << ','
                   << format_number(ar.initial_norms[si]) << ','
                   << format_number(ar.sample_norms[li][si]) << '\n';
            }
        }
    });
    const bool uniform = ar.tail_variation <= c.uniform_tol;
    art.csv("summary.csv", [&](std::ostream& os) {
        write_summary_csv(os, {{"R0", format_number(b.R0)},
                               {"rho", format_number(ar.rho)},
                               {"samples", std::to_string(ar.n_samples)},
                               {"all_within_R0", yes_no(ar.all_within)},
                               {"empirical_sup", format_number(ar.empirical_sup)},
                               {"entry_time", ar.pullback.entry_time ? format_number(*ar.pullback.entry_time) : "none"},
                               {"tail_variation", format_number(ar.tail_variation)},
                               {"uniform_within_tolerance", yes_no(uniform)}});
    });
    art.csv("plot.gp", [](std::ostream& os) {
        write_plot_script(os, {{"absorb.csv", "sup of pullback endpoint norms", 1, {{2, "sup"}}, false}});
    });
    log << "absorb: R0 = " << format_number(b.R0) << ", empirical sup "
        << format_number(ar.empirical_sup) << ", tail variation " << format_number(ar.tail_variation)
        << '\n';
    return c.strict && !(ar.all_within && uniform) ? kExitViolation : kExitOk;
}

int cmd_attractor(const RunConfig& c, Artifacts& art, std::ostream& log) {
    const SpatialGrid grid = SpatialGrid::parse(c.grid);
    const WienerPath path = backward_path(c);
    const TheoreticalBounds b = absorbing_bounds(path, c.params, grid, bounds_options(c));
    AttractorOptions o;
    o.pullback = pullback_options(c);
    o.radius_cap = c.radius_cap;
    o.decay_rel_tol = c.decay_rel_tol;
    const AttractorReport at =
        attractor_approximation(c.samples, c.ladder, path, c.dt, c.params, grid, b.R0, c.seed, o);
    art.csv("bounds.csv", [&](std::ostream& os) { write_bounds_csv(os, b); });
    art.csv("attractor.csv", [&](std::ostream& os) { write_attractor_csv(os, at); });
    art.csv("attractor_cloud.csv", [&](std::ostream& os) {
        os << "sample,norm,mean_U,mean_V,mean_Z\n";
        const auto& cloud = at.attractor_approximation();
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            auto mean = [&](const ScalarField& f) {
                return inner(f, ScalarField(f.size(), 1.0), grid) / grid.measure();
            };
            os << i << ',' << format_number(l2_norm(cloud[i], grid)) << ','
               << format_number(mean(cloud[i].U)) << ',' << format_number(mean(cloud[i].V)) << ','
               << format_number(mean(cloud[i].Z)) << '\n';
        }
    });
    art.csv("summary.csv", [&](std::ostream& os) {
        write_summary_csv(os, {{"R0", format_number(at.R0)},
                               {"radius_used", format_number(at.radius_used)},
                               {"capped", yes_no(at.capped)},
                               {"tail_non_increasing", yes_no(at.tail_non_increasing)},
                               {"tail_strictly_decreasing", yes_no(at.tail_strictly_decreasing)},
                               {"final_distance", format_number(at.final_distance)}});
    });
    art.csv("plot.gp", [](std::ostream& os) {
        write_plot_script(os, {{"attractor.csv", "consecutive semi-distances", 3, {{4, "dist"}}, true}});
    });
    log << "attractor: sampling radius " << format_number(at.radius_used)
        << (at.capped ? " (capped)" : "") << ", consecutive distances";
    for (double d : at.consecutive_distances) log << ' ' << format_number(d);
    log << '\n';
    return c.strict && !at.tail_non_increasing ? kExitViolation : kExitOk;
}

int cmd_verify(const RunConfig& c, Artifacts& art, std::ostream& log) {
    const auto results = run_property_checks(c);
    bool all = true;
    art.csv("verify.csv", [&](std::ostream& os) {
        os << "check,passed,detail\n";
        for (const auto& r : results) {
            os << '"' << r.name << "\"," << (r.passed ? 1 : 0) << ",\"" << r.detail << "\"\n";
        }
    });
    for (const auto& r : results) {
        all = all && r.passed;
        log << (r.passed ? "PASS " : "FAIL ") << r.name << (r.detail.empty() ? "" : ": ")
            << r.detail << '\n';
    }
    return all ? kExitOk : kExitViolation;
}

} // namespace

int run(const RunConfig& cfg, std::ostream& log) {
    validate_config(cfg);
    const fs::path dir(cfg.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ConfigError("output directory '" + cfg.out + "' is not writable");
    }
    Artifacts art(dir);
    int code = kExitOk;
    if (cfg.command == "ode") code = cmd_ode(cfg, art, log);
    else if (cfg.command == "simulate") code = cmd_simulate(cfg, art, log);
    else if (cfg.command == "pullback") code = cmd_pullback(cfg, art, log);
    else if (cfg.command == "absorb") code = cmd_absorb(cfg, art, log);
    else if (cfg.command == "attractor") code = cmd_attractor(cfg, art, log);
    else code = cmd_verify(cfg, art, log);

    const std::string config_text = serialize_config(cfg);
    std::ostringstream m;
    m << "# run manifest; usable as --config input\n" << config_text;
    m << "manifest.content_hash = " << git_blob_sha1(config_text) << '\n';
    for (const auto& [name, sha] : art.files()) {
        m << "manifest.file." << name << " = " << sha << '\n';
    }
    m << "manifest.exit_code = " << code << '\n';
    std::ofstream(dir / "manifest.txt", std::ios::binary) << m.str();
    return code;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic diffusive Hindmarsh-Rose simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_file;
    std::vector<std::string> settings;
    std::map<std::string, std::string> flags;
    bool strict = false;
    app.add_option("--config", config_file, "flat key = value config file (a manifest works too)");
    app.add_option("--set", settings, "override any config key: --set key=value (repeatable)");
    app.add_flag("--strict", strict, "exit 4 on diagnostic bound violations");
    const std::vector<std::pair<std::string, std::string>> value_flags = {
        {"--preset", "preset"}, {"--seed", "seed"},       {"--dt", "dt"},
        {"--grid", "grid"},     {"--eps", "eps"},         {"--out", "out"},
        {"--threads", "threads"}, {"--J", "J"},           {"--scheme", "scheme"},
        {"--t-end", "t_end"},   {"--ladder", "ladder"},   {"--truncation", "truncation_T"},
        {"--rho", "rho"},       {"--samples", "samples"}, {"--stride", "stride"},
    };
    for (const auto& [flag, key] : value_flags) {
        app.add_option_function<std::string>(
            flag, [&flags, k = key](const std::string& v) { flags[k] = v; }, "sets " + key);
    }
    const std::vector<std::string> commands = {"ode", "simulate", "pullback", "absorb", "attractor", "verify"};
    for (const auto& name : commands) {
        app.add_subcommand(name, "run the " + name + " experiment");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        out << "\nconfig keys:\n";
        for (const auto& [k, h] : config_keys()) out << "  " << k << ": " << h << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    RunConfig cfg;
    try {
        if (!config_file.empty()) {
            cfg = load_config(config_file);
        }
        cfg.command = app.get_subcommands().front()->get_name();
        if (auto it = flags.find("preset"); it != flags.end()) {
            apply_setting(cfg, "preset", it->second);
        }
        for (const auto& [k, v] : flags) {
            if (k != "preset") apply_setting(cfg, k, v);
        }
        for (const auto& s : settings) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("--set expects key=value, got '" + s + "'");
            }
            apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
        if (strict) cfg.strict = true;
        validate_config(cfg);
    } catch (const Error& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        return run(cfg, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace hrsim
