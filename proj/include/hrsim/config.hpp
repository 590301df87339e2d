#pragma once

#include "hrsim/model.hpp"
#include "hrsim/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace hrsim {

/// Everything a CLI run depends on. Serialized as flat `key = value` lines;
/// `#` starts a comment. Keys prefixed `manifest.` are ignored on input so a
/// run manifest can be fed back as a config file.
struct RunConfig {
    std::string command = "simulate";
    std::string preset = "paper-typical";
    HRParameters params = hrsim::preset("paper-typical");
    std::string grid = "1:32:1";
    std::uint64_t seed = 42;

    double dt = 1e-3;
    double path_dt = 0.0;        ///< lattice spacing of the noise path; 0 means dt
    double t_end = 1.0;          ///< simulate: integration horizon
    double init_radius = 1.0;    ///< simulate, pullback: L2 norm of the sampled g0
    Scheme scheme = Scheme::TransformedImex;
    std::size_t stride = 1;
    double cg_tol = 1e-10;
    std::size_t cg_iter_factor = 10;
    double energy_tol_scale = 1.0;

    double ode_dt = 0.01;
    double ode_T = 3000.0;
    double transient = 1000.0;
    std::size_t ode_stride = 10;
    double u0 = -1.6;
    double v0 = -10.0;
    double z0 = 2.0;
    RegimeThresholds regime;

    std::vector<double> ladder{1, 2, 4, 8, 16, 32};
    double truncation_T = 6000.0;
    double quad_dt = 0.01;
    double tail_rel_tol = 0.1;
    double eta = 1.0;
    double rho = 10.0;
    std::size_t samples = 8;
    double radius_cap = 10.0;
    double decay_rel_tol = 0.05;
    double cauchy_tol = 1e-6;
    double uniform_tol = 0.1;    ///< admissible variation of the sup norm over the ladder tail

    std::string out = "out";
    unsigned threads = 1;
    bool strict = false;
    bool snapshots = false;

    double effective_path_dt() const { return path_dt > 0.0 ? path_dt : dt; }

    bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError on unknown keys, malformed values or invalid ranges.
RunConfig parse_config(std::istream& in, const RunConfig& base = {});
RunConfig load_config(const std::string& file, const RunConfig& base = {});

/// Sets one key; the same vocabulary as the file format.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

/// Documented key list with one-line descriptions.
std::vector<std::pair<std::string, std::string>> config_keys();

/// Range checks for every field; throws ConfigError.
void validate_config(const RunConfig& cfg);

std::vector<double> parse_ladder(const std::string& text);

} // namespace hrsim
