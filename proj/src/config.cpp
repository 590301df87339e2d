#include "hrsim/config.hpp"

#include "hrsim/errors.hpp"
#include "hrsim/grid.hpp"
#include "hrsim/report_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace hrsim {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
        throw ConfigError("config key '" + key + "': expected a finite number, got '" + v + "'");
    }
    return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t x = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + key + "': expected a nonnegative integer, got '" + v + "'");
    }
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': expected true or false, got '" + v + "'");
}

struct Entry {
    const char* key;
    const char* help;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

Entry real(const char* key, const char* help, double RunConfig::*field) {
    return {key, help, [field](const RunConfig& c) { return format_number(c.*field); },
            [key, field](RunConfig& c, const std::string& v) { c.*field = to_double(key, v); }};
}

Entry param(const char* key, const char* help, double HRParameters::*field) {
    return {key, help, [field](const RunConfig& c) { return format_number(c.params.*field); },
            [key, field](RunConfig& c, const std::string& v) { c.params.*field = to_double(key, v); }};
}

Entry threshold(const char* key, const char* help, double RegimeThresholds::*field) {
    return {key, help, [field](const RunConfig& c) { return format_number(c.regime.*field); },
            [key, field](RunConfig& c, const std::string& v) { c.regime.*field = to_double(key, v); }};
}

Entry count(const char* key, const char* help, std::size_t RunConfig::*field) {
    return {key, help, [field](const RunConfig& c) { return std::to_string(c.*field); },
            [key, field](RunConfig& c, const std::string& v) {
                c.*field = static_cast<std::size_t>(to_uint(key, v));
            }};
}

Entry flag(const char* key, const char* help, bool RunConfig::*field) {
    return {key, help, [field](const RunConfig& c) { return std::string(c.*field ? "true" : "false"); },
            [key, field](RunConfig& c, const std::string& v) { c.*field = to_bool(key, v); }};
}

Entry text(const char* key, const char* help, std::string RunConfig::*field) {
    return {key, help, [field](const RunConfig& c) { return c.*field; },
            [field](RunConfig& c, const std::string& v) { c.*field = v; }};
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        text("command", "ode | simulate | pullback | absorb | attractor | verify", &RunConfig::command),
        {"preset", "named parameter set; resets all model parameters",
         [](const RunConfig& c) { return c.preset; },
         [](RunConfig& c, const std::string& v) {
             c.params = hrsim::preset(v);
             c.preset = v;
         }},
        param("d1", "diffusion of u", &HRParameters::d1),
        param("d2", "diffusion of v", &HRParameters::d2),
        param("d3", "diffusion of z", &HRParameters::d3),
        param("a", "quadratic coefficient of phi", &HRParameters::a),
        param("b", "cubic coefficient of phi", &HRParameters::b),
        param("alpha", "constant of psi", &HRParameters::alpha),
        param("beta", "quadratic coefficient of psi", &HRParameters::beta),
        param("q", "slow-channel gain", &HRParameters::q),
        param("r", "slow-channel decay", &HRParameters::r),
        param("J", "injected current", &HRParameters::J),
        param("c", "reversal level of the slow channel", &HRParameters::c),
        param("eps", "noise intensity", &HRParameters::eps),
        text("grid", "dim:cells:extent", &RunConfig::grid),
        {"seed", "master seed of every random stream",
         [](const RunConfig& c) { return std::to_string(c.seed); },
         [](RunConfig& c, const std::string& v) { c.seed = to_uint("seed", v); }},
        real("dt", "time step of the PDE solvers", &RunConfig::dt),
        real("path_dt", "lattice spacing of the noise path (0: same as dt)", &RunConfig::path_dt),
        real("t_end", "simulate: final time", &RunConfig::t_end),
        real("init_radius", "simulate/pullback: L2 norm of the sampled initial state", &RunConfig::init_radius),
        {"scheme", "transformed-imex | direct-stratonovich",
         [](const RunConfig& c) { return to_string(c.scheme); },
         [](RunConfig& c, const std::string& v) { c.scheme = scheme_from_string(v); }},
        count("stride", "snapshot stride in steps", &RunConfig::stride),
        real("cg_tol", "relative residual of the implicit diffusion solve", &RunConfig::cg_tol),
        count("cg_iter_factor", "CG iteration cap per cell", &RunConfig::cg_iter_factor),
        real("energy_tol_scale", "energy audit tolerance is energy_tol_scale * dt", &RunConfig::energy_tol_scale),
        real("ode_dt", "ode: RK4 step", &RunConfig::ode_dt),
        real("ode_T", "ode: horizon", &RunConfig::ode_T),
        real("transient", "ode: time discarded before spike detection", &RunConfig::transient),
        count("ode_stride", "ode: CSV output stride", &RunConfig::ode_stride),
        real("u0", "ode: initial u", &RunConfig::u0),
        real("v0", "ode: initial v", &RunConfig::v0),
        real("z0", "ode: initial z", &RunConfig::z0),
        threshold("u_threshold", "spike detection level", &RegimeThresholds::u_threshold),
        threshold("tonic_cv_max", "ISI CV below which spiking is tonic", &RegimeThresholds::tonic_cv_max),
        threshold("chaotic_cv_min", "ISI CV from which bursting may be chaotic", &RegimeThresholds::chaotic_cv_min),
        threshold("burst_gap_ratio", "ISI gap ratio that separates bursts", &RegimeThresholds::burst_gap_ratio),
        threshold("burst_repeat_cv", "burst size/period CV below which bursting is periodic", &RegimeThresholds::burst_repeat_cv),
        {"ladder", "comma-separated pullback times",
         [](const RunConfig& c) {
             std::string s;
             for (std::size_t i = 0; i < c.ladder.size(); ++i) {
                 s += (i ? "," : "") + format_number(c.ladder[i]);
             }
             return s;
         },
         [](RunConfig& c, const std::string& v) { c.ladder = parse_ladder(v); }},
        real("truncation_T", "truncation of the improper bound integrals", &RunConfig::truncation_T),
        real("quad_dt", "trapezoid step of the bound integrals", &RunConfig::quad_dt),
        real("tail_rel_tol", "admissible truncation tail relative to r0", &RunConfig::tail_rel_tol),
        real("eta", "Sobolev constant in the H1 bounds", &RunConfig::eta),
        real("rho", "absorb: radius of the sampled initial ball", &RunConfig::rho),
        count("samples", "absorb/attractor: number of initial states", &RunConfig::samples),
        real("radius_cap", "attractor: largest simulable sampling radius", &RunConfig::radius_cap),
        real("decay_rel_tol", "attractor: slack for non-increasing distances", &RunConfig::decay_rel_tol),
        real("cauchy_tol", "pullback: successive endpoint distance counted as converged", &RunConfig::cauchy_tol),
        real("uniform_tol", "absorb: admissible sup-norm variation over the ladder tail", &RunConfig::uniform_tol),
        text("out", "output directory", &RunConfig::out),
        {"threads", "worker threads for ensembles",
         [](const RunConfig& c) { return std::to_string(c.threads); },
         [](RunConfig& c, const std::string& v) { c.threads = static_cast<unsigned>(to_uint("threads", v)); }},
        flag("strict", "exit 4 on diagnostic bound violations", &RunConfig::strict),
        flag("snapshots", "simulate: also write binary field snapshots", &RunConfig::snapshots),
    };
    return table;
}

const Entry& find_entry(const std::string& key) {
    for (const auto& e : entries()) {
        if (key == e.key) {
            return e;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

} // namespace

std::vector<double> parse_ladder(const std::string& textv) {
    std::vector<double> out;
    std::stringstream ss(textv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(to_double("ladder", trim(item)));
    }
    if (out.empty()) {
        throw ConfigError("config key 'ladder': empty list");
    }
    return out;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    find_entry(key).set(cfg, value);
}

RunConfig parse_config(std::istream& in, const RunConfig& base) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("manifest.", 0) == 0) {
            continue;
        }
        pairs.emplace_back(std::move(key), trim(line.substr(eq + 1)));
    }
    RunConfig cfg = base;
    // the preset resets the model parameters, so it goes first
    for (const auto& [k, v] : pairs) {
        if (k == "preset") {
            apply_setting(cfg, k, v);
        }
    }
    for (const auto& [k, v] : pairs) {
        if (k != "preset") {
            apply_setting(cfg, k, v);
        }
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::string& file, const RunConfig& base) {
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("cannot open config file '" + file + "'");
    }
    return parse_config(in, base);
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    for (const auto& e : entries()) {
        os << e.key << " = " << e.get(cfg) << '\n';
    }
    return os.str();
}

std::vector<std::pair<std::string, std::string>> config_keys() {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : entries()) {
        out.emplace_back(e.key, e.help);
    }
    return out;
}

void validate_config(const RunConfig& c) {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) {
            throw ConfigError("invalid configuration: " + what);
        }
    };
    static const std::vector<std::string> commands = {"ode",    "simulate",  "pullback",
                                                      "absorb", "attractor", "verify"};
    require(std::find(commands.begin(), commands.end(), c.command) != commands.end(),
            "unknown command '" + c.command + "'");
    try {
        c.params.validate();
        (void)SpatialGrid::parse(c.grid);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    require(c.dt > 0.0, "dt must be positive");
    require(c.path_dt >= 0.0, "path_dt must be nonnegative");
    require(c.t_end > 0.0, "t_end must be positive");
    require(c.init_radius >= 0.0, "init_radius must be nonnegative");
    require(c.scheme != Scheme::OdeRk4, "scheme must be transformed-imex or direct-stratonovich");
    require(c.stride >= 1, "stride must be at least 1");
    require(c.cg_tol > 0.0 && c.cg_tol < 1.0, "cg_tol must lie in (0, 1)");
    require(c.cg_iter_factor >= 1, "cg_iter_factor must be at least 1");
    require(c.energy_tol_scale >= 0.0, "energy_tol_scale must be nonnegative");
    require(c.ode_dt > 0.0 && c.ode_T > 0.0, "ode_dt and ode_T must be positive");
    require(c.transient >= 0.0 && c.transient < c.ode_T, "transient must lie in [0, ode_T)");
    require(c.ode_stride >= 1, "ode_stride must be at least 1");
    require(c.regime.tonic_cv_max >= 0.0 && c.regime.chaotic_cv_min >= 0.0 &&
                c.regime.burst_gap_ratio > 1.0 && c.regime.burst_repeat_cv >= 0.0,
            "regime thresholds out of range");
    for (std::size_t i = 0; i < c.ladder.size(); ++i) {
        require(c.ladder[i] >= 0.0, "ladder entries must be nonnegative");
        require(i == 0 || c.ladder[i] >= c.ladder[i - 1], "ladder must be nondecreasing");
    }
    require(c.truncation_T > 2.0, "truncation_T must exceed 2");
    require(c.truncation_T >= c.ladder.back(), "truncation_T must cover the ladder");
    require(c.quad_dt > 0.0, "quad_dt must be positive");
    require(c.tail_rel_tol > 0.0, "tail_rel_tol must be positive");
    require(c.eta > 0.0, "eta must be positive");
    require(c.rho >= 0.0, "rho must be nonnegative");
    require(c.samples >= 1, "samples must be at least 1");
    require(c.radius_cap > 0.0, "radius_cap must be positive");
    require(c.decay_rel_tol >= 0.0 && c.cauchy_tol >= 0.0 && c.uniform_tol >= 0.0,
            "tolerances must be nonnegative");
    require(!c.out.empty(), "out must name a directory");
    require(c.threads >= 1 && c.threads <= 256, "threads must lie in [1, 256]");
}

} // namespace hrsim
