#include "hrsim/cli.hpp"
#include "hrsim/config.hpp"
#include "hrsim/errors.hpp"
#include "hrsim/report_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace hrsim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hrsim_test_" + name);
    fs::remove_all(dir);
    return dir;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "hrsim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("config: parse, serialize, parse is the identity") {
    RunConfig c;
    c.command = "absorb";
    c.params.J = 1.2345678901234567;
    c.params.eps = 0.3;
    c.ladder = {0.5, 1, 3};
    c.seed = 18446744073709551615ull;
    c.threads = 4;
    c.strict = true;
    c.dt = 1.0 / 3.0;
    std::istringstream in(serialize_config(c));
    CHECK(parse_config(in) == c);

    std::istringstream def(serialize_config(RunConfig{}));
    CHECK(parse_config(def) == RunConfig{});
}

TEST_CASE("config: comments, presets and errors") {
    std::istringstream in("# comment\n\npreset = dissipative  # trailing\nJ = 0.5\nmanifest.exit_code = 4\n");
    const RunConfig c = parse_config(in);
    CHECK(c.preset == "dissipative");
    CHECK(c.params.J == 0.5);
    CHECK(c.params.alpha == 0.0);

    // the preset is applied before the other keys whatever the line order
    std::istringstream late("J = 0.5\npreset = paper-typical\n");
    CHECK(parse_config(late).params.J == 0.5);

    for (const char* bad : {"nonsense = 1\n", "dt = abc\n", "dt\n", "samples = -3\n", "strict = maybe\n",
                            "preset = nope\n", "ladder = \n", "dt = nan\n"}) {
        std::istringstream s(bad);
        CHECK_THROWS_AS(parse_config(s), ConfigError);
    }
    CHECK(parse_ladder("1, 2,4") == std::vector<double>{1, 2, 4});
    CHECK_THROWS_AS(load_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("config: validation") {
    RunConfig c;
    CHECK_NOTHROW(validate_config(c));
    c.dt = 0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = RunConfig{};
    c.ladder = {1, 4, 2};
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = RunConfig{};
    c.grid = "2:1:1";
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = RunConfig{};
    c.params.r = -1;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = RunConfig{};
    c.command = "dance";
    CHECK_THROWS_AS(validate_config(c), ConfigError);
    c = RunConfig{};
    c.threads = 0;
    CHECK_THROWS_AS(validate_config(c), ConfigError);
}

TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 1e100}) {
        CHECK(std::stod(format_number(x)) == x);
    }
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("git blob hash") {
    CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_sha1("hello world\n") == "3b18e512dba79e4c8300dd08aeb37f8e728b8dad");
}

TEST_CASE("cli: ode at J = 0 rests") {
    const auto dir = scratch("ode");
    std::string out;
    CHECK(cli({"ode", "--preset", "paper-typical", "--J", "0", "--out", dir.string()}, &out) == kExitOk);
    CHECK(out.find("resting") != std::string::npos);
    CHECK(slurp(dir / "regime.csv").find("label,resting") != std::string::npos);
    CHECK(slurp(dir / "ode.csv").rfind("t,u,v,z\n", 0) == 0);
    CHECK(fs::exists(dir / "plot.gp"));
    CHECK(fs::exists(dir / "manifest.txt"));
}

TEST_CASE("cli: exit codes") {
    const auto dir = scratch("codes");
    std::string err;
    CHECK(cli({"simulate", "--dt", "-1", "--out", dir.string()}, nullptr, &err) == kExitConfig);
    CHECK(err.find("dt") != std::string::npos);
    CHECK(cli({"simulate", "--bogus"}) == kExitConfig);
    CHECK(cli({}) == kExitConfig);
    CHECK(cli({"simulate", "--preset", "nope"}) == kExitConfig);
    CHECK(cli({"simulate", "--set", "nokey"}) == kExitConfig);
    CHECK(cli({"simulate", "--config", "/nonexistent.cfg"}) == kExitConfig);

    // explicit Euler on the cubic reaction diverges at a huge step
    CHECK(cli({"simulate", "--dt", "0.5", "--t-end", "5", "--set", "init_radius=50", "--out", dir.string()},
              nullptr, &err) == kExitNumerical);
    CHECK(err.find("blow-up") != std::string::npos);

    // --strict turns a diagnostic violation into exit 4; without it the run succeeds
    const std::vector<std::string> absorb = {"absorb", "--samples", "2", "--ladder", "1,2,3", "--truncation",
                                             "3000", "--set", "uniform_tol=0", "--out", dir.string()};
    CHECK(cli(absorb) == kExitOk);
    auto strict = absorb;
    strict.push_back("--strict");
    CHECK(cli(strict) == kExitViolation);
    CHECK(slurp(dir / "manifest.txt").find("manifest.exit_code = 4") != std::string::npos);

    std::string help;
    CHECK(cli({"--help"}, &help) == kExitOk);
    CHECK(help.find("truncation_T") != std::string::npos);
}

TEST_CASE("cli: absorb with eps = 0 reports the closed form") {
    const auto dir = scratch("absorb");
    CHECK(cli({"absorb", "--eps", "0", "--truncation", "2000", "--samples", "2", "--ladder", "1,2",
               "--out", dir.string()}) == kExitOk);
    std::istringstream bounds(slurp(dir / "bounds.csv"));
    std::string line;
    double rel = -1;
    while (std::getline(bounds, line)) {
        if (line.rfind("r0_relative_difference,", 0) == 0) {
            rel = std::stod(line.substr(line.find(',') + 1));
        }
    }
    CHECK(rel >= 0.0);
    CHECK(rel < 1e-8);
}

TEST_CASE("cli: manifest re-run reproduces every CSV byte") {
    const auto a = scratch("manifest_a"), b = scratch("manifest_b");
    REQUIRE(cli({"simulate", "--t-end", "0.2", "--eps", "0.4", "--stride", "10", "--out", a.string()}) == kExitOk);
    // the manifest is a config file; only the output directory changes
    REQUIRE(cli({"simulate", "--config", (a / "manifest.txt").string(), "--out", b.string()}) == kExitOk);
    for (const char* f : {"trajectory.csv", "energy.csv", "summary.csv"}) {
        CHECK(slurp(a / f) == slurp(b / f));
        CHECK(slurp(a / f).size() > 10);
    }
    const std::string m = slurp(a / "manifest.txt");
    CHECK(m.find("manifest.content_hash = ") != std::string::npos);
    CHECK(m.find("manifest.file.trajectory.csv = " + git_blob_sha1(slurp(a / "trajectory.csv"))) !=
          std::string::npos);
    CHECK(m.find("eps = 0.4") != std::string::npos);
}

TEST_CASE("cli: simulate writes snapshots and the strict energy audit passes") {
    const auto dir = scratch("snap");
    CHECK(cli({"simulate", "--t-end", "0.1", "--strict", "--set", "snapshots=true", "--scheme",
               "direct-stratonovich", "--out", dir.string()}) == kExitOk);
    std::ifstream bin(dir / "final.bin", std::ios::binary);
    SpatialGrid g = SpatialGrid::box(1, 2, 1);
    const StateField f = read_field_binary(bin, &g);
    CHECK(g == SpatialGrid::box(1, 32, 1));
    CHECK(f.all_finite());
    CHECK(slurp(dir / "summary.csv").find("scheme,direct-stratonovich") != std::string::npos);
}

TEST_CASE("cli: verify passes with defaults") {
    const auto dir = scratch("verify");
    std::string out;
    CHECK(cli({"verify", "--out", dir.string()}, &out) == kExitOk);
    CHECK(out.find("FAIL") == std::string::npos);
    CHECK(slurp(dir / "verify.csv").rfind("check,passed,detail\n", 0) == 0);
}

TEST_CASE("cli: outputs do not depend on the thread count") {
    const auto a = scratch("threads_1"), b = scratch("threads_4");
    const std::vector<std::string> base = {"absorb", "--samples", "4", "--ladder", "1,2,4", "--truncation", "3000"};
    auto with = [&](const fs::path& d, const char* th) {
        auto v = base;
        v.insert(v.end(), {"--threads", th, "--out", d.string()});
        return v;
    };
    REQUIRE(cli(with(a, "1")) == kExitOk);
    REQUIRE(cli(with(b, "4")) == kExitOk);
    for (const char* f : {"absorb.csv", "absorb_samples.csv", "bounds.csv", "summary.csv"}) {
        CHECK(slurp(a / f) == slurp(b / f));
    }
}

TEST_CASE("report writers") {
    std::ostringstream os;
    write_summary_csv(os, {{"a", "1"}, {"b", "x"}});
    CHECK(os.str() == "key,value\na,1\nb,x\n");

    OdeSeries s{{0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}, {0, 0, 0, 0, 0}, {0, 0, 0, 0, 0}};
    std::ostringstream ode;
    write_ode_csv(ode, s, 3);
    CHECK(ode.str() == "t,u,v,z\n0,0,0,0\n3,3,0,0\n4,4,0,0\n");

    PullbackReport rep;
    rep.pullback_times = {1, 2};
    rep.endpoint_norms = {3, 50};
    rep.R0_used = 10;
    std::ostringstream pb;
    write_pullback_csv(pb, rep);
    CHECK(pb.str() == "t,sup_norm,R0,within_bound\n1,3,10,1\n2,50,10,0\n");

    TheoreticalBounds b;
    b.r0 = 2;
    b.truncation_T = 100;
    b.tail_bound = 0.5;
    std::ostringstream bc;
    write_bounds_csv(bc, b, {{"extra", 7}});
    CHECK(bc.str().rfind("name,value,truncation_T,tail_bound\nr0,2,100,0.5\n", 0) == 0);
    CHECK(bc.str().find("extra,7,100,0.5\n") != std::string::npos);

    std::ostringstream gp;
    write_plot_script(gp, {{"x.csv", "title", 1, {{2, "y"}}, true}});
    CHECK(gp.str().find("x.csv") != std::string::npos);
    CHECK(gp.str().find("logscale") != std::string::npos);
}
