#include "hrsim/errors.hpp"
#include "hrsim/grid.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace hrsim;
using std::numbers::pi;

namespace {

ScalarField sample(const SpatialGrid& g, auto f) {
    ScalarField out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double x[3] = {0, 0, 0};
        for (int a = 0; a < g.dim(); ++a) x[a] = g.coordinate(i, a);
        out[i] = f(x[0], x[1], x[2]);
    }
    return out;
}

ScalarField random_field(const SpatialGrid& g, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> N;
    ScalarField f(g.size());
    for (double& x : f) x = N(gen);
    return f;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("grid geometry") {
    const SpatialGrid g(2, {4, 5, 1}, {2.0, 3.0, 1.0});
    CHECK(g.size() == 20);
    CHECK(g.spacing(0) == 0.5);
    CHECK(g.spacing(1) == doctest::Approx(0.6));
    CHECK(g.measure() == 6.0);
    CHECK(g.cell_volume() * static_cast<double>(g.size()) == doctest::Approx(g.measure()).epsilon(1e-15));
    CHECK(g.coordinate(0, 0) == 0.25);
    CHECK(SpatialGrid::parse("1:32:1.0") == SpatialGrid::box(1, 32, 1.0));
    CHECK(SpatialGrid::parse(SpatialGrid::box(3, 6, 2.5).spec()) == SpatialGrid::box(3, 6, 2.5));
    CHECK_THROWS_AS(SpatialGrid::parse("4:32:1"), ConfigError);
    CHECK_THROWS_AS(SpatialGrid::parse("1:1:1"), ConfigError);
    CHECK_THROWS_AS(SpatialGrid::parse("1:32"), ConfigError);
    CHECK_THROWS_AS(SpatialGrid::parse("1:32:-1"), ConfigError);
}

TEST_CASE("Laplacian stencil by hand") {
    const auto g = SpatialGrid::box(1, 3, 3.0);
    const auto lap = neumann_laplacian(ScalarField{0, 1, 0}, g);
    CHECK(lap == ScalarField{1, -2, 1});
    CHECK(neumann_laplacian(ScalarField(3, 4.2), g) == ScalarField(3, 0.0));
    CHECK_THROWS_AS(neumann_laplacian(ScalarField(4, 0.0), g), ShapeError);
}

TEST_CASE("Laplacian is self-adjoint, nonpositive and conservative") {
    for (const auto& g : {SpatialGrid::box(1, 40, 1.0), SpatialGrid::box(2, 12, 2.0),
                          SpatialGrid(3, {5, 6, 7}, {1.0, 1.5, 0.5})}) {
        const ScalarField f = random_field(g, 1), h = random_field(g, 2);
        const ScalarField lf = neumann_laplacian(f, g), lh = neumann_laplacian(h, g);
        const double lhs = inner(lf, h, g), rhs = inner(f, lh, g);
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
        CHECK(inner(lf, f, g) <= 0.0);
        double total = 0.0, scale = 0.0;
        for (double x : lf) {
            total += x * g.cell_volume();
            scale += std::abs(x) * g.cell_volume();
        }
        CHECK(std::abs(total) <= 1e-12 * scale);
    }
}

TEST_CASE("Laplacian converges at second order on cosine modes") {
    auto error = [](std::size_t n, int dim) {
        const auto g = SpatialGrid::box(dim, n, 1.0);
        auto f = [&](double x, double y, double z) {
            double v = std::cos(pi * x);
            if (dim > 1) v *= std::cos(2 * pi * y);
            if (dim > 2) v *= std::cos(pi * z);
            return v;
        };
        const double k2 = pi * pi * (1 + (dim > 1 ? 4 : 0) + (dim > 2 ? 1 : 0));
        const ScalarField exact = sample(g, [&](double x, double y, double z) { return -k2 * f(x, y, z); });
        return max_abs_diff(neumann_laplacian(sample(g, f), g), exact);
    };
    for (int dim : {1, 2}) {
        double prev = error(16, dim);
        for (std::size_t n : {32, 64, 128}) {
            const double e = error(n, dim);
            CHECK(std::log2(prev / e) == doctest::Approx(2.0).epsilon(0.05));
            prev = e;
        }
    }
    CHECK(std::log2(error(8, 3) / error(16, 3)) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("norms against analytic values") {
    const auto g = SpatialGrid::box(1, 10000, 1.0);
    const ScalarField one(g.size(), 1.0);
    CHECK(l2_norm(one, g) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(l4_norm(one, g) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(h1_seminorm(one, g) == 0.0);
    CHECK(l2_norm(ScalarField(g.size(), 0.0), g) == 0.0);

    const ScalarField x = sample(g, [](double x, double, double) { return x; });
    CHECK(std::abs(l2_norm(x, g) - 1 / std::sqrt(3.0)) < 1e-4);
    CHECK(std::abs(l4_norm(x, g) - std::pow(0.2, 0.25)) < 1e-4);
    const ScalarField c = sample(g, [](double x, double, double) { return std::cos(pi * x); });
    CHECK(std::abs(h1_seminorm(c, g) - pi / std::sqrt(2.0)) < 1e-4);
    CHECK(std::abs(l2_norm(c, g) - 1 / std::sqrt(2.0)) < 1e-4);
    CHECK(inner(x, x, g) == doctest::Approx(l2_norm(x, g) * l2_norm(x, g)).epsilon(1e-12));
}

TEST_CASE("state field helpers") {
    const auto g = SpatialGrid::box(1, 8, 1.0);
    const auto s = StateField::constant(g, 1, 1, 1);
    CHECK(l2_norm(s, g) == doctest::Approx(std::sqrt(3.0)));
    CHECK(s.conforms(g));
    CHECK(s.all_finite());
    CHECK(l2_norm(2.0 * s - s, g) == doctest::Approx(std::sqrt(3.0)));
    CHECK(h1_seminorm_sq(s, g) == 0.0);
    StateField bad = s;
    bad.V[3] = std::nan("");
    CHECK_FALSE(bad.all_finite());
    bad.Z.pop_back();
    CHECK_FALSE(bad.conforms(g));
    CHECK_THROWS_AS(check_conforms(bad, g), ShapeError);
}

TEST_CASE("binary snapshot round trip") {
    const SpatialGrid g(2, {3, 4, 1}, {1.0, 2.0, 1.0});
    StateField s = StateField::zeros(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.U[i] = 0.1 * static_cast<double>(i);
        s.V[i] = -std::sqrt(static_cast<double>(i));
        s.Z[i] = 1e-300 * static_cast<double>(i);
    }
    std::stringstream bin;
    write_field_binary(bin, s, g);
    SpatialGrid back = SpatialGrid::box(1, 2, 1.0);
    const StateField r = read_field_binary(bin, &back);
    CHECK(r == s);
    CHECK(back == g);

    std::ostringstream csv;
    write_field_csv(csv, s, g);
    CHECK(csv.str().rfind("index,", 0) == 0);
}
