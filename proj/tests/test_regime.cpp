#include "hrsim/errors.hpp"
#include "hrsim/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace hrsim;

namespace {

// u(t) = sin of a phase; each upward zero crossing is one spike.
OdeSeries synthetic(double T, double dt, auto phase) {
    OdeSeries s;
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * dt;
        s.t.push_back(t);
        s.u.push_back(std::sin(phase(t)));
        s.v.push_back(0);
        s.z.push_back(0);
    }
    return s;
}

// Bursts of `size` spikes spaced `intra` apart, repeating every `period`.
OdeSeries bursts(double T, double dt, int size, double intra, double period, double jitter = 0) {
    OdeSeries s;
    for (double t = 0; t <= T; t += dt) {
        const int k = static_cast<int>(t / period);
        const double local = t - k * period;
        const int m = size + (jitter > 0 && k % 3 == 1 ? 2 : 0);
        double u = -1;
        if (local < m * intra) u = std::sin(2 * std::numbers::pi * local / intra);
        s.t.push_back(t);
        s.u.push_back(u);
        s.v.push_back(0);
        s.z.push_back(0);
    }
    return s;
}

} // namespace

TEST_CASE("constant series rests") {
    OdeSeries s;
    for (int i = 0; i < 100; ++i) {
        s.t.push_back(i);
        s.u.push_back(-1.0);
        s.v.push_back(0);
        s.z.push_back(0);
    }
    const auto r = classify_regime(s, 10);
    CHECK(r.spike_count == 0);
    CHECK(r.label == "resting");
}

TEST_CASE("periodic spikes are tonic") {
    const auto s = synthetic(202, 0.01, [](double t) { return 2 * std::numbers::pi * t / 5.0; });
    const auto r = classify_regime(s, 22);
    CHECK(r.spike_count == 36);
    CHECK(r.isi_mean == doctest::Approx(5.0).epsilon(1e-6));
    CHECK(r.isi_cv < 1e-6);
    CHECK(r.label == "tonic-spiking");
}

TEST_CASE("repeating bursts are regular, irregular bursts chaotic") {
    const auto regular = classify_regime(bursts(2000, 0.01, 4, 1.0, 20.0), 100);
    CHECK(regular.bimodal);
    CHECK(regular.isi_cv > 0.5);
    CHECK(regular.label == "regular-bursting");

    const auto irregular = classify_regime(bursts(2000, 0.01, 4, 1.0, 20.0, 1.0), 100);
    CHECK(irregular.bimodal);
    CHECK(irregular.burst_size_cv > 0.05);
    CHECK(irregular.label == "chaotic-bursting");
}

TEST_CASE("unimodal irregular intervals") {
    const auto s = synthetic(400, 0.01, [](double t) { return 2 * std::numbers::pi * (t / 5.0 + 0.3 * std::sin(t / 7.0)); });
    const auto r = classify_regime(s, 10);
    CHECK(r.isi_cv > 0.05);
    CHECK_FALSE(r.bimodal);
    CHECK(r.label == "irregular-spiking");
}

TEST_CASE("empty window after the transient") {
    const auto s = synthetic(10, 0.1, [](double t) { return t; });
    CHECK_THROWS_AS(classify_regime(s, 20), DomainError);
}

TEST_CASE("model regimes") {
    const HRParameters p = preset("paper-typical");
    const Triple x0{-1.6, -10, 2};
    CHECK(classify_regime(ode_trajectory(x0, p, 0.0, 3000, 0.01), 1000).label == "resting");
    const auto burst = classify_regime(ode_trajectory(x0, p, 3.1, 3000, 0.01), 1000);
    CHECK(burst.spike_count > 0);
    CHECK(burst.isi_cv > 0.5);
}
