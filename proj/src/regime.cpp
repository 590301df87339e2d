#include "hrsim/errors.hpp"
#include "hrsim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hrsim {

namespace {

double mean(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double coefficient_of_variation(const std::vector<double>& x) {
    if (x.size() < 2) {
        return 0.0;
    }
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m) * (v - m);
    }
    const double sd = std::sqrt(ss / static_cast<double>(x.size()));
    return m > 0.0 ? sd / m : 0.0;
}

} // namespace

RegimeReport classify_regime(const OdeSeries& series, double transient_cut,
                             const RegimeThresholds& th) {
    if (series.t.size() != series.u.size()) {
        throw ShapeError("classify_regime: time and u series differ in length");
    }
    const auto first = std::lower_bound(series.t.begin(), series.t.end(), transient_cut);
    const auto start = static_cast<std::size_t>(first - series.t.begin());
    if (series.t.size() < 2 || start + 1 >= series.t.size()) {
        throw DomainError("classify_regime: empty window after the transient");
    }

    RegimeReport rep;
    for (std::size_t i = start + 1; i < series.t.size(); ++i) {
        const double u0 = series.u[i - 1];
        const double u1 = series.u[i];
        if (u0 < th.u_threshold && u1 >= th.u_threshold) {
            // linear interpolation of the crossing time
            const double w = (th.u_threshold - u0) / (u1 - u0);
            rep.spike_times.push_back(series.t[i - 1] + w * (series.t[i] - series.t[i - 1]));
        }
    }
    rep.spike_count = rep.spike_times.size();
    for (std::size_t i = 1; i < rep.spike_times.size(); ++i) {
        rep.isi.push_back(rep.spike_times[i] - rep.spike_times[i - 1]);
    }

    if (rep.spike_count == 0) {
        rep.label = "resting";
        return rep;
    }
    if (rep.isi.size() < 2) {
        rep.isi_mean = rep.isi.empty() ? 0.0 : rep.isi.front();
        rep.label = "irregular-spiking";
        return rep;
    }
    rep.isi_mean = mean(rep.isi);
    rep.isi_cv = coefficient_of_variation(rep.isi);

    // Bimodality: the largest ratio between consecutive sorted ISIs splits
    // intra-burst from inter-burst intervals.
    std::vector<double> sorted = rep.isi;
    std::sort(sorted.begin(), sorted.end());
    double best_ratio = 1.0;
    double split = sorted.back();
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i - 1] > 0.0) {
            const double ratio = sorted[i] / sorted[i - 1];
            if (ratio > best_ratio) {
                best_ratio = ratio;
                split = 0.5 * (sorted[i] + sorted[i - 1]);
            }
        }
    }
    rep.bimodal = best_ratio >= th.burst_gap_ratio;
    if (rep.bimodal) {
        std::vector<double> sizes;
        std::vector<double> periods;
        std::size_t current = 1;
        for (double isi : rep.isi) {
            if (isi > split) {
                periods.push_back(isi);
                sizes.push_back(static_cast<double>(current));
                current = 1;
            } else {
                ++current;
            }
        }
        // the first and last bursts are possibly truncated by the window
        if (sizes.size() > 2) {
            sizes.erase(sizes.begin());
        }
        rep.burst_size_cv = coefficient_of_variation(sizes);
        rep.burst_period_cv = coefficient_of_variation(periods);
    }

    if (rep.isi_cv < th.tonic_cv_max) {
        rep.label = "tonic-spiking";
    } else if (rep.bimodal) {
        const bool repeating = rep.burst_size_cv < th.burst_repeat_cv &&
                               rep.burst_period_cv < th.burst_repeat_cv;
        rep.label = (rep.isi_cv >= th.chaotic_cv_min && !repeating) ? "chaotic-bursting"
                                                                    : "regular-bursting";
    } else {
        rep.label = "irregular-spiking";
    }
    return rep;
}

} // namespace hrsim
