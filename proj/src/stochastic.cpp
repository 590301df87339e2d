#include "hrsim/stochastic.hpp"

#include "hrsim/errors.hpp"
#include "hrsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <string>

namespace hrsim {

namespace {

// Fraction of a lattice spacing within which an argument snaps to the node,
// so that times built as t0 + k*dt hit stored samples exactly.
constexpr double kSnap = 1e-7;

std::size_t node_count_for(double extent, double dt) {
    return static_cast<std::size_t>(std::ceil(extent / dt - 1e-9));
}

} // namespace

WienerPath::WienerPath(std::uint64_t seed, double dt_grid, std::size_t zero_index,
                       std::shared_ptr<const std::vector<double>> values, double offset)
    : seed_(seed), dt_grid_(dt_grid), zero_index_(zero_index), values_(std::move(values)),
      offset_(offset) {
    base_ = raw(offset_);
}

WienerPath WienerPath::sample(std::uint64_t seed, double t_min, double t_max, double dt_grid) {
    if (!(dt_grid > 0.0) || !std::isfinite(dt_grid)) {
        throw DomainError("sample_path: dt_grid must be positive");
    }
    if (t_min > 0.0 || t_max < 0.0) {
        throw DomainError("sample_path: horizon must contain 0 (t_min <= 0 <= t_max)");
    }
    const std::size_t n_back = node_count_for(-t_min, dt_grid);
    const std::size_t n_fwd = node_count_for(t_max, dt_grid);
    const double sd = std::sqrt(dt_grid);

    auto values = std::make_shared<std::vector<double>>(n_back + n_fwd + 1, 0.0);
    auto& v = *values;
    for (std::size_t k = 0; k < n_fwd; ++k) {
        v[n_back + k + 1] = v[n_back + k] + sd * rng::normal(seed, rng::kForwardStream, k);
    }
    for (std::size_t k = 0; k < n_back; ++k) {
        v[n_back - k - 1] = v[n_back - k] + sd * rng::normal(seed, rng::kBackwardStream, k);
    }
    return WienerPath(seed, dt_grid, n_back, std::move(values), 0.0);
}

WienerPath WienerPath::from_lattice(double dt_grid, std::size_t zero_index,
                                    std::vector<double> values, std::uint64_t seed) {
    if (!(dt_grid > 0.0)) {
        throw DomainError("from_lattice: dt_grid must be positive");
    }
    if (zero_index >= values.size() || values[zero_index] != 0.0) {
        throw DomainError("from_lattice: value at t = 0 must be exactly 0");
    }
    return WienerPath(seed, dt_grid, zero_index,
                      std::make_shared<const std::vector<double>>(std::move(values)), 0.0);
}

double WienerPath::t_min() const noexcept {
    return -static_cast<double>(zero_index_) * dt_grid_ - offset_;
}

double WienerPath::t_max() const noexcept {
    return static_cast<double>(values_->size() - 1 - zero_index_) * dt_grid_ - offset_;
}

bool WienerPath::covers(double t) const noexcept {
    const double pos = (t + offset_) / dt_grid_ + static_cast<double>(zero_index_);
    return pos >= -kSnap && pos <= static_cast<double>(values_->size() - 1) + kSnap;
}

double WienerPath::node_time(std::size_t k) const noexcept {
    return (static_cast<double>(k) - static_cast<double>(zero_index_)) * dt_grid_ - offset_;
}

double WienerPath::node_value(std::size_t k) const {
    return (*values_)[k] - base_;
}

double WienerPath::raw(double t) const {
    const double pos = t / dt_grid_ + static_cast<double>(zero_index_);
    const double last = static_cast<double>(values_->size() - 1);
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) < kSnap && nearest >= 0.0 && nearest <= last) {
        return (*values_)[static_cast<std::size_t>(nearest)];
    }
    if (pos < 0.0 || pos > last) {
        throw RangeError("WienerPath: t = " + std::to_string(t) +
                         " outside stored horizon; resample with a wider horizon");
    }
    const double k = std::floor(pos);
    const auto i = static_cast<std::size_t>(k);
    const double frac = pos - k;
    const auto& v = *values_;
    return v[i] + frac * (v[i + 1] - v[i]);
}

double WienerPath::evaluate(double t) const {
    return raw(t + offset_) - base_;
}

WienerPath WienerPath::shifted(double s) const {
    if (!covers(s)) {
        throw RangeError("shift: offset " + std::to_string(s) +
                         " exhausts the stored window; resample with a wider horizon");
    }
    return WienerPath(seed_, dt_grid_, zero_index_, values_, offset_ + s);
}

WienerPath sample_path(std::uint64_t seed, double t_min, double t_max, double dt_grid) {
    return WienerPath::sample(seed, t_min, t_max, dt_grid);
}

double evaluate(const WienerPath& path, double t) {
    return path.evaluate(t);
}

WienerPath shift(const WienerPath& path, double s) {
    return path.shifted(s);
}

double q_weight(const WienerPath& path, double eps, double t) {
    if (eps == 0.0) {
        return 1.0;
    }
    return std::exp(-eps * path.evaluate(t));
}

double sublinear_growth_stat(const WienerPath& path, double t_tail) {
    if (!(t_tail > 0.0)) {
        throw DomainError("sublinear_growth_stat: t_tail must be positive");
    }
    double best = -1.0;
    for (std::size_t k = 0; k < path.node_count(); ++k) {
        const double t = path.node_time(k);
        if (std::abs(t) >= t_tail * (1.0 - 1e-12)) {
            best = std::max(best, std::abs(path.node_value(k)) / std::abs(t));
        }
    }
    if (best < 0.0) {
        throw DomainError("sublinear_growth_stat: no lattice nodes with |t| >= t_tail");
    }
    return best;
}

double growth_rate_on(const WienerPath& path, double t_from, double t_to) {
    double best = -1.0;
    for (std::size_t k = 0; k < path.node_count(); ++k) {
        const double t = path.node_time(k);
        if (t >= t_from && t <= t_to && t != 0.0) {
            best = std::max(best, std::abs(path.node_value(k)) / std::abs(t));
        }
    }
    if (best < 0.0) {
        throw DomainError("growth_rate_on: no lattice nodes in window");
    }
    return best;
}

double holder_quotient(const WienerPath& path, double gamma, double window_start) {
    if (!(gamma > 0.0 && gamma < 0.5)) {
        throw DomainError("holder_quotient: gamma must lie in (0, 1/2)");
    }
    const double a = window_start;
    const double b = window_start + 1.0;
    if (!path.covers(a) || !path.covers(b)) {
        throw RangeError("holder_quotient: window outside stored horizon");
    }
    std::vector<double> ts;
    std::vector<double> ws;
    const double h = path.dt_grid();
    for (std::size_t k = 0; k < path.node_count(); ++k) {
        const double t = path.node_time(k);
        if (t >= a - 1e-9 * h && t <= b + 1e-9 * h) {
            ts.push_back(t);
            ws.push_back(path.node_value(k));
        }
    }
    double best = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            const double q = std::abs(ws[j] - ws[i]) / std::pow(ts[j] - ts[i], gamma);
            best = std::max(best, q);
        }
    }
    return best;
}

ScalarSDEResult integrate_exact_sde(const WienerPath& path, double lambda, double t_end, double dt) {
    if (!(dt > 0.0)) {
        throw DomainError("integrate_exact_sde: dt must be positive");
    }
    if (t_end < 0.0) {
        throw DomainError("integrate_exact_sde: t_end must be >= 0");
    }
    if (!path.covers(0.0) || !path.covers(t_end)) {
        throw RangeError("integrate_exact_sde: [0, t_end] outside stored horizon");
    }
    const std::size_t n = node_count_for(t_end, dt);
    ScalarSDEResult out;
    out.times.reserve(n + 1);
    out.numeric.reserve(n + 1);
    out.exact.reserve(n + 1);

    double x = 1.0;
    double w_prev = path.evaluate(0.0);
    out.times.push_back(0.0);
    out.numeric.push_back(x);
    out.exact.push_back(std::exp(-lambda * w_prev));
    for (std::size_t k = 0; k < n; ++k) {
        const double t_next = (k + 1 == n) ? t_end : static_cast<double>(k + 1) * dt;
        const double w_next = path.evaluate(t_next);
        const double dw = w_next - w_prev;
        const double predictor = x - lambda * x * dw;
        x += -0.5 * lambda * (x + predictor) * dw;
        out.times.push_back(t_next);
        out.numeric.push_back(x);
        out.exact.push_back(std::exp(-lambda * w_next));
        w_prev = w_next;
    }
    for (std::size_t k = 0; k < out.times.size(); ++k) {
        const double err = std::abs(out.numeric[k] - out.exact[k]);
        out.max_abs_error = std::max(out.max_abs_error, err);
        out.max_rel_error = std::max(out.max_rel_error, err / std::abs(out.exact[k]));
    }
    return out;
}

void write_path_csv(std::ostream& os, const WienerPath& path) {
    os << "# seed = " << path.seed() << '\n'
       << std::setprecision(17)
       << "# t_min = " << path.t_min() << '\n'
       << "# t_max = " << path.t_max() << '\n'
       << "# dt_grid = " << path.dt_grid() << '\n'
       << "# shift_offset = " << path.shift_offset() << '\n'
       << "t,W\n";
    for (std::size_t k = 0; k < path.node_count(); ++k) {
        os << path.node_time(k) << ',' << path.node_value(k) << '\n';
    }
}

} // namespace hrsim
