#include "hrsim/errors.hpp"
#include "hrsim/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hrsim {

namespace {

// Trapezoid rule on [lo, hi] with nodes lo + k h; the last panel is shortened.
template <typename F>
double trapezoid(F&& f, double lo, double hi, double h) {
    if (hi <= lo) {
        return 0.0;
    }
    const std::size_t n = step_count(lo, hi, h);
    double sum = 0.0;
    double prev_t = lo;
    double prev_f = f(lo);
    for (std::size_t k = 1; k <= n; ++k) {
        const double t = k == n ? hi : lo + static_cast<double>(k) * h;
        const double ft = f(t);
        sum += 0.5 * (t - prev_t) * (prev_f + ft);
        prev_t = t;
        prev_f = ft;
    }
    return sum;
}

double log_add(double la, double lb) {
    const double hi = std::max(la, lb);
    const double lo = std::min(la, lb);
    if (lo == -std::numeric_limits<double>::infinity()) {
        return hi;
    }
    return hi + std::log1p(std::exp(lo - hi));
}

double safe_log(double x) {
    return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

} // namespace

double r0_closed_form(const HRParameters& p, const SpatialGrid& grid, double truncation_T,
                      double eta) {
    const DerivedConstants k = derived_constants(p, eta);
    const double c1a = k.c1 * p.a;
    const double bracket = k.q2_coeff() + 2.0 * c1a * c1a * c1a * c1a;
    const double mn = std::min(k.c1, 1.0);
    const double integral = bracket * -std::expm1(-k.sigma * (truncation_T - 1.0)) / k.sigma;
    return std::sqrt(1.0 + grid.measure() / mn * integral);
}

TheoreticalBounds absorbing_bounds(const WienerPath& path, const HRParameters& p,
                                   const SpatialGrid& grid, const BoundsOptions& opts) {
    p.validate();
    const double T = opts.truncation_T;
    if (!(T > 2.0)) {
        throw DomainError("absorbing_bounds: truncation_T must exceed 2");
    }
    if (!(opts.quad_dt > 0.0)) {
        throw DomainError("absorbing_bounds: quad_dt must be positive");
    }
    if (!path.covers(-T) || !path.covers(0.0)) {
        throw RangeError("absorbing_bounds: noise path does not cover [-" + std::to_string(T) +
                         ", 0]; resample with a wider horizon");
    }

    const DerivedConstants k = derived_constants(p, opts.eta);
    const double area = grid.measure();
    const double mn = std::min(k.c1, 1.0);
    const double mx = std::max(k.c1, 1.0);
    const double A = k.q2_coeff();
    const double c1a = k.c1 * p.a;
    const double c1a4 = c1a * c1a * c1a * c1a;
    const double B = 2.0 * c1a4;
    const double sigma = k.sigma;
    const double e = p.eps;
    const double h = opts.quad_dt;

    auto Q = [&](double s) { return q_weight(path, e, s); };
    auto X = [&](double s) {
        const double q2 = Q(s) * Q(s);
        return A * q2 + B * q2 * q2;
    };

    TheoreticalBounds b;
    b.truncation_T = T;
    b.quad_dt = h;

    // r0 on the truncated range, plus the tail beyond -T from |w(s)| <= kappa |s|.
    const double I_r0 = trapezoid([&](double s) { return std::exp(sigma * (1.0 + s)) * X(s); },
                                  -T, -1.0, h);
    const double kappa = e == 0.0 ? 0.0 : growth_rate_on(path, -T, -0.5 * T);
    b.tail_growth_rate = kappa;
    const double rate2 = sigma - 2.0 * e * kappa;
    const double rate4 = sigma - 4.0 * e * kappa;
    if (!(rate4 > 0.0)) {
        throw DomainError("absorbing_bounds: non-convergent tail (4 eps kappa >= sigma); "
                          "increase truncation_T");
    }
    const double tail = std::exp(sigma) * (A * std::exp(-rate2 * T) / rate2 +
                                           B * std::exp(-rate4 * T) / rate4);
    const double r0_sq = 1.0 + area / mn * I_r0;
    b.r0 = std::sqrt(r0_sq);
    b.tail_bound = std::sqrt(r0_sq + area / mn * tail) - b.r0;
    b.tail_tolerance = opts.tail_rel_tolerance * b.r0;
    if (b.tail_bound > b.tail_tolerance) {
        throw DomainError("absorbing_bounds: truncated tail " + std::to_string(b.tail_bound) +
                          " exceeds tolerance " + std::to_string(b.tail_tolerance) +
                          "; increase truncation_T");
    }

    const double I_10 = trapezoid(X, -1.0, 0.0, h);
    const double R0_sq = (mx * r0_sq + area * I_10) / (std::min(1.0, 2.0 * k.d) * mn);
    b.R0 = std::sqrt(R0_sq);

    double sup_w = std::abs(path.evaluate(-2.0));
    for (std::size_t n = 0; n < path.node_count(); ++n) {
        const double t = path.node_time(n);
        if (t >= -2.0 && t <= 0.0) {
            sup_w = std::max(sup_w, std::abs(path.node_value(n)));
        }
    }
    b.C_omega = std::exp(e * sup_w);
    const double C2 = b.C_omega * b.C_omega;

    const double I_20 = trapezoid(X, -2.0, 0.0, h);
    const double I_q = trapezoid(
        [&](double s) {
            const double q2 = Q(s) * Q(s);
            return q2 + 2.0 * q2 * q2;
        },
        -2.0, 0.0, h);
    b.R1 = mx / mn * r0_sq + area / mn * I_20;
    const double k_max = std::max({k.c1, 1.0, (2.0 * k.c2 + k.c1 * k.c1) * area, B * area});
    b.K = k_max / (2.0 * k.d * mn) * (b.R1 + I_q);

    // P0 at R^2 = R1 + K; the (-inf, -1] part reuses the r0 integral and its tail.
    const double R_sq = b.R1 + b.K;
    const double I_p = std::exp(-sigma) * (I_r0 + tail) +
                       trapezoid([&](double s) { return std::exp(sigma * s) * X(s); }, -1.0, 0.0, h);
    b.P0 = mx / mn * R_sq + area / mn * I_p;

    b.N1 = (mx * b.P0 + A * C2 * area + c1a4 * C2 * C2 * area) / (2.0 * k.d * mn);
    const double growth = 2.0 * k.eta * C2 * (4.0 * p.a * p.a / p.d1 + 2.0 * p.beta * p.beta / p.d2);
    b.N2 = growth * b.N1;
    b.N3 = std::max(2.0 * p.q * p.q / p.d3, 4.0 / p.d1) * b.P0 + growth * b.P0 * b.P0 +
           C2 * (4.0 * p.J * p.J / p.d1 + 2.0 * p.alpha * p.alpha / p.d2 +
                 2.0 * p.q * p.q * p.c * p.c / p.d3) * area;
    b.ln_gradient_bound = safe_log(b.N1 + b.N3) + b.N2;
    b.ln_M = log_add(safe_log(b.P0), b.ln_gradient_bound);
    b.gradient_bound = std::exp(b.ln_gradient_bound);
    b.M = std::exp(b.ln_M);
    return b;
}

} // namespace hrsim
