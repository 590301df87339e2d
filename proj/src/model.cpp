#include "hrsim/model.hpp"

#include "hrsim/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hrsim {

void HRParameters::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw DomainError(std::string("HRParameters: ") + what);
        }
    };
    for (double v : {d1, d2, d3, a, b, alpha, beta, q, r, J, c, eps}) {
        require(std::isfinite(v), "all parameters must be finite");
    }
    require(d1 > 0.0 && d2 > 0.0 && d3 > 0.0, "diffusion coefficients must be positive");
    require(a > 0.0 && b > 0.0, "a and b must be positive");
    require(beta > 0.0, "beta must be positive");
    require(alpha >= 0.0, "alpha must be nonnegative");
    require(r > 0.0, "r must be positive");
    require(q >= 0.0, "q must be nonnegative");
    require(J >= 0.0, "J must be nonnegative");
    require(eps >= 0.0, "eps must be nonnegative");
}

double phi(double u, const HRParameters& p) noexcept {
    return p.a * u * u - p.b * u * u * u;
}

double psi(double u, const HRParameters& p) noexcept {
    return p.alpha - p.beta * u * u;
}

Triple reaction(const Triple& g, const HRParameters& p) noexcept {
    const auto [u, v, z] = g;
    return {phi(u, p) + v - z + p.J, psi(u, p) - v, p.q * (u - p.c) - p.r * z};
}

Triple random_reaction(const Triple& G, double Q, const HRParameters& p) {
    if (!(Q > 0.0)) {
        throw DomainError("random_reaction: Q must be positive");
    }
    const auto [U, V, Z] = G;
    const double U2 = U * U;
    return {(p.a / Q) * U2 - (p.b / (Q * Q)) * U2 * U + V - Z + p.J * Q,
            p.alpha * Q - (p.beta / Q) * U2 - V,
            p.q * (U - p.c * Q) - p.r * Z};
}

DerivedConstants derived_constants(const HRParameters& p, double eta) {
    DerivedConstants k;
    k.c1 = (p.beta * p.beta + 3.0) / p.b;
    const double bracket = k.c1 * k.c1 * (2.5 + 1.0 / p.r) + p.q * p.q / p.r;
    k.c2 = 0.5 * p.J * p.J + bracket * bracket + 2.0 * p.alpha * p.alpha +
           p.q * p.q * p.c * p.c / p.r;
    k.sigma = 0.5 * std::min(1.0, p.r);
    k.d = std::min({p.d1, p.d2, p.d3});
    k.eta = eta;
    return k;
}

HRParameters preset(std::string_view name) {
    HRParameters p; // defaults are the classical parameter set
    if (name == "paper-typical") {
        return p;
    }
    if (name == "dissipative") {
        p.J = 0.0;
        p.alpha = 0.0;
        p.q = 0.0;
        p.eps = 0.0;
        return p;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
    return {"paper-typical", "dissipative"};
}

} // namespace hrsim
