#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace hrsim {

/// Hindmarsh-Rose parameters of the diffusive system with multiplicative noise.
///
/// phi(u) = a u^2 - b u^3, psi(u) = alpha - beta u^2, slow channel q (u - c) - r z.
/// For the classical set q = r S with S = 4, i.e. q = 0.0084 at r = 0.0021.
struct HRParameters {
    double d1 = 1.0;
    double d2 = 1.0;
    double d3 = 1.0;
    double a = 3.0;
    double b = 1.0;
    double alpha = 1.0;
    double beta = 5.0;
    double q = 0.0084;
    double r = 0.0021;
    double J = 3.281;
    double c = -1.6;
    double eps = 1e-3;

    /// Throws DomainError unless d_i, a, b, alpha, beta, r > 0 and J, q, eps >= 0.
    /// J = q = alpha = 0 is admitted for the resting and dissipative reductions.
    void validate() const;

    bool operator==(const HRParameters&) const = default;
};

/// Constants entering the energy and absorbing-radius estimates.
struct DerivedConstants {
    double c1 = 0.0;    ///< weight of |U|^2 in the energy, (beta^2 + 3) / b
    double c2 = 0.0;    ///< constant term of the energy inequality
    double sigma = 0.0; ///< decay rate, min(1, r) / 2
    double d = 0.0;     ///< min(d1, d2, d3)
    double eta = 1.0;   ///< Sobolev embedding constant for |U|_{L4}^4 (configured)

    /// 2 c2 + c1^2 / 32, the Q^2 coefficient of the reduced inequality.
    double q2_coeff() const noexcept { return 2.0 * c2 + c1 * c1 / 32.0; }
};

using Triple = std::array<double, 3>;

double phi(double u, const HRParameters& p) noexcept;
double psi(double u, const HRParameters& p) noexcept;

/// f(u, v, z) = (phi(u) + v - z + J, psi(u) - v, q (u - c) - r z).
Triple reaction(const Triple& g, const HRParameters& p) noexcept;

/// Reaction of the pathwise random system obtained with weight Q > 0.
/// Satisfies random_reaction(Q g, Q) = Q reaction(g).
Triple random_reaction(const Triple& G, double Q, const HRParameters& p);

DerivedConstants derived_constants(const HRParameters& p, double eta = 1.0);

/// Named parameter sets: "paper-typical" and "dissipative" (the same set with
/// J = alpha = q = 0 and no noise).
HRParameters preset(std::string_view name);
std::vector<std::string> preset_names();

} // namespace hrsim
