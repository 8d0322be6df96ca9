#pragma once

#include <optional>
#include <string>

namespace paraxia {

// Statistical model of the random slab. The dimensionless correlation
// family C(z,x) factorizes the physical autocorrelation as
//   C(z,x) = sigma^2 * Cfam(z/l_z, x/l_x),
// and the solvers only ever need the longitudinally integrated
//   C0(x)    = sigma^2 l_z * c0(x/l_x),
//   C0hat(u) = sigma^2 l_z l_x^d * c0hat(u l_x).
// Built-in family "gaussian": Cfam(z,x) = exp(-z^2 - |x|^2), giving
// c0(x) = sqrt(pi) exp(-x^2) and, in d=1, c0hat(u) = pi exp(-u^2/4).
struct MediumSpec {
    std::string family = "gaussian";
    double sigma = 0.0;
    double l_z = 1.0;
    double l_x = 1.0;

    // throws std::invalid_argument on bad parameters or unknown family
    void validate() const;

    // dimensionless family functions (d = 1)
    double c0_dimensionless(double x) const;
    double c0hat_dimensionless(double u) const;
    // Dcal = -(1/d) * Laplacian of c0 at 0  (gaussian: 2 sqrt(pi))
    double dcal() const;

    // physical-scale functions
    double c0(double x) const;       // sigma^2 l_z c0(x/l_x)
    double c0hat(double u) const;    // sigma^2 l_z l_x c0hat(u l_x)
    double c0_zero() const { return c0(0.0); }
    double diffusion_coefficient() const;  // D = sigma^2 l_z Dcal / l_x^2
};

struct DimensionlessGroups {
    double alpha = 0.0;    // L / (k0 l_x^2)
    double beta = 0.0;     // sigma^2 k0^2 L l_z / 4
    double alpha0 = 0.0;   // L / (k0 r0^2)
    double a_e = 0.0;      // sqrt(l_x r0)
    double alpha_e = 0.0;  // L / (k0 a_e^2)
    double dcal = 0.0;
    double diffusion = 0.0;  // D
    bool narrowband = true;  // only meaningful when a bandwidth was given
    double critical_bandwidth = 0.0;  // k0 * min(1, 1/alpha, 1/alpha0, 1/beta)
};

// Narrowband margin: "bandwidth << B_c" is read as bandwidth < 0.1 * B_c.
inline constexpr double kNarrowbandMargin = 0.1;

DimensionlessGroups dimensionless_groups(const MediumSpec& spec, double k0, double L,
                                         double r0,
                                         std::optional<double> bandwidth = std::nullopt);

}  // namespace paraxia
