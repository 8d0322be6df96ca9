#include "paraxia/medium.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace paraxia {

namespace {
const double kSqrtPi = std::sqrt(std::numbers::pi);
}

void MediumSpec::validate() const {
    if (family != "gaussian")
        throw std::invalid_argument("medium: unknown correlation family '" + family + "'");
    if (!(sigma >= 0.0)) throw std::invalid_argument("medium: sigma must be >= 0");
    if (!(l_z > 0.0)) throw std::invalid_argument("medium: l_z must be > 0");
    if (!(l_x > 0.0)) throw std::invalid_argument("medium: l_x must be > 0");
}

double MediumSpec::c0_dimensionless(double x) const {
    validate();
    return kSqrtPi * std::exp(-x * x);
}

double MediumSpec::c0hat_dimensionless(double u) const {
    validate();
    return std::numbers::pi * std::exp(-u * u / 4.0);
}

double MediumSpec::dcal() const {
    validate();
    return 2.0 * kSqrtPi;
}

double MediumSpec::c0(double x) const {
    return sigma * sigma * l_z * c0_dimensionless(x / l_x);
}

double MediumSpec::c0hat(double u) const {
    return sigma * sigma * l_z * l_x * c0hat_dimensionless(u * l_x);
}

double MediumSpec::diffusion_coefficient() const {
    return sigma * sigma * l_z * dcal() / (l_x * l_x);
}

DimensionlessGroups dimensionless_groups(const MediumSpec& spec, double k0, double L, double r0,
                                         std::optional<double> bandwidth) {
    spec.validate();
    if (!(k0 > 0.0)) throw std::invalid_argument("dimensionless_groups: k0 must be > 0");
    if (!(L > 0.0)) throw std::invalid_argument("dimensionless_groups: L must be > 0");
    if (!(r0 > 0.0)) throw std::invalid_argument("dimensionless_groups: r0 must be > 0");

    DimensionlessGroups g;
    g.alpha = L / (k0 * spec.l_x * spec.l_x);
    g.beta = spec.sigma * spec.sigma * k0 * k0 * L * spec.l_z / 4.0;
    g.alpha0 = L / (k0 * r0 * r0);
    g.a_e = std::sqrt(spec.l_x * r0);
    g.alpha_e = L / (k0 * g.a_e * g.a_e);
    g.dcal = spec.dcal();
    g.diffusion = spec.diffusion_coefficient();

    double m = 1.0;
    for (double v : {g.alpha, g.alpha0, g.beta})
        if (v > 0.0) m = std::min(m, 1.0 / v);
    g.critical_bandwidth = k0 * m;
    g.narrowband = !bandwidth || *bandwidth < kNarrowbandMargin * g.critical_bandwidth;
    return g;
}

}  // namespace paraxia
