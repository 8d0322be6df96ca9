#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "paraxia/medium.hpp"
#include "paraxia/screens.hpp"

namespace paraxia {

using cdouble = std::complex<double>;

// Gaussian-regime beam statistics of the transmitted field.
struct BeamTheory {
    double r_T = 0.0;    // beam radius, r0 sqrt(1 + D L^3 / (3 r0^2))
    double rho_T = 0.0;  // correlation radius
    double chi_T = 0.0;  // phase parameter (0 when D == 0 and not requested)
    double r0 = 0.0, k0 = 0.0, L = 0.0, D = 0.0;
};

// valid in the regime k0 r0^2 >> L; chi_T requires D > 0
BeamTheory beam_metrics_theory(double r0, double k0, double L, double D,
                               bool want_chi = true);

// Enhanced-backscattering cone geometry.
struct EBCTheory {
    double dk_spec = 0.0;  // broad diffusion-cone width sqrt(D L) k0
    double dk_ebc = 0.0;   // narrow cone width 2 sqrt(3) / sqrt(D L^3)
    double enhancement = 2.0;
    double kappa_inc = 0.0;
    // relative intensity: broad Gaussian + narrow retro peak, normalized
    // to 1 at the specular direction
    double profile(double kappa0) const;
};

EBCTheory ebc_theory(double D, double L, double k0, double kappa_inc);

struct AutocorrParams {
    double T0 = 1.0;
    double R0 = 0.0;
    double r0 = 1.0;
    double k0 = 1.0;
    double L = 1.0;
    MediumSpec medium;
    // narrowband pulse envelope f0; defaults to 1 (monochromatic)
    std::function<cdouble(double)> f0;
};

enum class AutocorrMode { full, narrow, gaussian };

// Transmitted-field autocorrelation E[p(s+t/2, x+y/2) conj(p(s-t/2, x-y/2))].
// full/narrow are eta-quadratures; gaussian is the closed Gaussian shape.
cdouble transmitted_autocorrelation(AutocorrMode mode, double s, double t, double x, double y,
                                    const AutocorrParams& p);

// Sampler for the dimensionless reflection Wigner function V^R(1, q, r, s),
// split into a delta(q) coefficient and a smooth remainder.
struct VRSampler {
    std::function<cdouble(double q, double r, double s)> smooth;
    std::function<cdouble(double r, double s)> delta_coeff;
};

// Reflected-field autocorrelation. narrow mode: R0^2/T0^2 times the
// transmitted narrow form at slab depth 2L. full mode: triple quadrature
// over (eta1, eta2, eta3) against V^R.
cdouble reflected_autocorrelation(AutocorrMode mode, double s, double t, double x, double y,
                                  const AutocorrParams& p,
                                  const VRSampler* vr = nullptr);

struct EBCPoint {
    double intensity = 0.0;  // relative (asymptotic) or up-to-scale (exact)
    EBCTheory theory;
};

enum class EBCMode { exact, asymptotic };

// Mean reflected intensity in direction kappa0 for a tilted plane wave.
EBCPoint ebc_profile(double kappa0, double kappa_inc, double alpha, double beta,
                     const MediumSpec& medium, double L, double k0, EBCMode mode,
                     const VRSampler* vr = nullptr);

// First-moment fields of the transmission/reflection operators on the
// grid's frequency lattice (order (1,0): mean T-hat; order (0,1): mean
// R-hat). values are row-major over (kappa, kappa') for order (0,1).
struct MomentField {
    Grid grid;
    double k = 0.0;
    double z = 0.0;
    int order_n = 0, order_m = 0;
    std::vector<cdouble> values;
};

// order (1,0): closed form T0 delta(kappa-kappa') e^{-i kappa'^2 z/(2k)}
//              e^{-k^2 C0(0) z / 8); delta discretized as 1/dkappa.
// order (0,1): RK4 solve of the mean-reflection integro-PDE with periodic
//              spectral convolution, from R0 delta(kappa-kappa').
MomentField mean_kernel_moments(int order_n, int order_m, double k, double L, const Grid& grid,
                                const MediumSpec& medium, double T0, double R0,
                                std::size_t z_steps = 0);

}  // namespace paraxia
