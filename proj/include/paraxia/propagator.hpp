#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "paraxia/fft.hpp"
#include "paraxia/screens.hpp"

namespace paraxia {

// Interface impedance algebra (section-2 boundary at z = 0):
// R0 = (Z0-1)/(Z0+1), T0 = 2 sqrt(Z0)/(1+Z0); R0^2 + T0^2 == 1.
struct BoundaryCoefficients {
    double Z0 = 1.0;
    double R0 = 0.0;
    double T0 = 1.0;
};

BoundaryCoefficients reflection_coefficients(double Z0);

// Complex transverse field at fixed wavenumber k and depth z.
struct FieldSlice {
    Grid grid;
    double k = 0.0;
    double z = 0.0;
    std::vector<cdouble> values;

    double energy() const;  // sum |v|^2 dx
    bool finite() const;
};

// Two-point reflection kernel R(x, x') on grid x grid, row-major:
// values[i*n + j] = R(x_i, x_j).
struct KernelSlice {
    Grid grid;
    double k = 0.0;
    double z = 0.0;
    std::vector<cdouble> values;

    // max_ij |K(i,j) - K(j,i)| / max |K|
    double symmetry_defect() const;
};

struct GaussianBeam {
    double r0 = 1.0;
    double amplitude = 1.0;
    double kappa_inc = 0.0;  // must sit on the grid's frequency lattice
};

struct SourceBeam {
    std::vector<cdouble> profile;  // f_check(k, x) on the grid
    double z0 = 0.0;               // source offset, z0 >= L
    double L = 0.0;
};

FieldSlice make_gaussian_beam(const GaussianBeam& beam, const Grid& grid, double k);
// Fresnel-propagated source profile: -(1/2) * IDFT[ DFT(f) * e^{i kappa^2 (L - z0)/(2k)} ]
FieldSlice make_source_beam(const SourceBeam& beam, const Grid& grid, double k);

enum class PassOrder { forward, reverse };

struct PassOptions {
    PassOrder order = PassOrder::forward;
    bool conjugate = false;  // conjugated multipliers (inverse steps), test aid
    const std::vector<double>* mask = nullptr;
};

// super-Gaussian absorbing profile exp(-(|x|/(0.45 width))^16)
std::vector<double> absorbing_mask(const Grid& grid);

// Strang split-step over all screens: half free step
// exp(-i kappa^2 dz/(4k)), screen phase exp(i (k/2) screen_j(x)), half free
// step; steps in ascending j (forward) or descending j (reverse).
FieldSlice split_step_pass(const FieldSlice& field, const ScreenStack& screens,
                           const PassOptions& opts = {});

// T0 x forward pass: the transmitted field at z = 0.
FieldSlice transmit(const FieldSlice& b_inc, const ScreenStack& screens,
                    const BoundaryCoefficients& coeffs,
                    const std::vector<double>* mask = nullptr);

// R0 x forward(reverse(b_inc)) through the same frozen screens: down the
// slab, reflect at z = 0, back up.
FieldSlice reflect_double_pass(const FieldSlice& b_inc, const ScreenStack& screens,
                               const BoundaryCoefficients& coeffs,
                               const std::vector<double>* mask = nullptr);

// Evolve the discretized kernel R0 delta/dx by the two-axis split step;
// consistent with reflect_double_pass by the tensor factorization of the
// reflection generator.
KernelSlice reflect_kernel(const ScreenStack& screens, double k,
                           const BoundaryCoefficients& coeffs);

// (K phi)(x_i) = sum_j K(i,j) phi(x_j) dx
FieldSlice apply_kernel(const KernelSlice& kernel, const FieldSlice& field);

// Trapezoidal synthesis of the time-domain field from per-wavenumber
// slices: p(s,x) = (1/2pi) sum_j weight_j field_j(x) e^{-i k_j s} dk.
// A single slice is treated as monochromatic (no dk/2pi factor).
std::vector<std::vector<cdouble>> synthesize_time_trace(
    const std::vector<FieldSlice>& fields_by_k, const std::vector<cdouble>& weights,
    const std::vector<double>& s_grid);

}  // namespace paraxia
