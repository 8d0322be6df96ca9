#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "paraxia/analytics.hpp"
#include "paraxia/medium.hpp"

namespace paraxia {

// ---------------------------------------------------------------------------
// Reduced reflection Wigner function V_r^R (the r-indexed family):
//   dV/dzeta = (2 beta / 2pi) int C0hat(u) [V(q - u/2) cos(r u zeta) - V(q)] du
// from delta(q), discretized as 1/dq at q = 0. All quantities dimensionless.
// ---------------------------------------------------------------------------

struct VRReduced {
    double r = 0.0, beta = 0.0, zeta = 1.0;
    double dq = 0.0;
    std::vector<double> q;       // symmetric lattice
    std::vector<double> values;  // real by construction
    double mass() const;         // sum values * dq
};

VRReduced vr_reduced_integrate(double r, double beta, const MediumSpec& medium, double dq = 0.2,
                               double q_max = 0.0, std::size_t zeta_steps = 400,
                               double zeta = 1.0);

// Closed-form route (u-quadrature of the explicit solution): the profile is
// split into a delta(q) coefficient and a smooth remainder.
struct VRProfile {
    double delta_coeff = 0.0;
    std::vector<double> q;
    std::vector<double> smooth;

    // lattice representation with the delta as 1/dq at q = 0
    std::vector<double> lattice(double dq) const;
};

// w-space transform of the closed form: exp(beta int_0^zeta
// [c0(w/2 + r t) + c0(w/2 - r t) - 2 c0(0)] dt), exact via erf.
double vr_reduced_wspace(double w, double r, double beta, const MediumSpec& medium,
                         double zeta = 1.0);

VRProfile vr_closed_form(double r, double beta, const MediumSpec& medium,
                         const std::vector<double>& q_nodes, double zeta = 1.0);

// exponential mass law exp(2 beta int_0^zeta [c0(r t) - c0(0)] dt)
double vr_mass_law(double r, double beta, const MediumSpec& medium, double zeta = 1.0);

enum class VRKind { decay, reduced, combo };

// Lemma 4.1 asymptotic profiles on the given q nodes.
VRProfile vr_asymptotics(VRKind kind, double r, double s, double beta, const MediumSpec& medium,
                         const std::vector<double>& q_nodes, double zeta = 1.0);

// ---------------------------------------------------------------------------
// Full reflection Wigner system (eight-term collision integral with the
// alpha-oscillatory phases). Solved in the Fourier dual w of q, where the
// q - u/2 shifts become diagonal phases and each w evolves independently.
// The zeta integration is a phase-exact (Filon) predictor-corrector; the
// u-quadrature uses per-cell Filon weights, with gathers interpolated on the
// coarse (background) nodes so that O(1/alpha)-wide layers are not
// over-weighted.
// ---------------------------------------------------------------------------

struct VRAxis {
    std::vector<double> nodes;
    std::vector<std::uint8_t> coarse;  // background nodes used by gathers
};

// uniform axis on [-span, span]; nodes within layer_guard of 0 are excluded
// from the background set
VRAxis vr_axis_uniform(double span, double step, double layer_guard = 1e-9);
// uniform coarse axis plus a fine patch of half-width fine_half around 0
VRAxis vr_axis_patched(double span, double step, double fine_half, double fine_step);

struct VRFullOptions {
    double du = 0.1;
    double u_max = 7.5;
    std::size_t zeta_steps = 200;
    double w_max = 12.0;
    double dw = 0.25;
    unsigned threads = 0;  // 0 = hardware_concurrency
};

struct VRFullSolution {
    VRAxis r_axis, s_axis;
    std::vector<double> w;       // w >= 0 lattice (negative w by conjugation)
    std::vector<cdouble> vhat;   // [iw][ir][is]
    double alpha = 0.0, beta = 0.0, zeta = 1.0;
    MediumSpec medium;

    std::size_t n_r() const { return r_axis.nodes.size(); }
    std::size_t n_s() const { return s_axis.nodes.size(); }
    const cdouble& at(std::size_t iw, std::size_t ir, std::size_t is) const {
        return vhat[(iw * n_r() + ir) * n_s() + is];
    }

    cdouble vhat_interp(double w_val, double r, double s) const;
    // delta(q) coefficient: the large-w plateau of vhat
    cdouble delta_coeff(double r, double s) const;
    // smooth q-space profile (plateau subtracted), inverse transform over w
    cdouble smooth_q(double q, double r, double s) const;
    // total mass int V dq = vhat(w = 0)
    cdouble mass(double r, double s) const;
    // full lattice value with the delta represented as 1/dq at q = 0
    cdouble q_lattice_value(double q, double dq, double r, double s) const;

    VRSampler sampler() const;
};

VRFullSolution vr_integrate_full(const VRAxis& r_axis, const VRAxis& s_axis, double alpha,
                                 double beta, const MediumSpec& medium,
                                 const VRFullOptions& opts = {});

// ---------------------------------------------------------------------------
// Transmitted Wigner distribution, Eq. 4.5 integral representation.
// The value splits into a coherent Dirac pair
//   coherent_coeff * delta(q + q') delta(r0 (x'-x)/(alpha l_x) + q zeta)
// and a smooth remainder evaluated by 2D quadrature.
// ---------------------------------------------------------------------------

struct WTValue {
    cdouble smooth{0.0, 0.0};
    double coherent_coeff = 0.0;
    bool converged = true;
};

WTValue wt_eval(double zeta, double x, double x_prime, double q, double q_prime, double alpha,
                double beta, const MediumSpec& medium, double T0, double r0,
                std::size_t nodes = 192);

// Gaussian-probe integral of W^T against separable test functions
//   phi_x(x'-x - cx) phi_q(q - cq) phi_qp(q' - cqp),
// each exp(-v^2/width^2). qp_weight multiplies the integrand by q'
// (transport flux probe); d_dxcenter differentiates in cx.
struct WTProbe {
    double x_width = 1.0, x_center = 0.0;
    double q_width = 1.0, q_center = 0.0;
    double qp_width = 1.0, qp_center = 0.0;
    bool qp_weight = false;
    bool d_dxcenter = false;
};

cdouble wt_gaussian_probe(double zeta, const WTProbe& probe, double alpha, double beta,
                          const MediumSpec& medium, double T0, double r0,
                          std::size_t nodes = 220);

}  // namespace paraxia
