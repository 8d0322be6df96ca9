#include "paraxia/analytics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "paraxia/quadrature.hpp"

namespace paraxia {

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);

cdouble envelope(const AutocorrParams& p, double s, double t) {
    cdouble f1(1.0, 0.0), f2(1.0, 0.0);
    if (p.f0) {
        f1 = p.f0(s + 0.5 * t);
        f2 = p.f0(s - 0.5 * t);
    }
    return f1 * std::conj(f2) * std::polar(1.0, -p.k0 * t);
}

// int_0^L C0(eta z / k0 + y) dz for the gaussian family, exact via erf
double c0_path_integral(const MediumSpec& med, double eta, double y, double k0, double L) {
    const double a = med.sigma * med.sigma * med.l_z * kSqrtPi;
    if (std::abs(eta) < 1e-14) return a * L * std::exp(-(y / med.l_x) * (y / med.l_x));
    const double scale = k0 * med.l_x / eta;
    const double lo = y / med.l_x;
    const double hi = (eta * L / k0 + y) / med.l_x;
    return a * scale * 0.5 * kSqrtPi * (std::erf(hi) - std::erf(lo));
}

}  // namespace

BeamTheory beam_metrics_theory(double r0, double k0, double L, double D, bool want_chi) {
    if (!(r0 > 0.0 && k0 > 0.0 && L > 0.0))
        throw std::invalid_argument("beam theory: r0, k0, L must be > 0");
    if (D < 0.0) throw std::invalid_argument("beam theory: D must be >= 0");
    BeamTheory b;
    b.r0 = r0;
    b.k0 = k0;
    b.L = L;
    b.D = D;
    const double spread = 1.0 + D * L * L * L / (3.0 * r0 * r0);
    b.r_T = r0 * std::sqrt(spread);
    const double denom =
        1.0 + k0 * k0 * r0 * r0 * D * L / 4.0 + k0 * k0 * D * D * L * L * L * L / 48.0;
    b.rho_T = r0 * std::sqrt(spread) / std::sqrt(denom);
    if (want_chi) {
        if (!(D > 0.0)) throw std::invalid_argument("beam theory: chi_T requires D > 0");
        b.chi_T = b.r_T / std::sqrt(k0 * D * L * L / 2.0);
    }
    return b;
}

double EBCTheory::profile(double kappa0) const {
    const double broad = std::exp(-std::pow((kappa0 - kappa_inc) / dk_spec, 2));
    const double retro_base = std::exp(-std::pow(2.0 * kappa_inc / dk_spec, 2));
    const double excess = std::exp(-std::pow((kappa0 + kappa_inc) / dk_ebc, 2));
    return broad + retro_base * excess;
}

EBCTheory ebc_theory(double D, double L, double k0, double kappa_inc) {
    if (!(D > 0.0 && L > 0.0 && k0 > 0.0))
        throw std::invalid_argument("ebc theory: D, L, k0 must be > 0");
    EBCTheory t;
    t.dk_spec = std::sqrt(D * L) * k0;
    t.dk_ebc = 2.0 * std::sqrt(3.0) / std::sqrt(D * L * L * L);
    t.kappa_inc = kappa_inc;
    return t;
}

namespace {

// the common eta-quadrature of Eqs. 5.2 / 5.3 (prefactor included; d = 1)
cdouble autocorr_eta_quadrature(bool full, double x, double y, double r0, double k0, double L,
                                const MediumSpec& med) {
    const double c00 = med.c0_zero();
    const double eta_max = std::sqrt(8.0 * 38.0) / r0;  // e^{-r0^2 eta^2/8} floor ~1e-16
    // resolve both the e^{-i eta x} oscillation and the medium-induced
    // structure on scale k0 l_x / L
    const double scale_med = k0 * med.l_x / L;
    std::size_t panels = 48;
    panels = std::max(panels, static_cast<std::size_t>(eta_max * std::abs(x) / 3.0));
    panels = std::max(panels, static_cast<std::size_t>(2.0 * eta_max / scale_med));
    if (panels > 4000) panels = 4000;
    const GaussRule& rule = gauss_legendre(8);

    const double h = 2.0 * eta_max / static_cast<double>(panels);
    cdouble total(0.0, 0.0);
    for (std::size_t pnl = 0; pnl < panels; ++pnl) {
        const double lo = -eta_max + h * static_cast<double>(pnl);
        const double mid = lo + 0.5 * h;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double eta = mid + 0.5 * h * rule.nodes[i];
            const double beam = full ? std::pow(eta * L / k0 + y, 2) / (2.0 * r0 * r0)
                                     : y * y / (2.0 * r0 * r0);
            const double damp = 0.25 * k0 * k0 * (c0_path_integral(med, eta, y, k0, L) - c00 * L);
            const double mag = std::exp(-beam - r0 * r0 * eta * eta / 8.0 + damp);
            total += rule.weights[i] * mag * std::polar(1.0, -eta * x);
        }
    }
    total *= 0.5 * h;
    return total * std::sqrt(r0 * r0 / (8.0 * std::numbers::pi));
}

}  // namespace

cdouble transmitted_autocorrelation(AutocorrMode mode, double s, double t, double x, double y,
                                    const AutocorrParams& p) {
    p.medium.validate();
    const cdouble env = envelope(p, s, t);
    if (mode == AutocorrMode::gaussian) {
        const double D = p.medium.diffusion_coefficient();
        BeamTheory b = beam_metrics_theory(p.r0, p.k0, p.L, D, D > 0.0);
        const double ratio = p.r0 / b.r_T;
        double phase = 0.0;
        if (D > 0.0) phase = x * y / (b.chi_T * b.chi_T);
        const double mag = std::exp(-2.0 * x * x / (b.r_T * b.r_T) -
                                    y * y / (2.0 * b.rho_T * b.rho_T));
        return p.T0 * p.T0 * env * ratio * mag * std::polar(1.0, phase);
    }
    const bool full = (mode == AutocorrMode::full);
    return p.T0 * p.T0 * env * autocorr_eta_quadrature(full, x, y, p.r0, p.k0, p.L, p.medium);
}

cdouble reflected_autocorrelation(AutocorrMode mode, double s, double t, double x, double y,
                                  const AutocorrParams& p, const VRSampler* vr) {
    p.medium.validate();
    const cdouble env = envelope(p, s, t);
    if (mode == AutocorrMode::narrow) {
        // the transmitted narrow form with 2L substituted for L
        return p.R0 * p.R0 * env *
               autocorr_eta_quadrature(false, x, y, p.r0, p.k0, 2.0 * p.L, p.medium);
    }
    if (mode != AutocorrMode::full)
        throw std::invalid_argument("reflected autocorrelation: mode must be full or narrow");
    if (!vr) throw std::invalid_argument("reflected autocorrelation: full mode needs a VR table");

    // triple quadrature against V^R(1, eta1 l_x, eta2 l_x, eta3 l_x) with
    // prefactor R0^2 (r0^2 l_x / (8 pi))^d; the delta(q) component of V^R
    // collapses the eta1 integral analytically.
    const double lx = p.medium.l_x;
    const double r0 = p.r0;
    const double k0 = p.k0;
    const double L = p.L;

    // eta3: beam factor e^{-r0^2 eta3^2/8} and the s-layer structure
    const double e3max = std::sqrt(8.0 * 36.0) / r0;
    // eta1: spread of V^R in q/l_x; estimate from diffusion scale
    const double dgroups_beta =
        p.medium.sigma * p.medium.sigma * k0 * k0 * L * p.medium.l_z / 4.0;
    const double qspread = std::sqrt(std::max(p.medium.dcal() * 2.0 * dgroups_beta, 4.0));
    const double e1max = (qspread + 2.0) / lx;
    // eta2: gaussian of width 2/r0 centred at 2*eta1, plus the r-layer
    const double e2pad = std::sqrt(8.0 * 36.0) / r0;

    const std::size_t n1 = 96, n2 = 128, n3 = 96;
    const double h1 = 2.0 * e1max / n1;
    cdouble total(0.0, 0.0);
    for (std::size_t i1 = 0; i1 <= n1; ++i1) {
        const double e1 = -e1max + h1 * static_cast<double>(i1);
        const double w1 = (i1 == 0 || i1 == n1) ? 0.5 : 1.0;
        const double e2lo = 2.0 * e1 - e2pad, e2hi = 2.0 * e1 + e2pad;
        const double h2 = (e2hi - e2lo) / n2;
        for (std::size_t i2 = 0; i2 <= n2; ++i2) {
            const double e2 = e2lo + h2 * static_cast<double>(i2);
            const double w2 = (i2 == 0 || i2 == n2) ? 0.5 : 1.0;
            const double beam2 = std::exp(-r0 * r0 * std::pow(e1 - 0.5 * e2, 2) / 2.0);
            if (beam2 < 1e-14) continue;
            const double h3 = 2.0 * e3max / n3;
            for (std::size_t i3 = 0; i3 <= n3; ++i3) {
                const double e3 = -e3max + h3 * static_cast<double>(i3);
                const double w3 = (i3 == 0 || i3 == n3) ? 0.5 : 1.0;
                const double beam3 = std::exp(-r0 * r0 * e3 * e3 / 8.0);
                const cdouble vr_s = vr->smooth(e1 * lx, e2 * lx, e3 * lx);
                const cdouble phase = std::polar(1.0, L * e2 * e3 / k0 - e3 * x +
                                                          y * (e1 + 0.5 * e2));
                total += w1 * w2 * w3 * h1 * h2 * h3 * beam2 * beam3 * vr_s * phase;
            }
        }
    }
    // delta(q) part: eta1 = 0 exactly, coefficient delta_coeff(r, s)/l_x
    const double h3 = 2.0 * e3max / n3;
    const double e2pad0 = e2pad;
    const double h2 = 2.0 * e2pad0 / n2;
    for (std::size_t i2 = 0; i2 <= n2; ++i2) {
        const double e2 = -e2pad0 + h2 * static_cast<double>(i2);
        const double w2 = (i2 == 0 || i2 == n2) ? 0.5 : 1.0;
        const double beam2 = std::exp(-r0 * r0 * e2 * e2 / 8.0);
        for (std::size_t i3 = 0; i3 <= n3; ++i3) {
            const double e3 = -e3max + h3 * static_cast<double>(i3);
            const double w3 = (i3 == 0 || i3 == n3) ? 0.5 : 1.0;
            const double beam3 = std::exp(-r0 * r0 * e3 * e3 / 8.0);
            const cdouble coeff = vr->delta_coeff(e2 * lx, e3 * lx) / lx;
            const cdouble phase =
                std::polar(1.0, L * e2 * e3 / k0 - e3 * x + y * 0.5 * e2);
            total += w2 * w3 * h2 * h3 * beam2 * beam3 * coeff * phase;
        }
    }
    const double pref = r0 * r0 * lx / (8.0 * std::numbers::pi);
    return p.R0 * p.R0 * env * pref * total;
}

EBCPoint ebc_profile(double kappa0, double kappa_inc, double alpha, double beta,
                     const MediumSpec& medium, double L, double k0, EBCMode mode,
                     const VRSampler* vr) {
    medium.validate();
    const double D = medium.diffusion_coefficient();
    EBCPoint out;
    out.theory = ebc_theory(D, L, k0, kappa_inc);
    if (mode == EBCMode::asymptotic) {
        out.intensity = out.theory.profile(kappa0);
        return out;
    }
    if (!vr) throw std::invalid_argument("ebc_profile: exact mode needs a VR table");
    const double lx = medium.l_x;
    // Eq. 5.11 arguments: q = (kappa0 - kappa_inc) l_x / 2, r = (kappa0 + kappa_inc) l_x, s = 0
    const double q = 0.5 * (kappa0 - kappa_inc) * lx;
    const double r = (kappa0 + kappa_inc) * lx;
    const cdouble v = vr->smooth(q, r, 0.0);
    out.intensity = v.real();
    (void)alpha;
    (void)beta;
    return out;
}

MomentField mean_kernel_moments(int order_n, int order_m, double k, double L, const Grid& grid,
                                const MediumSpec& medium, double T0, double R0,
                                std::size_t z_steps) {
    medium.validate();
    if (!(k > 0.0 && L > 0.0)) throw std::invalid_argument("moments: k, L must be > 0");
    const std::size_t n = grid.n;
    const double dkappa = 2.0 * std::numbers::pi / grid.width();

    MomentField field;
    field.grid = grid;
    field.k = k;
    field.z = L;
    field.order_n = order_n;
    field.order_m = order_m;

    if (order_n == 1 && order_m == 0) {
        // diagonal closed form: only the phase and damping terms survive
        field.values.assign(n * n, cdouble(0.0, 0.0));
        const double damp = std::exp(-k * k * medium.c0_zero() * L / 8.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double kap = grid.kappa(i);
            field.values[i * n + i] =
                T0 / dkappa * damp * std::polar(1.0, -kap * kap * L / (2.0 * k));
        }
        return field;
    }
    if (!(order_n == 0 && order_m == 1))
        throw std::invalid_argument("moments: only orders (1,0) and (0,1) are in scope");

    // mean reflection kernel: RK4 on the (kappa, kappa') lattice with the
    // periodic spectral convolution sum_m C0hat(kappa_m)/width * I(k - m, k' - m)
    std::vector<double> conv(n);
    for (std::size_t m = 0; m < n; ++m) conv[m] = medium.c0hat(grid.kappa(m)) / grid.width();

    std::vector<cdouble> state(n * n, cdouble(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) state[i * n + i] = R0 / dkappa;

    // phase rate needs resolving: max |kappa^2 + kappa'^2|/(2k) * h <= 0.2
    if (z_steps == 0) {
        const double kmax = std::numbers::pi / grid.dx;
        const double rate = kmax * kmax / k + k * k * medium.c0_zero();
        z_steps = static_cast<std::size_t>(std::max(200.0, L * rate / 0.2));
    }
    const double h = L / static_cast<double>(z_steps);
    const double damp0 = k * k * medium.c0_zero() / 4.0;

    std::vector<cdouble> k1(n * n), k2(n * n), k3(n * n), k4(n * n), tmp(n * n);
    auto rhs = [&](const std::vector<cdouble>& in, std::vector<cdouble>& out) {
        for (std::size_t i = 0; i < n; ++i) {
            const double ki = grid.kappa(i);
            for (std::size_t j = 0; j < n; ++j) {
                const double kj = grid.kappa(j);
                cdouble acc = cdouble(0.0, -(ki * ki + kj * kj) / (2.0 * k)) * in[i * n + j] -
                              damp0 * in[i * n + j];
                cdouble conv_acc(0.0, 0.0);
                for (std::size_t m = 0; m < n; ++m) {
                    const std::size_t im = (i + n - m) % n;
                    const std::size_t jm = (j + n - m) % n;
                    conv_acc += conv[m] * in[im * n + jm];
                }
                acc -= (k * k / 4.0) * conv_acc;
                out[i * n + j] = acc;
            }
        }
    };

    for (std::size_t step = 0; step < z_steps; ++step) {
        rhs(state, k1);
        for (std::size_t idx = 0; idx < n * n; ++idx) tmp[idx] = state[idx] + 0.5 * h * k1[idx];
        rhs(tmp, k2);
        for (std::size_t idx = 0; idx < n * n; ++idx) tmp[idx] = state[idx] + 0.5 * h * k2[idx];
        rhs(tmp, k3);
        for (std::size_t idx = 0; idx < n * n; ++idx) tmp[idx] = state[idx] + h * k3[idx];
        rhs(tmp, k4);
        for (std::size_t idx = 0; idx < n * n; ++idx)
            state[idx] += (h / 6.0) * (k1[idx] + 2.0 * k2[idx] + 2.0 * k3[idx] + k4[idx]);
    }
    field.values = std::move(state);
    return field;
}

}  // namespace paraxia
