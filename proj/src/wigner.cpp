#include "paraxia/wigner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "paraxia/quadrature.hpp"

namespace paraxia {

namespace {

const double kSqrtPi = std::sqrt(std::numbers::pi);
const double kTwoPi = 2.0 * std::numbers::pi;

// int_0^zeta c0(w/2 + r t) dt for the dimensionless gaussian family
double c0_line_integral(double w_half, double r, double zeta) {
    if (std::abs(r) < 1e-14) return kSqrtPi * std::exp(-w_half * w_half) * zeta;
    return kSqrtPi * 0.5 * kSqrtPi / r * (std::erf(w_half + r * zeta) - std::erf(w_half));
}

// Filon weights: A = int_0^1 e^{i th t}(1-t) dt, B = int_0^1 e^{i th t} t dt
void filon_ab(double th, cdouble& A, cdouble& B) {
    if (std::abs(th) < 1e-4) {
        A = cdouble(0.5 - th * th / 24.0, th / 6.0 - th * th * th / 120.0);
        B = cdouble(0.5 - th * th / 8.0, th / 3.0 - th * th * th / 30.0);
        return;
    }
    const cdouble eith = std::polar(1.0, th);
    const double inv = 1.0 / (th * th);
    A = (cdouble(1.0, th) - eith) * inv;
    B = (eith * cdouble(1.0, -th) - 1.0) * inv;
}

// dense lookup table for the Filon weights (they oscillate with period 2pi,
// so 1/64 spacing resolves them easily)
class FilonTable {
public:
    FilonTable() {
        values_.resize(2 * kN + 1);
        for (long i = 0; i <= 2 * kN; ++i) {
            const double th = (static_cast<double>(i) - kN) * kStep;
            filon_ab(th, values_[i].first, values_[i].second);
        }
    }
    void eval(double th, cdouble& A, cdouble& B) const {
        const double pos = th * kInvStep + kN;
        if (pos < 0.0 || pos >= 2 * kN) {
            filon_ab(th, A, B);
            return;
        }
        const long i = static_cast<long>(pos);
        const double f = pos - static_cast<double>(i);
        A = values_[i].first * (1.0 - f) + values_[i + 1].first * f;
        B = values_[i].second * (1.0 - f) + values_[i + 1].second * f;
    }

private:
    static constexpr long kN = 1 << 15;  // range +-512 at 1/64 step
    static constexpr double kStep = 1.0 / 64.0;
    static constexpr double kInvStep = 64.0;
    std::vector<std::pair<cdouble, cdouble>> values_;
};

const FilonTable& filon_table() {
    static FilonTable table;
    return table;
}

}  // namespace

// ---------------------------------------------------------------------------
// reduced solver and closed forms
// ---------------------------------------------------------------------------

double VRReduced::mass() const {
    double m = 0.0;
    for (double v : values) m += v;
    return m * dq;
}

VRReduced vr_reduced_integrate(double r, double beta, const MediumSpec& medium, double dq,
                               double q_max, std::size_t zeta_steps, double zeta) {
    medium.validate();
    if (q_max <= 0.0) q_max = std::max(8.0, 4.2 * std::sqrt(medium.dcal() * beta));
    const long nq = static_cast<long>(std::ceil(q_max / dq));
    const long npts = 2 * nq + 1;

    VRReduced out;
    out.r = r;
    out.beta = beta;
    out.zeta = zeta;
    out.dq = dq;
    out.q.resize(npts);
    for (long j = 0; j < npts; ++j) out.q[j] = static_cast<double>(j - nq) * dq;
    out.values.assign(npts, 0.0);
    out.values[nq] = 1.0 / dq;  // delta(q)

    // u lattice at even multiples of dq so the q - u/2 shift stays on-lattice
    const double du = 2.0 * dq;
    const long mu = static_cast<long>(std::floor(10.5 / du));
    std::vector<double> uval(2 * mu + 1), uw(2 * mu + 1);
    double total_w = 0.0;
    for (long m = -mu; m <= mu; ++m) {
        uval[m + mu] = static_cast<double>(m) * du;
        uw[m + mu] = medium.c0hat_dimensionless(uval[m + mu]) * du / kTwoPi;
        total_w += uw[m + mu];
    }

    std::vector<double> k1(npts), k2(npts), k3(npts), k4(npts), tmp(npts);
    auto rhs = [&](const std::vector<double>& v, double z, std::vector<double>& outv) {
        for (long j = 0; j < npts; ++j) outv[j] = -total_w * v[j];
        for (long m = -mu; m <= mu; ++m) {
            const double c = uw[m + mu] * std::cos(r * uval[m + mu] * z);
            if (c == 0.0) continue;
            // gather v(q - u/2) = v[j - m]
            for (long j = 0; j < npts; ++j) {
                const long src = j - m;
                if (src >= 0 && src < npts) outv[j] += c * v[src];
            }
        }
        for (long j = 0; j < npts; ++j) outv[j] *= 2.0 * beta;
    };

    const double h = zeta / static_cast<double>(zeta_steps);
    double z = 0.0;
    for (std::size_t step = 0; step < zeta_steps; ++step) {
        rhs(out.values, z, k1);
        for (long j = 0; j < npts; ++j) tmp[j] = out.values[j] + 0.5 * h * k1[j];
        rhs(tmp, z + 0.5 * h, k2);
        for (long j = 0; j < npts; ++j) tmp[j] = out.values[j] + 0.5 * h * k2[j];
        rhs(tmp, z + 0.5 * h, k3);
        for (long j = 0; j < npts; ++j) tmp[j] = out.values[j] + h * k3[j];
        rhs(tmp, z + h, k4);
        for (long j = 0; j < npts; ++j)
            out.values[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        z += h;
    }
    return out;
}

double vr_reduced_wspace(double w, double r, double beta, const MediumSpec& medium, double zeta) {
    medium.validate();
    const double c00 = medium.c0_dimensionless(0.0);
    const double ex = c0_line_integral(0.5 * w, r, zeta) + c0_line_integral(0.5 * w, -r, zeta) -
                      2.0 * c00 * zeta;
    return std::exp(beta * ex);
}

std::vector<double> VRProfile::lattice(double dq) const {
    std::vector<double> out = smooth;
    for (std::size_t j = 0; j < q.size(); ++j)
        if (std::abs(q[j]) < 0.5 * dq) out[j] += delta_coeff / dq;
    return out;
}

VRProfile vr_closed_form(double r, double beta, const MediumSpec& medium,
                         const std::vector<double>& q_nodes, double zeta) {
    medium.validate();
    VRProfile out;
    out.q = q_nodes;
    out.smooth.assign(q_nodes.size(), 0.0);
    const double c00 = medium.c0_dimensionless(0.0);
    out.delta_coeff = std::exp(-2.0 * beta * c00 * zeta);

    // E(u) - plateau decays on the scale of the c0 support shifted by r zeta
    const double u_lim = 2.0 * (4.5 + std::abs(r) * zeta) + 2.0;
    const double du = 0.02;
    const long nu = static_cast<long>(std::ceil(u_lim / du));
    std::vector<double> diff(nu + 1);
    for (long i = 0; i <= nu; ++i) {
        const double u = static_cast<double>(i) * du;
        diff[i] = vr_reduced_wspace(u, r, beta, medium, zeta) - out.delta_coeff;
    }
    // cos-transform with per-cell Filon weights (E is even in u)
    const FilonTable& ft = filon_table();
    for (std::size_t idx = 0; idx < q_nodes.size(); ++idx) {
        const double q = q_nodes[idx];
        const double th = q * du;
        cdouble A, B;
        ft.eval(th, A, B);
        cdouble total(0.0, 0.0);
        for (long i = 0; i < nu; ++i) {
            const cdouble ph = std::polar(1.0, q * static_cast<double>(i) * du);
            total += ph * (A * diff[i] + B * diff[i + 1]);
        }
        // integral over u>0 of (E-c) e^{iqu}; full line = 2 Re
        out.smooth[idx] = 2.0 * (total.real()) * du / kTwoPi;
    }
    return out;
}

double vr_mass_law(double r, double beta, const MediumSpec& medium, double zeta) {
    medium.validate();
    const double c00 = medium.c0_dimensionless(0.0);
    return std::exp(2.0 * beta * (c0_line_integral(0.0, r, zeta) - c00 * zeta));
}

VRProfile vr_asymptotics(VRKind kind, double r, double s, double beta, const MediumSpec& medium,
                         const std::vector<double>& q_nodes, double zeta) {
    medium.validate();
    const double c00 = medium.c0_dimensionless(0.0);
    switch (kind) {
        case VRKind::decay: {
            VRProfile out;
            out.q = q_nodes;
            out.smooth.assign(q_nodes.size(), 0.0);
            out.delta_coeff = std::exp(-2.0 * beta * c00 * zeta);
            return out;
        }
        case VRKind::reduced:
            return vr_closed_form(r, beta, medium, q_nodes, zeta);
        case VRKind::combo: {
            VRProfile a = vr_closed_form(r, beta, medium, q_nodes, zeta);
            VRProfile b = vr_closed_form(s, beta, medium, q_nodes, zeta);
            VRProfile out;
            out.q = q_nodes;
            out.smooth.resize(q_nodes.size());
            for (std::size_t j = 0; j < q_nodes.size(); ++j)
                out.smooth[j] = a.smooth[j] + b.smooth[j];
            out.delta_coeff = a.delta_coeff + b.delta_coeff - std::exp(-2.0 * beta * c00 * zeta);
            return out;
        }
    }
    throw std::logic_error("vr_asymptotics: bad kind");
}

// ---------------------------------------------------------------------------
// full solver
// ---------------------------------------------------------------------------

VRAxis vr_axis_uniform(double span, double step, double layer_guard) {
    VRAxis axis;
    const long n = static_cast<long>(std::round(span / step));
    for (long j = -n; j <= n; ++j) {
        const double v = static_cast<double>(j) * step;
        axis.nodes.push_back(v);
        axis.coarse.push_back(std::abs(v) > layer_guard ? 1 : 0);
    }
    return axis;
}

VRAxis vr_axis_patched(double span, double step, double fine_half, double fine_step) {
    VRAxis axis;
    std::vector<double> nodes;
    const long n = static_cast<long>(std::round(span / step));
    for (long j = -n; j <= n; ++j) nodes.push_back(static_cast<double>(j) * step);
    const long m = static_cast<long>(std::round(fine_half / fine_step));
    for (long j = -m; j <= m; ++j) nodes.push_back(static_cast<double>(j) * fine_step);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                nodes.end());
    for (double v : nodes) {
        axis.nodes.push_back(v);
        // background nodes: outside the fine patch
        axis.coarse.push_back(std::abs(v) > fine_half + 1e-12 ? 1 : 0);
    }
    return axis;
}

namespace {

struct InterpTab {
    std::vector<int> i0, i1;
    std::vector<double> w1;
};

// linear interpolation of node +- u onto the coarse (background) subset
InterpTab make_gather(const VRAxis& axis, double shift) {
    std::vector<int> cidx;
    for (std::size_t j = 0; j < axis.nodes.size(); ++j)
        if (axis.coarse[j]) cidx.push_back(static_cast<int>(j));
    if (cidx.size() < 2) throw std::invalid_argument("vr axis: too few background nodes");

    InterpTab tab;
    const std::size_t n = axis.nodes.size();
    tab.i0.resize(n);
    tab.i1.resize(n);
    tab.w1.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double target = axis.nodes[j] + shift;
        // find coarse cell containing target (clamped)
        std::size_t lo = 0, hi = cidx.size() - 1;
        if (target <= axis.nodes[cidx.front()]) {
            lo = 0;
            hi = 1;
        } else if (target >= axis.nodes[cidx.back()]) {
            lo = cidx.size() - 2;
            hi = cidx.size() - 1;
        } else {
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                if (axis.nodes[cidx[mid]] <= target)
                    lo = mid;
                else
                    hi = mid;
            }
        }
        const double a = axis.nodes[cidx[lo]], b = axis.nodes[cidx[hi]];
        double w = (target - a) / (b - a);
        w = std::clamp(w, 0.0, 1.0);
        tab.i0[j] = cidx[lo];
        tab.i1[j] = cidx[hi];
        tab.w1[j] = w;
    }
    return tab;
}

struct CellGeom {
    double u0, u1, um;
    cdouble w0, w1;  // smooth edge weights beta/(2pi) C0hat(u) e^{-i u w/2}
};

// one independent w-solve of the eight-term system
class WSolver {
public:
    WSolver(const VRAxis& r_axis, const VRAxis& s_axis, double alpha, double beta,
            const MediumSpec& medium, double wval, const VRFullOptions& opts)
        : r_(r_axis.nodes), s_(s_axis.nodes), alpha_(alpha), opts_(opts) {
        nr_ = r_.size();
        ns_ = s_.size();
        const long ncell = static_cast<long>(std::round(opts.u_max / opts.du));
        for (long c = -ncell; c < ncell; ++c) {
            CellGeom g;
            g.u0 = static_cast<double>(c) * opts.du;
            g.u1 = g.u0 + opts.du;
            g.um = 0.5 * (g.u0 + g.u1);
            const double f0 = beta / kTwoPi * medium.c0hat_dimensionless(g.u0);
            const double f1 = beta / kTwoPi * medium.c0hat_dimensionless(g.u1);
            g.w0 = f0 * std::polar(1.0, -0.5 * g.u0 * wval);
            g.w1 = f1 * std::polar(1.0, -0.5 * g.u1 * wval);
            cells_.push_back(g);
        }
        // gather tables at every cell edge: edge e has value e*du
        for (long e = -ncell; e <= ncell; ++e) {
            const double u = static_cast<double>(e) * opts.du;
            grm_.push_back(make_gather(r_axis, -u));
            grp_.push_back(make_gather(r_axis, +u));
            gsm_.push_back(make_gather(s_axis, -u));
            gsp_.push_back(make_gather(s_axis, +u));
        }
        total_loss_ = beta * medium.c0_dimensionless(0.0);
    }

    // run to zeta = 1 and return the state
    std::vector<cdouble> run(double zeta_end = 1.0) {
        std::vector<cdouble> V(nr_ * ns_, cdouble(1.0, 0.0));
        std::vector<cdouble> Vp(nr_ * ns_), dV(nr_ * ns_);
        const double h = zeta_end / static_cast<double>(opts_.zeta_steps);
        double z = 0.0;
        for (std::size_t step = 0; step < opts_.zeta_steps; ++step) {
            assemble(V, V, z, h, dV);
            for (std::size_t i = 0; i < V.size(); ++i) Vp[i] = V[i] + dV[i];
            assemble(V, Vp, z, h, dV);
            for (std::size_t i = 0; i < V.size(); ++i) V[i] += dV[i];
            z += h;
        }
        return V;
    }

private:
    void gather_r(const std::vector<cdouble>& V, const InterpTab& t,
                  std::vector<cdouble>& out) const {
        for (std::size_t i = 0; i < nr_; ++i) {
            const cdouble* row0 = V.data() + static_cast<std::size_t>(t.i0[i]) * ns_;
            const cdouble* row1 = V.data() + static_cast<std::size_t>(t.i1[i]) * ns_;
            const double w1v = t.w1[i], w0v = 1.0 - w1v;
            cdouble* dst = out.data() + i * ns_;
            for (std::size_t j = 0; j < ns_; ++j) dst[j] = w0v * row0[j] + w1v * row1[j];
        }
    }

    void assemble(const std::vector<cdouble>& Vn, const std::vector<cdouble>& Vp, double z,
                  double h, std::vector<cdouble>& acc) {
        const double zm = z + 0.5 * h;
        const FilonTable& ft = filon_table();
        std::fill(acc.begin(), acc.end(), cdouble(0.0, 0.0));

        std::vector<cdouble> gm0n(nr_ * ns_), gm1n(nr_ * ns_), gp0n(nr_ * ns_), gp1n(nr_ * ns_);
        std::vector<cdouble> gm0p(nr_ * ns_), gm1p(nr_ * ns_), gp0p(nr_ * ns_), gp1p(nr_ * ns_);
        std::vector<cdouble> km1n(ns_), km2n(ns_), km1p(ns_), km2p(ns_);
        std::vector<cdouble> kp1n(ns_), kp2n(ns_), kp1p(ns_), kp2p(ns_);
        std::vector<cdouble> er_z(nr_), es_z(ns_), er_u(nr_), es_u(ns_);

        for (std::size_t c = 0; c < cells_.size(); ++c) {
            const CellGeom& g = cells_[c];
            const std::size_t e0 = c, e1 = c + 1;
            const double du = g.u1 - g.u0;
            const double off = g.u0 - g.um;  // = -du/2

            gather_r(Vn, grm_[e0], gm0n);
            gather_r(Vn, grm_[e1], gm1n);
            gather_r(Vn, grp_[e0], gp0n);
            gather_r(Vn, grp_[e1], gp1n);
            gather_r(Vp, grm_[e0], gm0p);
            gather_r(Vp, grm_[e1], gm1p);
            gather_r(Vp, grp_[e0], gp0p);
            gather_r(Vp, grp_[e1], gp1p);

            // terms 1 and 2: V(r -+ u, s), zeta rate -+ alpha s um,
            // in-u rate -+ alpha s zm
            for (std::size_t j = 0; j < ns_; ++j) {
                const double base = alpha_ * s_[j];
                for (int sign = 0; sign < 2; ++sign) {
                    const double sg = sign == 0 ? -1.0 : 1.0;
                    const double nu = sg * base * g.um;
                    const double dnud = sg * base;
                    cdouble Az, Bz, Au, Bu;
                    ft.eval(nu * h, Az, Bz);
                    ft.eval(dnud * zm * du, Au, Bu);
                    const cdouble front = du * h * std::polar(1.0, nu * z) *
                                          std::polar(1.0, dnud * zm * off);
                    const cdouble c0w = Au * g.w0, c1w = Bu * g.w1;
                    if (sign == 0) {
                        km1n[j] = front * Az * c0w;
                        km2n[j] = front * Az * c1w;
                        km1p[j] = front * Bz * c0w;
                        km2p[j] = front * Bz * c1w;
                    } else {
                        kp1n[j] = front * Az * c0w;
                        kp2n[j] = front * Az * c1w;
                        kp1p[j] = front * Bz * c0w;
                        kp2p[j] = front * Bz * c1w;
                    }
                }
            }
            for (std::size_t i = 0; i < nr_; ++i) {
                cdouble* arow = acc.data() + i * ns_;
                const std::size_t base = i * ns_;
                for (std::size_t j = 0; j < ns_; ++j) {
                    arow[j] += km1n[j] * gm0n[base + j] + km2n[j] * gm1n[base + j] +
                               km1p[j] * gm0p[base + j] + km2p[j] * gm1p[base + j];
                    arow[j] += kp1n[j] * gp0n[base + j] + kp2n[j] * gp1n[base + j] +
                               kp1p[j] * gp0p[base + j] + kp2p[j] * gp1p[base + j];
                }
            }

            // terms 3 and 4: V(r, s -+ u), zeta rate -+ alpha r um
            for (std::size_t i = 0; i < nr_; ++i) {
                const double base = alpha_ * r_[i];
                cdouble cm1, cm2, cp1, cp2, dm1, dm2, dp1, dp2;
                for (int sign = 0; sign < 2; ++sign) {
                    const double sg = sign == 0 ? -1.0 : 1.0;
                    const double nu = sg * base * g.um;
                    const double dnud = sg * base;
                    cdouble Az, Bz, Au, Bu;
                    ft.eval(nu * h, Az, Bz);
                    ft.eval(dnud * zm * du, Au, Bu);
                    const cdouble front = du * h * std::polar(1.0, nu * z) *
                                          std::polar(1.0, dnud * zm * off);
                    const cdouble c0w = Au * g.w0, c1w = Bu * g.w1;
                    if (sign == 0) {
                        cm1 = front * Az * c0w;
                        cm2 = front * Az * c1w;
                        dm1 = front * Bz * c0w;
                        dm2 = front * Bz * c1w;
                    } else {
                        cp1 = front * Az * c0w;
                        cp2 = front * Az * c1w;
                        dp1 = front * Bz * c0w;
                        dp2 = front * Bz * c1w;
                    }
                }
                const InterpTab& tm0 = gsm_[e0];
                const InterpTab& tm1 = gsm_[e1];
                const InterpTab& tp0 = gsp_[e0];
                const InterpTab& tp1 = gsp_[e1];
                const cdouble* vn = Vn.data() + i * ns_;
                const cdouble* vp = Vp.data() + i * ns_;
                cdouble* arow = acc.data() + i * ns_;
                for (std::size_t j = 0; j < ns_; ++j) {
                    const cdouble sm0n = (1.0 - tm0.w1[j]) * vn[tm0.i0[j]] +
                                         tm0.w1[j] * vn[tm0.i1[j]];
                    const cdouble sm1n = (1.0 - tm1.w1[j]) * vn[tm1.i0[j]] +
                                         tm1.w1[j] * vn[tm1.i1[j]];
                    const cdouble sp0n = (1.0 - tp0.w1[j]) * vn[tp0.i0[j]] +
                                         tp0.w1[j] * vn[tp0.i1[j]];
                    const cdouble sp1n = (1.0 - tp1.w1[j]) * vn[tp1.i0[j]] +
                                         tp1.w1[j] * vn[tp1.i1[j]];
                    const cdouble sm0p = (1.0 - tm0.w1[j]) * vp[tm0.i0[j]] +
                                         tm0.w1[j] * vp[tm0.i1[j]];
                    const cdouble sm1p = (1.0 - tm1.w1[j]) * vp[tm1.i0[j]] +
                                         tm1.w1[j] * vp[tm1.i1[j]];
                    const cdouble sp0p = (1.0 - tp0.w1[j]) * vp[tp0.i0[j]] +
                                         tp0.w1[j] * vp[tp0.i1[j]];
                    const cdouble sp1p = (1.0 - tp1.w1[j]) * vp[tp1.i0[j]] +
                                         tp1.w1[j] * vp[tp1.i1[j]];
                    arow[j] += cm1 * sm0n + cm2 * sm1n + dm1 * sm0p + dm2 * sm1p;
                    arow[j] += cp1 * sp0n + cp2 * sp1n + dp1 * sp0p + dp2 * sp1p;
                }
            }

            // cross terms: -V(r-u, s+u) with phase alpha[(r-s)u - u^2] zeta
            //              -V(r-u, s-u) with phase -alpha[(r+s)u + u^2] zeta
            for (std::size_t i = 0; i < nr_; ++i) {
                er_z[i] = std::polar(1.0, alpha_ * r_[i] * g.um * z);
                er_u[i] = std::polar(1.0, alpha_ * r_[i] * zm * off);
            }
            for (std::size_t j = 0; j < ns_; ++j) {
                es_z[j] = std::polar(1.0, alpha_ * s_[j] * g.um * z);
                es_u[j] = std::polar(1.0, alpha_ * s_[j] * zm * off);
            }
            const cdouble euu_z = std::polar(1.0, -alpha_ * g.um * g.um * z);
            const cdouble euu_u = std::polar(1.0, -alpha_ * 2.0 * g.um * zm * off);
            const InterpTab& tp0 = gsp_[e0];
            const InterpTab& tp1 = gsp_[e1];
            const InterpTab& tm0 = gsm_[e0];
            const InterpTab& tm1 = gsm_[e1];
            for (std::size_t i = 0; i < nr_; ++i) {
                const double ar = alpha_ * r_[i];
                const std::size_t base = i * ns_;
                cdouble* arow = acc.data() + i * ns_;
                for (std::size_t j = 0; j < ns_; ++j) {
                    const double as = alpha_ * s_[j];
                    // term 6
                    {
                        const double nu = (ar - as) * g.um - alpha_ * g.um * g.um;
                        const double dnud = (ar - as) - 2.0 * alpha_ * g.um;
                        cdouble Az, Bz, Au, Bu;
                        ft.eval(nu * h, Az, Bz);
                        ft.eval(dnud * zm * du, Au, Bu);
                        const cdouble phz = er_z[i] * std::conj(es_z[j]) * euu_z;
                        const cdouble phu = er_u[i] * std::conj(es_u[j]) * euu_u;
                        const cdouble front = du * h * phz * phu;
                        const cdouble fLn = (1.0 - tp0.w1[j]) * gm0n[base + tp0.i0[j]] +
                                            tp0.w1[j] * gm0n[base + tp0.i1[j]];
                        const cdouble fRn = (1.0 - tp1.w1[j]) * gm1n[base + tp1.i0[j]] +
                                            tp1.w1[j] * gm1n[base + tp1.i1[j]];
                        const cdouble fLp = (1.0 - tp0.w1[j]) * gm0p[base + tp0.i0[j]] +
                                            tp0.w1[j] * gm0p[base + tp0.i1[j]];
                        const cdouble fRp = (1.0 - tp1.w1[j]) * gm1p[base + tp1.i0[j]] +
                                            tp1.w1[j] * gm1p[base + tp1.i1[j]];
                        arow[j] -= front * (Az * (Au * g.w0 * fLn + Bu * g.w1 * fRn) +
                                            Bz * (Au * g.w0 * fLp + Bu * g.w1 * fRp));
                    }
                    // term 7
                    {
                        const double nu = -((ar + as) * g.um + alpha_ * g.um * g.um);
                        const double dnud = -((ar + as) + 2.0 * alpha_ * g.um);
                        cdouble Az, Bz, Au, Bu;
                        ft.eval(nu * h, Az, Bz);
                        ft.eval(dnud * zm * du, Au, Bu);
                        const cdouble phz = std::conj(er_z[i] * es_z[j]) * euu_z;
                        const cdouble phu = std::conj(er_u[i] * es_u[j]) * euu_u;
                        const cdouble front = du * h * phz * phu;
                        const cdouble fLn = (1.0 - tm0.w1[j]) * gm0n[base + tm0.i0[j]] +
                                            tm0.w1[j] * gm0n[base + tm0.i1[j]];
                        const cdouble fRn = (1.0 - tm1.w1[j]) * gm1n[base + tm1.i0[j]] +
                                            tm1.w1[j] * gm1n[base + tm1.i1[j]];
                        const cdouble fLp = (1.0 - tm0.w1[j]) * gm0p[base + tm0.i0[j]] +
                                            tm0.w1[j] * gm0p[base + tm0.i1[j]];
                        const cdouble fRp = (1.0 - tm1.w1[j]) * gm1p[base + tm1.i0[j]] +
                                            tm1.w1[j] * gm1p[base + tm1.i1[j]];
                        arow[j] -= front * (Az * (Au * g.w0 * fLn + Bu * g.w1 * fRn) +
                                            Bz * (Au * g.w0 * fLp + Bu * g.w1 * fRp));
                    }
                }
            }
        }

        // loss term -2 beta c0(0) V, trapezoidal in zeta
        const double loss = 2.0 * total_loss_ * 0.5 * h;
        for (std::size_t idx = 0; idx < acc.size(); ++idx)
            acc[idx] -= loss * (Vn[idx] + Vp[idx]);
    }

    std::vector<double> r_, s_;
    double alpha_;
    VRFullOptions opts_;
    std::size_t nr_ = 0, ns_ = 0;
    std::vector<CellGeom> cells_;
    std::vector<InterpTab> grm_, grp_, gsm_, gsp_;
    double total_loss_ = 0.0;
};

}  // namespace

VRFullSolution vr_integrate_full(const VRAxis& r_axis, const VRAxis& s_axis, double alpha,
                                 double beta, const MediumSpec& medium,
                                 const VRFullOptions& opts) {
    medium.validate();
    VRFullSolution sol;
    sol.r_axis = r_axis;
    sol.s_axis = s_axis;
    sol.alpha = alpha;
    sol.beta = beta;
    sol.medium = medium;

    const std::size_t nw = static_cast<std::size_t>(std::round(opts.w_max / opts.dw)) + 1;
    sol.w.resize(nw);
    for (std::size_t i = 0; i < nw; ++i) sol.w[i] = static_cast<double>(i) * opts.dw;
    sol.vhat.assign(nw * r_axis.nodes.size() * s_axis.nodes.size(), cdouble(0.0, 0.0));

    unsigned threads = opts.threads ? opts.threads : std::thread::hardware_concurrency();
    if (threads == 0) threads = 1;
    threads = std::min<unsigned>(threads, nw);

    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t iw = next.fetch_add(1);
            if (iw >= nw) return;
            WSolver solver(r_axis, s_axis, alpha, beta, medium, sol.w[iw], opts);
            std::vector<cdouble> v = solver.run(sol.zeta);
            std::copy(v.begin(), v.end(),
                      sol.vhat.begin() +
                          static_cast<std::ptrdiff_t>(iw * r_axis.nodes.size() *
                                                      s_axis.nodes.size()));
        }
    };
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return sol;
}

namespace {

struct AxisLoc {
    std::size_t i0, i1;
    double w;
};

AxisLoc locate(const std::vector<double>& nodes, double v) {
    AxisLoc loc;
    if (v <= nodes.front()) return {0, 0, 0.0};
    if (v >= nodes.back()) return {nodes.size() - 1, nodes.size() - 1, 0.0};
    std::size_t lo = 0, hi = nodes.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (nodes[mid] <= v)
            lo = mid;
        else
            hi = mid;
    }
    loc.i0 = lo;
    loc.i1 = hi;
    loc.w = (v - nodes[lo]) / (nodes[hi] - nodes[lo]);
    return loc;
}

}  // namespace

cdouble VRFullSolution::vhat_interp(double w_val, double r, double s) const {
    const double wa = std::abs(w_val);
    const AxisLoc lw = locate(w, wa);
    const AxisLoc lr = locate(r_axis.nodes, r);
    const AxisLoc ls = locate(s_axis.nodes, s);
    auto plane = [&](std::size_t iw) {
        const cdouble v00 = at(iw, lr.i0, ls.i0), v01 = at(iw, lr.i0, ls.i1);
        const cdouble v10 = at(iw, lr.i1, ls.i0), v11 = at(iw, lr.i1, ls.i1);
        return (1.0 - lr.w) * ((1.0 - ls.w) * v00 + ls.w * v01) +
               lr.w * ((1.0 - ls.w) * v10 + ls.w * v11);
    };
    cdouble v = (1.0 - lw.w) * plane(lw.i0) + lw.w * plane(lw.i1);
    return w_val < 0.0 ? std::conj(v) : v;
}

cdouble VRFullSolution::delta_coeff(double r, double s) const {
    return vhat_interp(w.back(), r, s);
}

cdouble VRFullSolution::mass(double r, double s) const { return vhat_interp(0.0, r, s); }

cdouble VRFullSolution::smooth_q(double q, double r, double s) const {
    const AxisLoc lr = locate(r_axis.nodes, r);
    const AxisLoc ls = locate(s_axis.nodes, s);
    auto value = [&](std::size_t iw) {
        const cdouble v00 = at(iw, lr.i0, ls.i0), v01 = at(iw, lr.i0, ls.i1);
        const cdouble v10 = at(iw, lr.i1, ls.i0), v11 = at(iw, lr.i1, ls.i1);
        return (1.0 - lr.w) * ((1.0 - ls.w) * v00 + ls.w * v01) +
               lr.w * ((1.0 - ls.w) * v10 + ls.w * v11);
    };
    const cdouble plateau = value(w.size() - 1);
    const double dw = w[1] - w[0];
    // (1/pi) Re int_0^wmax (vhat - plateau) e^{i q w} dw, trapezoid
    cdouble total = 0.5 * (value(0) - plateau);
    for (std::size_t iw = 1; iw + 1 < w.size(); ++iw)
        total += (value(iw) - plateau) * std::polar(1.0, q * w[iw]);
    return total.real() * dw / std::numbers::pi;
}

cdouble VRFullSolution::q_lattice_value(double q, double dq, double r, double s) const {
    cdouble v = smooth_q(q, r, s);
    if (std::abs(q) < 0.5 * dq) v += delta_coeff(r, s) / dq;
    return v;
}

VRSampler VRFullSolution::sampler() const {
    VRSampler s;
    s.smooth = [this](double q, double r, double sv) { return smooth_q(q, r, sv); };
    s.delta_coeff = [this](double r, double sv) { return delta_coeff(r, sv); };
    return s;
}

// ---------------------------------------------------------------------------
// transmitted Wigner distribution, Eq. 4.5
// ---------------------------------------------------------------------------

namespace {

double wt_exponent(double eta1, double eta2, double zeta, double beta, const MediumSpec& med) {
    // beta int_0^zeta [c0(eta1 + eta2 t) - c0(0)] dt for the gaussian family
    const double c00 = med.c0_dimensionless(0.0);
    double line;
    if (std::abs(eta2) < 1e-14) {
        line = med.c0_dimensionless(eta1) * zeta;
    } else {
        line = kSqrtPi * 0.5 * kSqrtPi / eta2 * (std::erf(eta1 + eta2 * zeta) - std::erf(eta1));
    }
    return beta * (line - c00 * zeta);
}

}  // namespace

WTValue wt_eval(double zeta, double x, double x_prime, double q, double q_prime, double alpha,
                double beta, const MediumSpec& medium, double T0, double r0,
                std::size_t nodes) {
    medium.validate();
    WTValue out;
    const double c00 = medium.c0_dimensionless(0.0);
    const double plateau = std::exp(-beta * c00 * zeta);
    out.coherent_coeff = T0 * T0 / alpha * plateau;

    const double X = r0 * (x_prime - x) / (alpha * medium.l_x);
    auto quad = [&](double span, std::size_t n) {
        const double h = 2.0 * span / static_cast<double>(n);
        cdouble total(0.0, 0.0);
        for (std::size_t i1 = 0; i1 <= n; ++i1) {
            const double e1 = -span + h * static_cast<double>(i1);
            const double w1 = (i1 == 0 || i1 == n) ? 0.5 : 1.0;
            for (std::size_t i2 = 0; i2 <= n; ++i2) {
                const double e2 = -span + h * static_cast<double>(i2);
                const double w2 = (i2 == 0 || i2 == n) ? 0.5 : 1.0;
                const double mag = std::exp(wt_exponent(e1, e2, zeta, beta, medium)) - plateau;
                if (mag == 0.0) continue;
                const double phase = -(q_prime + q) * e1 - (X + q * zeta) * e2;
                total += w1 * w2 * mag * std::polar(1.0, phase);
            }
        }
        return total * h * h;
    };
    const double span = 6.0 + 5.0 / std::max(zeta, 0.2);
    const cdouble a = quad(span, nodes);
    const cdouble b = quad(span, nodes + nodes / 2);
    out.smooth = b * (T0 * T0 / (4.0 * std::numbers::pi * std::numbers::pi * alpha));
    const double scale = std::abs(b) + 1e-12;
    out.converged = std::abs(a - b) / scale < 1e-3;
    return out;
}

cdouble wt_gaussian_probe(double zeta, const WTProbe& probe, double alpha, double beta,
                          const MediumSpec& medium, double T0, double r0, std::size_t nodes) {
    medium.validate();
    const double rho = r0 / (alpha * medium.l_x);

    auto ghat = [](double width, double omega) {
        return width * kSqrtPi * std::exp(-width * width * omega * omega / 4.0);
    };

    // spans set by the gaussian transforms
    const double e2max = 7.0 / (probe.x_width * rho);
    const double e1max = 7.0 / probe.qp_width + zeta * e2max + 7.0 / probe.q_width;
    const std::size_t n1 = nodes, n2 = nodes;
    const double h1 = 2.0 * e1max / static_cast<double>(n1);
    const double h2 = 2.0 * e2max / static_cast<double>(n2);

    cdouble total(0.0, 0.0);
    for (std::size_t i2 = 0; i2 <= n2; ++i2) {
        const double e2 = -e2max + h2 * static_cast<double>(i2);
        const double w2 = (i2 == 0 || i2 == n2) ? 0.5 : 1.0;
        const double fx = ghat(probe.x_width, rho * e2);
        if (fx < 1e-300) continue;
        cdouble x_factor = fx * std::polar(1.0, -probe.x_center * rho * e2);
        if (probe.d_dxcenter) x_factor *= cdouble(0.0, -rho * e2);
        for (std::size_t i1 = 0; i1 <= n1; ++i1) {
            const double e1 = -e1max + h1 * static_cast<double>(i1);
            const double w1 = (i1 == 0 || i1 == n1) ? 0.5 : 1.0;
            const double arg_q = e1 + zeta * e2;
            const double fq = ghat(probe.q_width, arg_q);
            const double fqp = ghat(probe.qp_width, e1);
            cdouble qp_factor =
                fqp * std::polar(1.0, -probe.qp_center * e1);
            if (probe.qp_weight) {
                // int q' g(q'-c) e^{-i q' e1} dq' = e^{-i c e1}[c - i w^2 e1 / 2] ghat
                qp_factor *= cdouble(probe.qp_center, -probe.qp_width * probe.qp_width * e1 / 2.0);
            }
            const cdouble q_factor = fq * std::polar(1.0, -probe.q_center * arg_q);
            const double env = std::exp(wt_exponent(e1, e2, zeta, beta, medium));
            total += w1 * w2 * env * x_factor * q_factor * qp_factor;
        }
    }
    total *= h1 * h2;
    return total * (T0 * T0 / (4.0 * std::numbers::pi * std::numbers::pi * alpha));
}

}  // namespace paraxia
