#include "paraxia/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "paraxia/fft.hpp"

namespace paraxia {

BoundaryCoefficients reflection_coefficients(double Z0) {
    if (!(Z0 > 0.0)) throw std::invalid_argument("boundary: Z0 must be > 0");
    BoundaryCoefficients c;
    c.Z0 = Z0;
    c.R0 = (Z0 - 1.0) / (Z0 + 1.0);
    c.T0 = 2.0 * std::sqrt(Z0) / (1.0 + Z0);
    return c;
}

double FieldSlice::energy() const {
    double e = 0.0;
    for (const auto& v : values) e += std::norm(v);
    return e * grid.dx;
}

bool FieldSlice::finite() const {
    for (const auto& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double KernelSlice::symmetry_defect() const {
    const std::size_t n = grid.n;
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            worst = std::max(worst, std::abs(values[i * n + j] - values[j * n + i]));
            scale = std::max(scale, std::abs(values[i * n + j]));
        }
    return scale > 0.0 ? worst / scale : worst;
}

FieldSlice make_gaussian_beam(const GaussianBeam& beam, const Grid& grid, double k) {
    if (!(beam.r0 > 0.0)) throw std::invalid_argument("beam: r0 must be > 0");
    const double dkappa = 2.0 * std::numbers::pi / grid.width();
    const double mode = beam.kappa_inc / dkappa;
    if (std::abs(mode - std::round(mode)) > 1e-9)
        throw std::invalid_argument("beam: kappa_inc must sit on the frequency lattice");

    FieldSlice f;
    f.grid = grid;
    f.k = k;
    f.z = 0.0;
    f.values.resize(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double x = grid.x(j);
        const double env = beam.amplitude * std::exp(-x * x / (beam.r0 * beam.r0));
        f.values[j] = env * std::polar(1.0, beam.kappa_inc * x);
    }
    return f;
}

FieldSlice make_source_beam(const SourceBeam& beam, const Grid& grid, double k) {
    if (beam.profile.size() != grid.n)
        throw std::invalid_argument("beam: source profile size mismatch");
    if (beam.z0 < beam.L) throw std::invalid_argument("beam: source must sit at z0 >= L");
    FieldSlice f;
    f.grid = grid;
    f.k = k;
    f.z = 0.0;
    f.values = beam.profile;
    Fft::forward(f.values);
    for (std::size_t m = 0; m < grid.n; ++m) {
        const double kap = grid.kappa(m);
        f.values[m] *= std::polar(1.0, kap * kap * (beam.L - beam.z0) / (2.0 * k));
    }
    Fft::inverse(f.values);
    for (auto& v : f.values) v *= -0.5;
    return f;
}

std::vector<double> absorbing_mask(const Grid& grid) {
    std::vector<double> mask(grid.n);
    const double scale = 0.45 * grid.width();
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double r = std::abs(grid.x(j)) / scale;
        mask[j] = std::exp(-std::pow(r, 16.0));
    }
    return mask;
}

namespace {

struct StepWork {
    std::vector<cdouble> half_free;  // spectral multiplier per mode
};

StepWork make_step_work(const FieldSlice& field, double dz, bool conjugate) {
    StepWork w;
    w.half_free.resize(field.grid.n);
    const double sign = conjugate ? 1.0 : -1.0;
    for (std::size_t m = 0; m < field.grid.n; ++m) {
        const double kap = field.grid.kappa(m);
        w.half_free[m] = std::polar(1.0, sign * kap * kap * dz / (4.0 * field.k));
    }
    return w;
}

void half_free_step(std::vector<cdouble>& values, const StepWork& w) {
    Fft::forward(values);
    for (std::size_t m = 0; m < values.size(); ++m) values[m] *= w.half_free[m];
    Fft::inverse(values);
}

}  // namespace

FieldSlice split_step_pass(const FieldSlice& field, const ScreenStack& screens,
                           const PassOptions& opts) {
    if (!(field.grid == screens.grid))
        throw std::invalid_argument("split_step: field and screens on different grids");
    if (!(field.k > 0.0)) throw std::invalid_argument("split_step: k must be > 0");

    FieldSlice out = field;
    const std::size_t n_steps = screens.n_steps();
    const StepWork w = make_step_work(field, screens.dz, opts.conjugate);
    const double phase_scale = (opts.conjugate ? -1.0 : 1.0) * field.k / 2.0;

    for (std::size_t s = 0; s < n_steps; ++s) {
        const std::size_t j = (opts.order == PassOrder::forward) ? s : n_steps - 1 - s;
        half_free_step(out.values, w);
        const auto& screen = screens.screens[j];
        for (std::size_t i = 0; i < out.values.size(); ++i)
            out.values[i] *= std::polar(1.0, phase_scale * screen[i]);
        half_free_step(out.values, w);
        if (opts.mask)
            for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= (*opts.mask)[i];
    }
    out.z = field.z + (opts.order == PassOrder::forward ? 1.0 : -1.0) *
                          (static_cast<double>(n_steps) * screens.dz);
    return out;
}

FieldSlice transmit(const FieldSlice& b_inc, const ScreenStack& screens,
                    const BoundaryCoefficients& coeffs, const std::vector<double>* mask) {
    PassOptions opts;
    opts.order = PassOrder::forward;
    opts.mask = mask;
    FieldSlice out = split_step_pass(b_inc, screens, opts);
    for (auto& v : out.values) v *= coeffs.T0;
    return out;
}

FieldSlice reflect_double_pass(const FieldSlice& b_inc, const ScreenStack& screens,
                               const BoundaryCoefficients& coeffs,
                               const std::vector<double>* mask) {
    PassOptions down;
    down.order = PassOrder::reverse;
    down.mask = mask;
    FieldSlice mid = split_step_pass(b_inc, screens, down);
    PassOptions up;
    up.order = PassOrder::forward;
    up.mask = mask;
    FieldSlice out = split_step_pass(mid, screens, up);
    for (auto& v : out.values) v *= coeffs.R0;
    out.z = b_inc.z;
    return out;
}

namespace {

// 2D half free step exp(-i (kappa^2 + kappa'^2) dz/(4k)) on the n x n kernel
void kernel_half_free(std::vector<cdouble>& k2d, const Grid& grid,
                      const std::vector<cdouble>& mult) {
    const std::size_t n = grid.n;
    // rows
    for (std::size_t i = 0; i < n; ++i) {
        std::span<cdouble> row(k2d.data() + i * n, n);
        Fft::forward(row);
        for (std::size_t m = 0; m < n; ++m) row[m] *= mult[m];
        Fft::inverse(row);
    }
    // columns
    std::vector<cdouble> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) col[i] = k2d[i * n + j];
        Fft::forward(col);
        for (std::size_t m = 0; m < n; ++m) col[m] *= mult[m];
        Fft::inverse(col);
        for (std::size_t i = 0; i < n; ++i) k2d[i * n + j] = col[i];
    }
}

}  // namespace

KernelSlice reflect_kernel(const ScreenStack& screens, double k,
                           const BoundaryCoefficients& coeffs) {
    if (!(k > 0.0)) throw std::invalid_argument("reflect_kernel: k must be > 0");
    const Grid& grid = screens.grid;
    const std::size_t n = grid.n;

    KernelSlice kernel;
    kernel.grid = grid;
    kernel.k = k;
    kernel.z = static_cast<double>(screens.n_steps()) * screens.dz;
    kernel.values.assign(n * n, cdouble(0.0, 0.0));
    const double delta = coeffs.R0 / grid.dx;  // delta(x - x') on the diagonal
    for (std::size_t i = 0; i < n; ++i) kernel.values[i * n + i] = delta;

    std::vector<cdouble> mult(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double kap = grid.kappa(m);
        mult[m] = std::polar(1.0, -kap * kap * screens.dz / (4.0 * k));
    }

    for (std::size_t step = 0; step < screens.n_steps(); ++step) {
        kernel_half_free(kernel.values, grid, mult);
        const auto& screen = screens.screens[step];
        for (std::size_t i = 0; i < n; ++i) {
            const cdouble pi = std::polar(1.0, 0.5 * k * screen[i]);
            for (std::size_t j = 0; j < n; ++j)
                kernel.values[i * n + j] *= pi * std::polar(1.0, 0.5 * k * screen[j]);
        }
        kernel_half_free(kernel.values, grid, mult);
    }
    return kernel;
}

FieldSlice apply_kernel(const KernelSlice& kernel, const FieldSlice& field) {
    if (!(kernel.grid == field.grid))
        throw std::invalid_argument("apply_kernel: grid mismatch");
    const std::size_t n = kernel.grid.n;
    FieldSlice out = field;
    for (std::size_t i = 0; i < n; ++i) {
        cdouble acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) acc += kernel.values[i * n + j] * field.values[j];
        out.values[i] = acc * kernel.grid.dx;
    }
    out.z = kernel.z;
    return out;
}

std::vector<std::vector<cdouble>> synthesize_time_trace(
    const std::vector<FieldSlice>& fields_by_k, const std::vector<cdouble>& weights,
    const std::vector<double>& s_grid) {
    if (fields_by_k.empty()) throw std::invalid_argument("time trace: empty wavenumber set");
    if (fields_by_k.size() != weights.size())
        throw std::invalid_argument("time trace: weights/fields size mismatch");
    const std::size_t nk = fields_by_k.size();
    const std::size_t n = fields_by_k.front().grid.n;
    for (const auto& f : fields_by_k)
        if (f.grid.n != n) throw std::invalid_argument("time trace: grid mismatch");

    double scale = 1.0;
    if (nk > 1) {
        const double dk = fields_by_k[1].k - fields_by_k[0].k;
        for (std::size_t j = 1; j < nk; ++j)
            if (std::abs(fields_by_k[j].k - fields_by_k[j - 1].k - dk) > 1e-9 * std::abs(dk))
                throw std::invalid_argument("time trace: wavenumber samples must be uniform");
        scale = dk / (2.0 * std::numbers::pi);
    }

    std::vector<std::vector<cdouble>> trace(s_grid.size(), std::vector<cdouble>(n, 0.0));
    for (std::size_t si = 0; si < s_grid.size(); ++si) {
        for (std::size_t j = 0; j < nk; ++j) {
            // trapezoid endpoints carry half weight
            double trap = (nk > 1 && (j == 0 || j == nk - 1)) ? 0.5 : 1.0;
            const cdouble c =
                weights[j] * std::polar(1.0, -fields_by_k[j].k * s_grid[si]) * scale * trap;
            const auto& vals = fields_by_k[j].values;
            for (std::size_t i = 0; i < n; ++i) trace[si][i] += c * vals[i];
        }
    }
    return trace;
}

}  // namespace paraxia
