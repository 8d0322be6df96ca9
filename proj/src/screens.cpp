#include "paraxia/screens.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "paraxia/fft.hpp"
#include "paraxia/rng.hpp"

namespace paraxia {

Grid::Grid(std::size_t n_, double dx_) : n(n_), dx(dx_) {
    if (n < 4 || !std::has_single_bit(n))
        throw std::invalid_argument("grid: n must be a power of two >= 4");
    if (!(dx > 0.0)) throw std::invalid_argument("grid: dx must be > 0");
}

double Grid::x(std::size_t j) const {
    return (static_cast<double>(j) - static_cast<double>(n / 2)) * dx;
}

double Grid::kappa(std::size_t m) const { return dft_frequency(m, n, dx); }

void Grid::check_resolves(const MediumSpec& spec) const {
    if (dx > spec.l_x / 4.0 + 1e-12)
        throw std::invalid_argument("grid: dx must be <= l_x/4 to resolve the medium");
}

ScreenStack synthesize_screens(const MediumSpec& spec, const Grid& grid, std::size_t n_steps,
                               double dz, std::uint64_t master_seed, std::uint64_t stream_id) {
    spec.validate();
    grid.check_resolves(spec);
    if (!(dz > 0.0)) throw std::invalid_argument("screens: dz must be > 0");

    const std::size_t n = grid.n;
    const double width = grid.width();

    // mode amplitudes sqrt(dz * C0hat(kappa_m) / width)
    std::vector<double> amp(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double spectrum = spec.c0hat(grid.kappa(m));
        if (spectrum < 0.0) throw std::invalid_argument("screens: C0hat < 0 on the lattice");
        amp[m] = std::sqrt(dz * spectrum / width);
    }

    RngStream rng(master_seed, stream_id);
    ScreenStack stack;
    stack.grid = grid;
    stack.dz = dz;
    stack.stream_id = stream_id;
    stack.screens.reserve(n_steps);

    std::vector<cdouble> modes(n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (std::size_t step = 0; step < n_steps; ++step) {
        modes[0] = amp[0] * rng.next_normal();
        for (std::size_t m = 1; m < n / 2; ++m) {
            const double a = rng.next_normal();
            const double b = rng.next_normal();
            modes[m] = amp[m] * cdouble(a * inv_sqrt2, b * inv_sqrt2);
            modes[n - m] = std::conj(modes[m]);
        }
        modes[n / 2] = amp[n / 2] * rng.next_normal();

        Fft::backward(modes);
        std::vector<double> screen(n);
        for (std::size_t j = 0; j < n; ++j) screen[j] = modes[j].real();
        stack.screens.push_back(std::move(screen));
    }
    return stack;
}

CovarianceEstimate empirical_screen_covariance(const std::vector<ScreenStack>& stacks,
                                               const std::vector<std::size_t>& lags) {
    if (stacks.size() < 2)
        throw std::invalid_argument("screen covariance: need at least 2 stacks");
    const Grid& grid = stacks.front().grid;
    const std::size_t n_steps = stacks.front().n_steps();
    for (const auto& s : stacks)
        if (!(s.grid == grid) || s.n_steps() != n_steps)
            throw std::invalid_argument("screen covariance: mismatched stacks");

    const std::size_t R = stacks.size();
    const std::size_t n = grid.n;

    // ensemble mean per (step, point)
    std::vector<std::vector<double>> mean(n_steps, std::vector<double>(n, 0.0));
    for (const auto& s : stacks)
        for (std::size_t j = 0; j < n_steps; ++j)
            for (std::size_t i = 0; i < n; ++i) mean[j][i] += s.screens[j][i];
    for (auto& row : mean)
        for (auto& v : row) v /= static_cast<double>(R);

    CovarianceEstimate out;
    const double bias = static_cast<double>(R) / static_cast<double>(R - 1);
    for (std::size_t lag : lags) {
        double sum = 0.0, sumsq = 0.0;
        for (const auto& s : stacks) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n_steps; ++j)
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t i2 = (i + lag) % n;
                    acc += (s.screens[j][i] - mean[j][i]) * (s.screens[j][i2] - mean[j][i2]);
                }
            acc *= bias / static_cast<double>(n_steps * n);
            sum += acc;
            sumsq += acc * acc;
        }
        const double m = sum / static_cast<double>(R);
        const double var = sumsq / static_cast<double>(R) - m * m;
        out.lag.push_back(static_cast<double>(lag) * grid.dx);
        out.value.push_back(m);
        out.stderr.push_back(std::sqrt(std::max(var, 0.0) / static_cast<double>(R)));
    }
    return out;
}

}  // namespace paraxia
