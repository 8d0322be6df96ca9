#pragma once

#include <cstdint>
#include <vector>

#include "paraxia/medium.hpp"

namespace paraxia {

// Periodic transverse grid (d = 1). n must be a power of two.
struct Grid {
    std::size_t n = 0;
    double dx = 0.0;

    Grid() = default;
    Grid(std::size_t n_, double dx_);

    double width() const { return static_cast<double>(n) * dx; }
    double x(std::size_t j) const;      // centred coordinates: (j - n/2) * dx
    double kappa(std::size_t m) const;  // DFT frequency of mode m
    bool operator==(const Grid&) const = default;

    // dx <= l_x/4 so the medium spectrum is resolved
    void check_resolves(const MediumSpec& spec) const;
};

// One realization of the Brownian-increment phase screens:
// screens[j][i] ~ B((j+1)dz, x_i) - B(j dz, x_i), independent across j,
// with E[screen(x) screen(x')] = dz * C0(x - x').
struct ScreenStack {
    Grid grid;
    double dz = 0.0;
    std::uint64_t stream_id = 0;
    std::vector<std::vector<double>> screens;

    std::size_t n_steps() const { return screens.size(); }
};

// Spectral synthesis: Hermitian circular Gaussian noise on the frequency
// lattice, mode m scaled by sqrt(dz * C0hat(kappa_m) / width), inverse DFT.
ScreenStack synthesize_screens(const MediumSpec& spec, const Grid& grid, std::size_t n_steps,
                               double dz, std::uint64_t master_seed, std::uint64_t stream_id);

struct CovarianceEstimate {
    std::vector<double> lag;
    std::vector<double> value;
    std::vector<double> stderr;
};

// Unbiased sample covariance of screen values across realizations at the
// requested lags (in grid-spacing units), averaged over base points.
CovarianceEstimate empirical_screen_covariance(const std::vector<ScreenStack>& stacks,
                                               const std::vector<std::size_t>& lags);

}  // namespace paraxia
