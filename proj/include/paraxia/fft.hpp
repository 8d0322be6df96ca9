#pragma once

#include <complex>
#include <span>
#include <vector>

namespace paraxia {

using cdouble = std::complex<double>;

// Thin wrapper over FFTW double-precision 1D transforms. Plans are cached
// per (size, direction) behind a mutex; execution uses the new-array
// interface and is safe to call concurrently from several threads.
// Convention: forward = exp(-i k x) sum (FFTW_FORWARD), unnormalized.
// backward = exp(+i k x) sum, unnormalized. backward(forward(x)) == n*x.
class Fft {
public:
    static void forward(std::span<cdouble> data);
    static void backward(std::span<cdouble> data);
    // backward transform scaled by 1/n: inverse of forward.
    static void inverse(std::span<cdouble> data);
};

// DFT frequency for mode index m on an n-point grid of spacing dx:
// kappa_m = 2*pi*m'/(n*dx) with m' = m for m < n/2, m - n for m >= n/2.
double dft_frequency(std::size_t index, std::size_t n, double dx);

}  // namespace paraxia
