#include "paraxia/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace paraxia {

namespace {

std::mutex plan_mutex;

fftw_plan get_plan(std::size_t n, int sign) {
    static std::map<std::pair<std::size_t, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    // Plan on scratch storage; FFTW_ESTIMATE keeps planning deterministic
    // and does not touch the input array.
    std::vector<cdouble> scratch(n);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), p, p, sign, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("fftw: plan creation failed");
    cache.emplace(key, plan);
    return plan;
}

}  // namespace

void Fft::forward(std::span<cdouble> data) {
    fftw_plan plan = get_plan(data.size(), FFTW_FORWARD);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

void Fft::backward(std::span<cdouble> data) {
    fftw_plan plan = get_plan(data.size(), FFTW_BACKWARD);
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
}

void Fft::inverse(std::span<cdouble> data) {
    backward(data);
    const double scale = 1.0 / static_cast<double>(data.size());
    for (auto& v : data) v *= scale;
}

double dft_frequency(std::size_t index, std::size_t n, double dx) {
    const auto half = n / 2;
    const double m = index < half ? static_cast<double>(index)
                                  : static_cast<double>(index) - static_cast<double>(n);
    return 2.0 * std::numbers::pi * m / (static_cast<double>(n) * dx);
}

}  // namespace paraxia
