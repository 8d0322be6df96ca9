#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace paraxia {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre rule of given order (cached).
const GaussRule& gauss_legendre(std::size_t order);

// integral of f over [a, b] with a composite Gauss-Legendre rule
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::size_t panels = 16, std::size_t order = 8);

}  // namespace paraxia
