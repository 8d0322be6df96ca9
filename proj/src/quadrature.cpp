#include "paraxia/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace paraxia {

namespace {

GaussRule compute_rule(std::size_t order) {
    // Newton iteration on Legendre polynomials
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const std::size_t m = (order + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(order) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t order) {
    if (order == 0) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    static std::map<std::size_t, GaussRule> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, std::size_t panels,
                 std::size_t order) {
    const GaussRule& rule = gauss_legendre(order);
    const double h = (b - a) / static_cast<double>(panels);
    double total = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + h * static_cast<double>(p);
        const double mid = lo + 0.5 * h;
        for (std::size_t i = 0; i < order; ++i)
            total += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    }
    return total * 0.5 * h;
}

}  // namespace paraxia
