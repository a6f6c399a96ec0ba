#include "cmrf/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cmrf {

double log_sum_exp(std::span<const double> xs) {
    if (xs.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(xs.begin(), xs.end());
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - m);
    return m + std::log(acc);
}

std::vector<double> shifted_exp_prefix_sums(std::span<const double> xs) {
    std::vector<double> sums;
    sums.reserve(xs.size());
    if (xs.empty()) return sums;
    const double m = *std::max_element(xs.begin(), xs.end());
    double acc = 0.0;
    for (double x : xs) {
        acc += std::exp(x - m);
        sums.push_back(acc);
    }
    return sums;
}

} // namespace cmrf
