#pragma once

#include <span>
#include <vector>

namespace cmrf {

// log(sum_i exp(x_i)) with max-shift. Empty input -> -inf.
double log_sum_exp(std::span<const double> xs);

// Inclusive prefix sums of exp(x_i - max(xs)); shared shift makes the
// result usable as an unnormalized CDF. Returns the shifted weights' sums.
std::vector<double> shifted_exp_prefix_sums(std::span<const double> xs);

} // namespace cmrf
