#pragma once

#include <cstdint>
#include <optional>

#include "cmrf/gibbs.hpp"

namespace cmrf {

// Unique clique decomposition of a full-field energy: V_c(x) is the
// alternating sum of U over sub-assignments of x on c with the reference
// labels elsewhere. The result carries one table per subset of sites
// (values 0 whenever a clique site holds its reference label), and its
// energies reproduce u exactly up to round-off.
// Guards: refuses fields with more sites than the clique-order limit, and
// outputs whose total table size exceeds the pattern limit.
GibbsSpec canonical_potentials(const EnergyTable& u,
                               std::optional<Pattern> reference_labels = std::nullopt,
                               std::optional<int> clique_order_limit = std::nullopt,
                               std::optional<std::uint64_t> table_value_limit = std::nullopt);

inline constexpr double kMinimalCliqueTol = 1e-12;

// The cliques whose tables contain any value of magnitude > tol,
// in canonical (size, lexicographic) order.
CliqueSet minimal_clique_set(const GibbsSpec& g, double tol = kMinimalCliqueTol);

} // namespace cmrf
