#pragma once

#include <cstdint>

namespace cmrf::guard {

// Global limits for operations that materialize pattern spaces or
// per-clique tables. Every guarded operation also accepts an explicit
// per-call override. Values are process-wide and atomic.

inline constexpr std::uint64_t kDefaultPatternLimit = std::uint64_t{1} << 24;
inline constexpr int kDefaultCliqueOrderLimit = 20;

std::uint64_t pattern_limit();
void set_pattern_limit(std::uint64_t limit);

int clique_order_limit();
void set_clique_order_limit(int limit);

} // namespace cmrf::guard
