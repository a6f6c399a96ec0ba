#include "cmrf/guard.hpp"

#include <atomic>

namespace cmrf::guard {

namespace {
std::atomic<std::uint64_t> g_pattern_limit{kDefaultPatternLimit};
std::atomic<int> g_clique_order_limit{kDefaultCliqueOrderLimit};
} // namespace

std::uint64_t pattern_limit() { return g_pattern_limit.load(); }
void set_pattern_limit(std::uint64_t limit) { g_pattern_limit.store(limit); }

int clique_order_limit() { return g_clique_order_limit.load(); }
void set_clique_order_limit(int limit) { g_clique_order_limit.store(limit); }

} // namespace cmrf::guard
