#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "cmrf/gibbs.hpp"

namespace cmrf {

// All sampling randomness comes from std::mt19937_64 seeded directly with
// the user seed; variates are (word >> 11) * 2^-53, a uniform double in
// [0, 1). No std::*_distribution is used, so streams are identical across
// standard library implementations.
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

// n independent draws by inverse CDF over the support, in support order.
std::vector<Pattern> exact_sample(const JointDistribution& d, std::uint64_t seed, std::size_t n);

struct GibbsRunResult {
    std::vector<Pattern> samples; // one per post-burn-in sweep
    bool non_ergodic = false;     // flip graph of the support is disconnected
    int component_count = 1;
};

// Systematic-scan heat bath: each sweep updates sites 0..n-1 in order,
// drawing from local_conditional_from_grf. Every emitted pattern satisfies
// cs. sweeps counts all sweeps; the first burn_in are discarded.
GibbsRunResult gibbs_run(const GibbsSpec& g, const ConstraintSet& cs, const Pattern& init,
                         std::uint64_t seed, std::size_t sweeps, std::size_t burn_in,
                         std::optional<std::uint64_t> guard_limit = std::nullopt);

} // namespace cmrf
