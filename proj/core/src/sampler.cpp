#include "cmrf/sampler.hpp"

#include <algorithm>
#include <string>

#include "cmrf/errors.hpp"
#include "cmrf/numerics.hpp"

namespace cmrf {

std::vector<Pattern> exact_sample(const JointDistribution& d, std::uint64_t seed, std::size_t n) {
    const std::vector<double> cdf = shifted_exp_prefix_sums(d.log_probs());
    const double total = cdf.back();
    SampleRng rng(seed);
    std::vector<Pattern> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = rng.uniform01() * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it; // u rounded up to the total mass
        out.push_back(d.support().member(static_cast<std::size_t>(it - cdf.begin())));
    }
    return out;
}

GibbsRunResult gibbs_run(const GibbsSpec& g, const ConstraintSet& cs, const Pattern& init,
                         std::uint64_t seed, std::size_t sweeps, std::size_t burn_in,
                         std::optional<std::uint64_t> guard_limit) {
    const FieldSpec& spec = g.field();
    spec.require_valid(init);
    if (!cs.evaluate(init)) {
        throw ConstraintViolatedInit("initial pattern violates the constraint set");
    }
    if (sweeps < burn_in) {
        throw MalformedSpec("sweeps (" + std::to_string(sweeps) + ") must be >= burn_in (" +
                            std::to_string(burn_in) + ")");
    }

    GibbsRunResult result;
    {
        const Support support = Support::build(spec, cs, guard_limit);
        const FlipGraph fg = flip_graph(support);
        result.component_count = fg.component_count;
        result.non_ergodic = fg.component_count > 1;
    }

    SampleRng rng(seed);
    const int n = spec.site_count();
    Pattern state = init;
    result.samples.reserve(sweeps - burn_in);
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
        for (int l = 0; l < n; ++l) {
            const std::vector<double> probs = local_conditional_from_grf(g, cs, l, state);
            const double u = rng.uniform01();
            double acc = 0.0;
            Label chosen = -1;
            for (Label v = 0; v < spec.alphabet_size(l); ++v) {
                const double p = probs[static_cast<std::size_t>(v)];
                if (p <= 0.0) continue;
                acc += p;
                chosen = v;
                if (u < acc) break;
            }
            // acc may fall a rounding error short of 1; the last admissible
            // label absorbs the remainder.
            state[static_cast<std::size_t>(l)] = chosen;
        }
        if (sweep >= burn_in) result.samples.push_back(state);
    }
    return result;
}

} // namespace cmrf
