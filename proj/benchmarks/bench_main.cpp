// Microbenchmarks for the enumeration-bound operations. The chain model
// with adjacent ones forbidden keeps support sizes sub-exponential, so the
// site-count arguments below stay well inside the pattern guard.

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "cmrf/constraints.hpp"
#include "cmrf/decomposition.hpp"
#include "cmrf/distribution.hpp"
#include "cmrf/gibbs.hpp"
#include "cmrf/markov.hpp"
#include "cmrf/numerics.hpp"
#include "cmrf/sampler.hpp"

namespace {

using namespace cmrf;

FieldSpec binary_field(int n) { return FieldSpec(std::vector<int>(static_cast<std::size_t>(n), 2)); }

ConstraintSet no_adjacent_ones(const FieldSpec& spec) {
    std::vector<Constraint> parts;
    for (int l = 0; l + 1 < spec.site_count(); ++l) {
        parts.push_back(ForbiddenWindow{{l, l + 1}, {1, 1}});
    }
    return ConstraintSet(std::move(parts), spec);
}

GibbsSpec chain_potentials(const FieldSpec& spec) {
    std::vector<PotentialTable> pots;
    for (int l = 0; l + 1 < spec.site_count(); ++l) {
        pots.emplace_back(Clique{l, l + 1}, std::vector<double>{0.3, -0.5, 0.8, 1.2}, spec);
    }
    return GibbsSpec(spec, std::move(pots));
}

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = (static_cast<double>(eng() >> 11) * 0x1.0p-53) * 8.0 - 4.0;
    return v;
}

void BM_support_build(benchmark::State& state) {
    const FieldSpec spec = binary_field(static_cast<int>(state.range(0)));
    const ConstraintSet cs = no_adjacent_ones(spec);
    for (auto _ : state) {
        Support s = Support::build(spec, cs);
        benchmark::DoNotOptimize(s);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(spec.pattern_count()));
}
BENCHMARK(BM_support_build)->Arg(12)->Arg(16)->Arg(20);

void BM_flip_graph(benchmark::State& state) {
    const FieldSpec spec = binary_field(static_cast<int>(state.range(0)));
    const Support s = Support::build(spec, no_adjacent_ones(spec));
    for (auto _ : state) {
        FlipGraph fg = flip_graph(s);
        benchmark::DoNotOptimize(fg);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_flip_graph)->Arg(12)->Arg(16)->Arg(20);

void BM_joint_from_gibbs(benchmark::State& state) {
    const FieldSpec spec = binary_field(static_cast<int>(state.range(0)));
    const GibbsSpec g = chain_potentials(spec);
    const ConstraintSet cs = no_adjacent_ones(spec);
    for (auto _ : state) {
        EnergyJointResult r = joint_from_gibbs(g, cs);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_joint_from_gibbs)->Arg(12)->Arg(16)->Arg(20);

void BM_local_conditionals(benchmark::State& state) {
    const FieldSpec spec = binary_field(static_cast<int>(state.range(0)));
    const GibbsSpec g = chain_potentials(spec);
    const ConstraintSet cs = no_adjacent_ones(spec);
    const JointDistribution d = joint_from_gibbs(g, cs).joint;
    for (auto _ : state) {
        LocalConditionalTable t = local_conditionals_from_joint(d, std::nullopt, cs);
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(BM_local_conditionals)->Arg(10)->Arg(14);

void BM_joint_from_conditionals(benchmark::State& state) {
    const FieldSpec spec = binary_field(static_cast<int>(state.range(0)));
    const GibbsSpec g = chain_potentials(spec);
    const ConstraintSet cs = no_adjacent_ones(spec);
    const JointDistribution d = joint_from_gibbs(g, cs).joint;
    const LocalConditionalTable t = local_conditionals_from_joint(d, std::nullopt, cs);
    for (auto _ : state) {
        ReconstructionResult r = joint_from_local_conditionals(t, d.support_ptr());
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_joint_from_conditionals)->Arg(10)->Arg(14);

void BM_canonical_potentials(benchmark::State& state) {
    const FieldSpec spec = binary_field(static_cast<int>(state.range(0)));
    const auto sup = std::make_shared<Support>(Support::full(spec));
    const EnergyTable u(sup, random_values(sup->size(), 7));
    for (auto _ : state) {
        GibbsSpec g = canonical_potentials(u);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_canonical_potentials)->Arg(8)->Arg(10)->Arg(12);

void BM_gibbs_sweeps(benchmark::State& state) {
    const FieldSpec spec = binary_field(static_cast<int>(state.range(0)));
    const GibbsSpec g = chain_potentials(spec);
    const ConstraintSet cs = no_adjacent_ones(spec);
    const Pattern init(static_cast<std::size_t>(spec.site_count()), 0);
    const std::size_t sweeps = 256;
    for (auto _ : state) {
        GibbsRunResult r = gibbs_run(g, cs, init, 17, sweeps, 0);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(sweeps) *
                            spec.site_count());
}
BENCHMARK(BM_gibbs_sweeps)->Arg(8)->Arg(16);

void BM_exact_sample(benchmark::State& state) {
    const FieldSpec spec = binary_field(16);
    const GibbsSpec g = chain_potentials(spec);
    const JointDistribution d = joint_from_gibbs(g, no_adjacent_ones(spec)).joint;
    const std::size_t draws = 4096;
    for (auto _ : state) {
        std::vector<Pattern> xs = exact_sample(d, 17, draws);
        benchmark::DoNotOptimize(xs);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(draws));
}
BENCHMARK(BM_exact_sample);

void BM_log_sum_exp(benchmark::State& state) {
    const std::vector<double> xs = random_values(4096, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_sum_exp(xs));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_log_sum_exp);

} // namespace

BENCHMARK_MAIN();
