#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "cmrf/distribution.hpp"

namespace cmrf {

// How LocalConditionalTable keys its off-site configurations.
enum class ConditionalKeying {
    FullComplement, // by the labels of all sites other than l (canonical)
    Neighborhood,   // by the labels of the declared eta_l only
};

// Per-site conditional distributions P(x_l = v | off-site labels), keyed
// by a mixed-radix rank over the key sites in ascending order. Zeros mark
// constraint-inadmissible labels.
class LocalConditionalTable {
public:
    using SiteEntries = std::map<std::uint64_t, std::vector<double>>;

    LocalConditionalTable(FieldSpec spec, ConstraintSet cs, NeighborhoodSystem eta,
                          ConditionalKeying keying, std::vector<SiteEntries> entries);

    const FieldSpec& field() const { return spec_; }
    const ConstraintSet& constraint_set() const { return cs_; }
    const NeighborhoodSystem& eta() const { return eta_; }
    ConditionalKeying keying() const { return keying_; }
    const std::vector<SiteEntries>& entries() const { return entries_; }

    // The sites whose labels form the key at site l, ascending.
    const std::vector<int>& key_sites(int l) const { return key_sites_[static_cast<std::size_t>(l)]; }

    // Mixed-radix rank of x's labels on the given key sites.
    static std::uint64_t boundary_key(const FieldSpec& spec, const std::vector<int>& key_sites,
                                      const Pattern& x);

    // The distribution at (l, x's boundary), or nullptr when absent.
    const std::vector<double>* find(int l, const Pattern& x) const;

private:
    FieldSpec spec_;
    ConstraintSet cs_;
    NeighborhoodSystem eta_;
    ConditionalKeying keying_;
    std::vector<std::vector<int>> key_sites_;
    std::vector<SiteEntries> entries_;
};

// Extracts P(x_l = v | key-site labels) from a joint by aggregation over
// the support. With eta absent the keying is by full complement (exact
// single-pattern conditioning); with eta given, by the neighborhood.
LocalConditionalTable local_conditionals_from_joint(const JointDistribution& d,
                                                    std::optional<NeighborhoodSystem> eta = std::nullopt,
                                                    ConstraintSet cs = {});

struct MarkovianityWitness {
    int site = 0;
    // Two support patterns agreeing on eta_site but with different
    // full-complement conditionals at `site`.
    Pattern pattern_a;
    Pattern pattern_b;
    Label label = 0;
    double deviation = 0.0;
};

struct MarkovianityReport {
    bool pass = true;
    double worst_deviation = 0.0;
    std::optional<MarkovianityWitness> witness;
};

// Checks that the full-complement conditional at each site depends on the
// off-site labels only through eta. Failure is a report, not an error.
MarkovianityReport check_markovianity(const JointDistribution& d, const NeighborhoodSystem& eta,
                                      double tol);

struct NonIdentifiable {
    int component_count = 0;
    // Support indices per flip-graph component, ordered by smallest member.
    std::vector<std::vector<std::size_t>> components;
};

struct InconsistentConditionals {
    double worst_residual = 0.0;
    // Closed walk of support indices whose log-ratio sum misses zero.
    std::vector<std::size_t> witness_cycle;
};

using ReconstructionResult = std::variant<JointDistribution, NonIdentifiable, InconsistentConditionals>;

inline constexpr double kCycleConsistencyTol = 1e-9;

// Rebuilds the joint over s from single-site conditional ratios along a
// breadth-first spanning forest of the flip graph. Non-forest edges are
// checked for cycle consistency. A disconnected flip graph yields
// NonIdentifiable unless component_masses (one positive mass per
// component, summing to 1) fixes the cross-component scale.
ReconstructionResult joint_from_local_conditionals(
    const LocalConditionalTable& t, SupportPtr s,
    std::optional<std::vector<double>> component_masses = std::nullopt,
    double cycle_tol = kCycleConsistencyTol);

} // namespace cmrf
