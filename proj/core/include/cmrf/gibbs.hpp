#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cmrf/distribution.hpp"

namespace cmrf {

// V_c as a complete table: one finite value per label assignment on the
// clique's sites. The empty clique has exactly one value (a constant).
class PotentialTable {
public:
    PotentialTable(Clique clique, std::vector<double> values, const FieldSpec& spec);

    const Clique& clique() const { return clique_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t assignment_count() const { return values_.size(); }

    // Mixed-radix rank of x's labels on the clique sites, in clique order.
    std::size_t assignment_rank(const Pattern& x) const;
    // Inverse of assignment_rank: the labels on the clique sites.
    std::vector<Label> assignment_at(std::size_t rank) const;

    double value_for(const Pattern& x) const { return values_[assignment_rank(x)]; }

private:
    Clique clique_;
    std::vector<int> clique_alphabets_;
    std::vector<double> values_;
};

// A field together with one potential table per clique of a clique set.
class GibbsSpec {
public:
    GibbsSpec(FieldSpec field, std::vector<PotentialTable> potentials);

    const FieldSpec& field() const { return field_; }
    const std::vector<PotentialTable>& potentials() const { return potentials_; }
    CliqueSet clique_set() const;

private:
    FieldSpec field_;
    std::vector<PotentialTable> potentials_; // canonical clique order
};

// U(x) = sum of V_c over all cliques.
double energy(const GibbsSpec& g, const Pattern& x);

// U evaluated on every member of a support over the same field.
EnergyTable energy_table(const GibbsSpec& g, SupportPtr support);

struct EnergyJointResult {
    JointDistribution joint;
    double log_k; // ln k with k = 1 / sum_{X in C} e^{-U(X)}
};

// P(X|C) = k e^{-U(X)} over the members of u's support that satisfy cs.
EnergyJointResult joint_from_energy(const EnergyTable& u, const ConstraintSet& cs);

// Builds the constrained support (guard-checked), evaluates energies, and
// normalizes. Convenience composition of the two steps above.
EnergyJointResult joint_from_gibbs(const GibbsSpec& g, const ConstraintSet& cs,
                                   std::optional<std::uint64_t> guard_limit = std::nullopt);

// P(C) = sum of full_joint's mass on the patterns satisfying cs. Computed
// as a ratio of shared-shift sums so that counting measures stay exact.
double probability_of_constraint(const JointDistribution& full_joint, const ConstraintSet& cs);

// Distribution over labels at site l given the other sites' values.
// boundary is a full pattern whose value at l is ignored. Inadmissible
// labels get probability 0; only the cliques containing l are evaluated.
std::vector<double> local_conditional_from_grf(const GibbsSpec& g, const ConstraintSet& cs,
                                               int l, const Pattern& boundary);

} // namespace cmrf
