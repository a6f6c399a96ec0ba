#pragma once

#include <optional>
#include <utility>

#include "cmrf/decomposition.hpp"
#include "cmrf/markov.hpp"

namespace cmrf {

struct LocalizationWitness {
    int site = 0;
    Pattern boundary; // a support member realizing the boundary
    Label label = 0;
    double table_value = 0.0; // from the clique-local computation
    double joint_value = 0.0; // from exhaustive conditioning
};

// Both directions of the GRF -> MRF reading: the unconstrained joint is
// Markov for the neighborhood induced by the nonzero cliques, and the
// clique-local conditionals match exhaustive conditioning of the
// constrained joint on every realized boundary.
struct GrfToMrfReport {
    bool pass = false;
    NeighborhoodSystem eta;
    MarkovianityReport markovianity;
    double worst_localization_deviation = 0.0;
    std::optional<LocalizationWitness> localization_witness;
};

GrfToMrfReport verify_grf_to_mrf(const GibbsSpec& g, const ConstraintSet& cs, double tol,
                                 std::optional<NeighborhoodSystem> eta_override = std::nullopt);

// Reconstruction from conditionals, then the energy form rebuilt from the
// reconstructed joint must reproduce it.
struct MrfToGrfReport {
    bool pass = false;
    ReconstructionResult reconstruction;
    double worst_rebuild_deviation = 0.0; // max abs probability difference
    std::optional<double> log_k;          // normalizer of the rebuilt Gibbs form
};

MrfToGrfReport verify_mrf_to_grf(const LocalConditionalTable& t, SupportPtr s, double tol);

// In-C pairwise probability ratios are unchanged by conditioning on C.
struct RatioInvarianceReport {
    bool pass = false;
    double worst_relative_error = 0.0;
    std::optional<std::pair<Pattern, Pattern>> witness;
};

RatioInvarianceReport verify_ratio_invariance(const JointDistribution& full,
                                              const ConstraintSet& cs, double tol);

// Exhibits the energy/normalizer form of a strictly positive joint and
// confirms the rebuilt distribution matches.
struct PositivityGibbsFormReport {
    bool pass = false;
    double worst_deviation = 0.0;
    EnergyTable energies;
    double log_k = 0.0;
};

PositivityGibbsFormReport verify_positivity_gibbs_form(const JointDistribution& d, double tol);

} // namespace cmrf
