#include "cmrf/checker.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "cmrf/numerics.hpp"

namespace cmrf {

GrfToMrfReport verify_grf_to_mrf(const GibbsSpec& g, const ConstraintSet& cs, double tol,
                                 std::optional<NeighborhoodSystem> eta_override) {
    const FieldSpec& spec = g.field();
    const int n = spec.site_count();

    auto full_support = std::make_shared<Support>(Support::full(spec));
    const EnergyTable u = energy_table(g, full_support);
    const JointDistribution unconstrained = joint_from_energy(u, ConstraintSet{}).joint;

    NeighborhoodSystem eta = eta_override
                                 ? std::move(*eta_override)
                                 : neighborhood_from_cliques(minimal_clique_set(g), n);
    MarkovianityReport markov = check_markovianity(unconstrained, eta, tol);

    GrfToMrfReport report{false, std::move(eta), std::move(markov), 0.0, std::nullopt};

    // Clique-local conditionals against exhaustive conditioning of the
    // constrained joint, on every boundary the support realizes.
    const JointDistribution constrained = joint_from_energy(u, cs).joint;
    const Support& s = constrained.support();
    std::vector<int> complement;
    for (int l = 0; l < n; ++l) {
        complement.clear();
        for (int site = 0; site < n; ++site) {
            if (site != l) complement.push_back(site);
        }
        const auto m = static_cast<std::size_t>(spec.alphabet_size(l));
        struct Group {
            std::vector<double> lp;
            std::size_t representative = 0;
        };
        std::map<std::uint64_t, Group> groups;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const std::uint64_t key =
                LocalConditionalTable::boundary_key(spec, complement, s.member(i));
            auto [it, inserted] = groups.try_emplace(key);
            if (inserted) {
                it->second.lp.assign(m, std::numeric_limits<double>::quiet_NaN());
                it->second.representative = i;
            }
            it->second.lp[static_cast<std::size_t>(
                s.member(i)[static_cast<std::size_t>(l)])] = constrained.log_prob(i);
        }
        for (const auto& [key, group] : groups) {
            std::vector<double> present;
            for (double lp : group.lp) {
                if (!std::isnan(lp)) present.push_back(lp);
            }
            const double denom = log_sum_exp(present);
            const Pattern& boundary = s.member(group.representative);
            const std::vector<double> local = local_conditional_from_grf(g, cs, l, boundary);
            for (std::size_t v = 0; v < m; ++v) {
                const double joint_p = std::isnan(group.lp[v]) ? 0.0 : std::exp(group.lp[v] - denom);
                const double dev = std::abs(local[v] - joint_p);
                if (dev > report.worst_localization_deviation) {
                    report.worst_localization_deviation = dev;
                    report.localization_witness = LocalizationWitness{
                        l, boundary, static_cast<Label>(v), local[v], joint_p};
                }
            }
        }
    }

    report.pass = report.markovianity.pass && report.worst_localization_deviation <= tol;
    return report;
}

MrfToGrfReport verify_mrf_to_grf(const LocalConditionalTable& t, SupportPtr s, double tol) {
    ReconstructionResult rec = joint_from_local_conditionals(t, std::move(s));
    if (!std::holds_alternative<JointDistribution>(rec)) {
        return MrfToGrfReport{false, std::move(rec), 0.0, std::nullopt};
    }
    const JointDistribution& d = std::get<JointDistribution>(rec);
    const EnergyJointResult rebuilt = joint_from_energy(energy_from_joint(d), ConstraintSet{});
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        worst = std::max(worst, std::abs(d.prob(i) - rebuilt.joint.prob(i)));
    }
    const bool pass = worst <= tol;
    return MrfToGrfReport{pass, std::move(rec), worst, rebuilt.log_k};
}

RatioInvarianceReport verify_ratio_invariance(const JointDistribution& full,
                                              const ConstraintSet& cs, double tol) {
    const JointDistribution restricted = conditional_restrict(full, cs);
    const Support& rs = restricted.support();
    std::vector<std::size_t> full_index(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        full_index[i] = *full.support().index_of_rank(rs.rank(i));
    }
    RatioInvarianceReport report;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        for (std::size_t j = i + 1; j < rs.size(); ++j) {
            const double r_restricted = std::exp(restricted.log_prob(j) - restricted.log_prob(i));
            const double r_full = std::exp(full.log_prob(full_index[j]) - full.log_prob(full_index[i]));
            const double rel = std::abs(r_restricted - r_full) / r_full;
            if (rel > report.worst_relative_error) {
                report.worst_relative_error = rel;
                report.witness = std::make_pair(rs.member(i), rs.member(j));
            }
        }
    }
    report.pass = report.worst_relative_error <= tol;
    return report;
}

PositivityGibbsFormReport verify_positivity_gibbs_form(const JointDistribution& d, double tol) {
    EnergyTable u = energy_from_joint(d);
    const EnergyJointResult rebuilt = joint_from_energy(u, ConstraintSet{});
    double worst = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        worst = std::max(worst, std::abs(d.prob(i) - rebuilt.joint.prob(i)));
    }
    return PositivityGibbsFormReport{worst <= tol, worst, std::move(u), rebuilt.log_k};
}

} // namespace cmrf
