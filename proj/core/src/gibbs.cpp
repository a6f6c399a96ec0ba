#include "cmrf/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cmrf/errors.hpp"
#include "cmrf/numerics.hpp"

namespace cmrf {

PotentialTable::PotentialTable(Clique clique, std::vector<double> values, const FieldSpec& spec)
    : clique_(std::move(clique)), values_(std::move(values)) {
    std::sort(clique_.begin(), clique_.end());
    if (std::adjacent_find(clique_.begin(), clique_.end()) != clique_.end()) {
        throw MalformedSpec("potential clique contains a repeated site");
    }
    std::size_t expected = 1;
    clique_alphabets_.reserve(clique_.size());
    for (int s : clique_) {
        if (s < 0 || s >= spec.site_count()) {
            throw MalformedSpec("potential clique site " + std::to_string(s) + " out of range");
        }
        clique_alphabets_.push_back(spec.alphabet_size(s));
        expected *= static_cast<std::size_t>(spec.alphabet_size(s));
    }
    if (values_.size() != expected) {
        throw MalformedSpec("potential table has " + std::to_string(values_.size()) +
                            " values, expected " + std::to_string(expected) +
                            " (one per label assignment on the clique)");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw MalformedSpec("potential table contains a non-finite value");
        }
    }
}

std::size_t PotentialTable::assignment_rank(const Pattern& x) const {
    std::size_t r = 0;
    for (std::size_t k = 0; k < clique_.size(); ++k) {
        r = r * static_cast<std::size_t>(clique_alphabets_[k]) +
            static_cast<std::size_t>(x[static_cast<std::size_t>(clique_[k])]);
    }
    return r;
}

std::vector<Label> PotentialTable::assignment_at(std::size_t rank) const {
    std::vector<Label> labels(clique_.size());
    for (std::size_t k = clique_.size(); k-- > 0;) {
        const auto m = static_cast<std::size_t>(clique_alphabets_[k]);
        labels[k] = static_cast<Label>(rank % m);
        rank /= m;
    }
    return labels;
}

GibbsSpec::GibbsSpec(FieldSpec field, std::vector<PotentialTable> potentials)
    : field_(std::move(field)), potentials_(std::move(potentials)) {
    std::sort(potentials_.begin(), potentials_.end(),
              [](const PotentialTable& a, const PotentialTable& b) {
                  if (a.clique().size() != b.clique().size()) return a.clique().size() < b.clique().size();
                  return a.clique() < b.clique();
              });
    for (std::size_t i = 1; i < potentials_.size(); ++i) {
        if (potentials_[i - 1].clique() == potentials_[i].clique()) {
            throw MalformedSpec("two potential tables share a clique");
        }
    }
    // Re-check each clique against this field (tables may have been built
    // against another spec).
    for (const auto& p : potentials_) {
        for (int s : p.clique()) {
            if (s >= field_.site_count()) {
                throw MalformedSpec("potential clique site " + std::to_string(s) + " out of range");
            }
        }
    }
}

CliqueSet GibbsSpec::clique_set() const {
    std::vector<Clique> cliques;
    cliques.reserve(potentials_.size());
    for (const auto& p : potentials_) cliques.push_back(p.clique());
    return CliqueSet(std::move(cliques), field_.site_count());
}

double energy(const GibbsSpec& g, const Pattern& x) {
    g.field().require_valid(x);
    double u = 0.0;
    for (const auto& p : g.potentials()) u += p.value_for(x);
    return u;
}

EnergyTable energy_table(const GibbsSpec& g, SupportPtr support) {
    if (!support) throw MalformedSpec("energy table: support is null");
    if (!(support->spec() == g.field())) {
        throw MalformedSpec("energy table: support field differs from the Gibbs field");
    }
    std::vector<double> energies;
    energies.reserve(support->size());
    for (std::size_t i = 0; i < support->size(); ++i) {
        double u = 0.0;
        for (const auto& p : g.potentials()) u += p.value_for(support->member(i));
        energies.push_back(u);
    }
    return EnergyTable(std::move(support), std::move(energies));
}

EnergyJointResult joint_from_energy(const EnergyTable& u, const ConstraintSet& cs) {
    const Support& s = u.support();
    std::vector<Pattern> kept;
    std::vector<double> kept_neg_u;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (cs.evaluate(s.member(i))) {
            kept.push_back(s.member(i));
            kept_neg_u.push_back(-u.at(i));
        }
    }
    if (kept.empty()) {
        throw EmptySupport("constraint set removes every pattern the energy table covers");
    }
    SupportPtr support = kept.size() == s.size()
                             ? u.support_ptr()
                             : std::make_shared<Support>(s.spec(), std::move(kept));
    auto joint = JointDistribution::from_log_weights(std::move(support), std::move(kept_neg_u));
    // k = 1 / sum e^{-U}; the joint's normalizer is that sum.
    const double log_k = -joint.log_normalizer();
    return EnergyJointResult{std::move(joint), log_k};
}

EnergyJointResult joint_from_gibbs(const GibbsSpec& g, const ConstraintSet& cs,
                                   std::optional<std::uint64_t> guard_limit) {
    auto support = std::make_shared<Support>(Support::build(g.field(), cs, guard_limit));
    return joint_from_energy(energy_table(g, std::move(support)), ConstraintSet{});
}

double probability_of_constraint(const JointDistribution& full_joint, const ConstraintSet& cs) {
    const Support& s = full_joint.support();
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < full_joint.size(); ++i) {
        m = std::max(m, full_joint.log_prob(i));
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < full_joint.size(); ++i) {
        const double w = std::exp(full_joint.log_prob(i) - m);
        den += w;
        if (cs.evaluate(s.member(i))) num += w;
    }
    return num / den;
}

std::vector<double> local_conditional_from_grf(const GibbsSpec& g, const ConstraintSet& cs,
                                               int l, const Pattern& boundary) {
    const FieldSpec& spec = g.field();
    if (l < 0 || l >= spec.site_count()) {
        throw MalformedSpec("site index " + std::to_string(l) + " out of range");
    }
    if (boundary.size() != static_cast<std::size_t>(spec.site_count())) {
        throw MalformedSpec("boundary pattern has wrong arity");
    }
    for (int s = 0; s < spec.site_count(); ++s) {
        if (s == l) continue;
        const Label v = boundary[static_cast<std::size_t>(s)];
        if (v < 0 || v >= spec.alphabet_size(s)) {
            throw MalformedSpec("boundary label out of range at site " + std::to_string(s));
        }
    }

    const int m_l = spec.alphabet_size(l);
    Pattern x = boundary;
    std::vector<double> log_w(static_cast<std::size_t>(m_l),
                              -std::numeric_limits<double>::infinity());
    std::vector<double> finite;
    for (Label v = 0; v < m_l; ++v) {
        x[static_cast<std::size_t>(l)] = v;
        if (!cs.evaluate(x)) continue;
        double u = 0.0;
        for (const auto& p : g.potentials()) {
            if (std::binary_search(p.clique().begin(), p.clique().end(), l)) {
                u += p.value_for(x);
            }
        }
        log_w[static_cast<std::size_t>(v)] = -u;
        finite.push_back(-u);
    }
    if (finite.empty()) {
        throw BoundaryNotExtendable("no label at site " + std::to_string(l) +
                                    " completes the boundary inside the constraint set");
    }
    const double lz = log_sum_exp(finite);
    std::vector<double> probs(static_cast<std::size_t>(m_l), 0.0);
    for (Label v = 0; v < m_l; ++v) {
        const double lw = log_w[static_cast<std::size_t>(v)];
        if (std::isfinite(lw)) probs[static_cast<std::size_t>(v)] = std::exp(lw - lz);
    }
    return probs;
}

} // namespace cmrf
