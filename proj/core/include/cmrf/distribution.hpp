#pragma once

#include <cstddef>
#include <vector>

#include "cmrf/constraints.hpp"

namespace cmrf {

// A probability distribution over a support, stored in log-space.
// Every member carries strictly positive probability; zero-probability
// outcomes are represented by absence from the support.
class JointDistribution {
public:
    // Normalizes arbitrary finite log-weights. log_normalizer() reports the
    // log of the total weight the inputs carried.
    static JointDistribution from_log_weights(SupportPtr support, std::vector<double> log_weights);

    // Normalizes strictly positive weights (not required to sum to 1).
    static JointDistribution from_probabilities(SupportPtr support, const std::vector<double>& probs);

    const Support& support() const { return *support_; }
    const SupportPtr& support_ptr() const { return support_; }
    std::size_t size() const { return log_probs_.size(); }

    double log_prob(std::size_t i) const { return log_probs_[i]; }
    const std::vector<double>& log_probs() const { return log_probs_; }
    double prob(std::size_t i) const;
    std::vector<double> probabilities() const;

    // ln of the pre-normalization total weight.
    double log_normalizer() const { return log_normalizer_; }

private:
    JointDistribution(SupportPtr support, std::vector<double> log_probs, double log_normalizer);

    SupportPtr support_;
    std::vector<double> log_probs_;
    double log_normalizer_;
};

// Log-ratios ln(p_j / p_ref) for every support index j, relative to a
// fixed reference member. The reference entry is exactly 0.
class RatioTable {
public:
    RatioTable(SupportPtr support, std::size_t reference_index, std::vector<double> log_ratios);

    // Plain ratios p_j / p_ref; the reference entry must be exactly 1.
    static RatioTable from_ratios(SupportPtr support, std::size_t reference_index,
                                  const std::vector<double>& ratios);

    static RatioTable from_joint(const JointDistribution& d, std::size_t reference_index);

    const Support& support() const { return *support_; }
    const SupportPtr& support_ptr() const { return support_; }
    std::size_t size() const { return log_ratios_.size(); }
    std::size_t reference_index() const { return reference_index_; }
    double log_ratio(std::size_t j) const { return log_ratios_[j]; }
    const std::vector<double>& log_ratios() const { return log_ratios_; }

private:
    SupportPtr support_;
    std::size_t reference_index_;
    std::vector<double> log_ratios_;
};

// Finite energies, one per support member. When the support covers the
// whole field this is a full-domain energy.
class EnergyTable {
public:
    EnergyTable(SupportPtr support, std::vector<double> energies);

    const Support& support() const { return *support_; }
    const SupportPtr& support_ptr() const { return support_; }
    std::size_t size() const { return energies_.size(); }
    double at(std::size_t support_index) const { return energies_[support_index]; }
    const std::vector<double>& energies() const { return energies_; }
    bool covers_full_space() const { return support_->covers_full_space(); }

private:
    SupportPtr support_;
    std::vector<double> energies_;
};

// p_j = r_{ref,j} / sum_k r_{ref,k}, computed in log-space.
JointDistribution probabilities_from_ratios(const RatioTable& rt);

// Restriction to the patterns satisfying cs, rescaled by 1/P(C).
// Members failing cs are dropped; throws EmptySupport when none remain.
JointDistribution conditional_restrict(const JointDistribution& full, const ConstraintSet& cs);

// p_j / p_i as exp(log_probs[j] - log_probs[i]).
double ratio(const JointDistribution& d, std::size_t i, std::size_t j);

// U(X) = log P(X_0) - log P(X), gauged so the first support member has
// energy exactly 0. Feeding the result to joint_from_energy recovers d.
EnergyTable energy_from_joint(const JointDistribution& d);

} // namespace cmrf
