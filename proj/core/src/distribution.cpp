#include "cmrf/distribution.hpp"

#include <cmath>
#include <string>

#include "cmrf/errors.hpp"
#include "cmrf/numerics.hpp"

namespace cmrf {

namespace {

void require_support(const SupportPtr& support, std::size_t values, const char* what) {
    if (!support) {
        throw MalformedSpec(std::string(what) + ": support is null");
    }
    if (support->size() != values) {
        throw MalformedSpec(std::string(what) + ": " + std::to_string(values) +
                            " values for a support of size " + std::to_string(support->size()));
    }
}

void require_finite(const std::vector<double>& xs, const char* what) {
    for (double x : xs) {
        if (!std::isfinite(x)) {
            throw MalformedSpec(std::string(what) + " contains a non-finite value");
        }
    }
}

} // namespace

JointDistribution::JointDistribution(SupportPtr support, std::vector<double> log_probs,
                                     double log_normalizer)
    : support_(std::move(support)),
      log_probs_(std::move(log_probs)),
      log_normalizer_(log_normalizer) {}

JointDistribution JointDistribution::from_log_weights(SupportPtr support,
                                                      std::vector<double> log_weights) {
    require_support(support, log_weights.size(), "joint distribution");
    require_finite(log_weights, "joint log-weights");
    const double lz = log_sum_exp(log_weights);
    for (double& lw : log_weights) lw -= lz;
    return JointDistribution(std::move(support), std::move(log_weights), lz);
}

JointDistribution JointDistribution::from_probabilities(SupportPtr support,
                                                        const std::vector<double>& probs) {
    std::vector<double> log_weights;
    log_weights.reserve(probs.size());
    for (double p : probs) {
        if (!(p > 0.0) || !std::isfinite(p)) {
            throw MalformedSpec("probabilities must be strictly positive and finite on the support");
        }
        log_weights.push_back(std::log(p));
    }
    return from_log_weights(std::move(support), std::move(log_weights));
}

double JointDistribution::prob(std::size_t i) const { return std::exp(log_probs_[i]); }

std::vector<double> JointDistribution::probabilities() const {
    std::vector<double> out;
    out.reserve(log_probs_.size());
    for (double lp : log_probs_) out.push_back(std::exp(lp));
    return out;
}

RatioTable::RatioTable(SupportPtr support, std::size_t reference_index,
                       std::vector<double> log_ratios)
    : support_(std::move(support)),
      reference_index_(reference_index),
      log_ratios_(std::move(log_ratios)) {
    require_support(support_, log_ratios_.size(), "ratio table");
    if (reference_index_ >= log_ratios_.size()) {
        throw MalformedSpec("ratio table reference index out of range");
    }
    require_finite(log_ratios_, "ratio table");
    if (log_ratios_[reference_index_] != 0.0) {
        throw MalformedSpec("ratio table reference entry must be exactly 1 (log 0)");
    }
}

RatioTable RatioTable::from_ratios(SupportPtr support, std::size_t reference_index,
                                   const std::vector<double>& ratios) {
    if (reference_index >= ratios.size()) {
        throw MalformedSpec("ratio table reference index out of range");
    }
    if (ratios[reference_index] != 1.0) {
        throw MalformedSpec("ratio of the reference member to itself must be exactly 1");
    }
    std::vector<double> log_ratios;
    log_ratios.reserve(ratios.size());
    for (std::size_t j = 0; j < ratios.size(); ++j) {
        if (!(ratios[j] > 0.0) || !std::isfinite(ratios[j])) {
            throw MalformedSpec("ratio table entries must be strictly positive and finite");
        }
        log_ratios.push_back(j == reference_index ? 0.0 : std::log(ratios[j]));
    }
    return RatioTable(std::move(support), reference_index, std::move(log_ratios));
}

RatioTable RatioTable::from_joint(const JointDistribution& d, std::size_t reference_index) {
    if (reference_index >= d.size()) {
        throw MalformedSpec("ratio table reference index out of range");
    }
    std::vector<double> log_ratios;
    log_ratios.reserve(d.size());
    const double ref = d.log_prob(reference_index);
    for (std::size_t j = 0; j < d.size(); ++j) {
        log_ratios.push_back(d.log_prob(j) - ref);
    }
    return RatioTable(d.support_ptr(), reference_index, std::move(log_ratios));
}

JointDistribution probabilities_from_ratios(const RatioTable& rt) {
    return JointDistribution::from_log_weights(rt.support_ptr(), rt.log_ratios());
}

JointDistribution conditional_restrict(const JointDistribution& full, const ConstraintSet& cs) {
    const Support& s = full.support();
    std::vector<Pattern> kept;
    std::vector<double> kept_log;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (cs.evaluate(s.member(i))) {
            kept.push_back(s.member(i));
            kept_log.push_back(full.log_prob(i));
        }
    }
    if (kept.empty()) {
        throw EmptySupport("constraint set removes every member of the distribution's support");
    }
    auto restricted = std::make_shared<Support>(s.spec(), std::move(kept));
    return JointDistribution::from_log_weights(std::move(restricted), std::move(kept_log));
}

double ratio(const JointDistribution& d, std::size_t i, std::size_t j) {
    return std::exp(d.log_prob(j) - d.log_prob(i));
}

EnergyTable energy_from_joint(const JointDistribution& d) {
    std::vector<double> energies;
    energies.reserve(d.size());
    const double ref = d.log_prob(0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        energies.push_back(ref - d.log_prob(i));
    }
    return EnergyTable(d.support_ptr(), std::move(energies));
}

EnergyTable::EnergyTable(SupportPtr support, std::vector<double> energies)
    : support_(std::move(support)), energies_(std::move(energies)) {
    require_support(support_, energies_.size(), "energy table");
    require_finite(energies_, "energy table");
}

} // namespace cmrf
