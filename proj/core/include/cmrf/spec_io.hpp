#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cmrf/gibbs.hpp"
#include "cmrf/markov.hpp"

namespace cmrf {

enum class ModelKind { Gibbs, Energy, Conditionals, Joint };

// A parsed, fully validated field-spec document. Exactly one model section
// is populated, matching `kind`. The constraint support is materialized at
// parse time. Raw joint probabilities are kept verbatim so serialization
// reproduces the input numbers bit-for-bit.
struct SpecDocument {
    int format_version = 1;
    FieldSpec field;
    ConstraintSet constraints;
    SupportPtr support;
    ModelKind kind = ModelKind::Joint;
    std::optional<GibbsSpec> gibbs;
    std::optional<EnergyTable> energy;
    std::optional<LocalConditionalTable> conditionals;
    std::optional<JointDistribution> joint;
    std::vector<double> joint_probabilities; // support order; Joint kind only
};

// Strict JSON parsing; errors name the offending section and key.
SpecDocument parse_spec(const std::string& text);

SpecDocument load_spec_file(const std::string& path);

// Canonical serialization; parse(serialize(doc)) reproduces doc.
std::string serialize_spec(const SpecDocument& doc);

} // namespace cmrf
