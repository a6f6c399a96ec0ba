#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "cmrf/field_model.hpp"

namespace cmrf {

// Forbids patterns that match the given labels at the given sites exactly.
// Canonical form: sites sorted ascending, labels permuted along.
struct ForbiddenWindow {
    std::vector<int> sites;
    std::vector<Label> labels;
};

enum class Cmp { Eq, Le, Ge };

// Compares the number of sites carrying `label` against `bound`.
struct CountConstraint {
    Label label = 0;
    Cmp cmp = Cmp::Eq;
    int bound = 0;
};

// Pattern must appear in the list. Canonical form: sorted by rank, distinct.
struct AllowList {
    std::vector<Pattern> patterns;
};

// Pattern must not appear in the list. Canonical form as AllowList.
struct DenyList {
    std::vector<Pattern> patterns;
};

using Constraint = std::variant<ForbiddenWindow, CountConstraint, AllowList, DenyList>;

// A conjunction of constraints. The empty set admits every pattern.
class ConstraintSet {
public:
    ConstraintSet() = default;
    // Canonicalizes each member and validates it against the field.
    ConstraintSet(std::vector<Constraint> constraints, const FieldSpec& spec);

    const std::vector<Constraint>& constraints() const { return constraints_; }
    bool empty() const { return constraints_.empty(); }

    // True iff x satisfies every member constraint.
    bool evaluate(const Pattern& x) const;

private:
    struct AlreadyCanonical {};
    ConstraintSet(std::vector<Constraint> constraints, AlreadyCanonical)
        : constraints_(std::move(constraints)) {}
    friend ConstraintSet intersect(const ConstraintSet&, const ConstraintSet&);

    std::vector<Constraint> constraints_;
};

// Conjunction of two sets over the same field: concatenated constraint lists.
ConstraintSet intersect(const ConstraintSet& a, const ConstraintSet& b);

// The constraint set C as an explicit pattern list, sorted by field rank.
// Construction fails with EmptySupport when no pattern is admitted.
class Support {
public:
    // Enumerates the field (guard-checked) and filters by cs.
    static Support build(const FieldSpec& spec, const ConstraintSet& cs,
                         std::optional<std::uint64_t> guard_limit = std::nullopt);

    // The unconstrained field itself.
    static Support full(const FieldSpec& spec,
                        std::optional<std::uint64_t> guard_limit = std::nullopt);

    // An explicit member list; validated, deduplicated by exact match rejected.
    Support(FieldSpec spec, std::vector<Pattern> members);

    const FieldSpec& spec() const { return spec_; }
    std::size_t size() const { return members_.size(); }
    const std::vector<Pattern>& members() const { return members_; }
    const Pattern& member(std::size_t i) const { return members_[i]; }
    std::uint64_t rank(std::size_t i) const { return ranks_[i]; }

    // Support index of x, or nullopt when x is not a member. Throws
    // MalformedSpec when x is not a valid pattern of the field at all.
    std::optional<std::size_t> index_of(const Pattern& x) const;
    std::optional<std::size_t> index_of_rank(std::uint64_t r) const;

    bool covers_full_space() const;

private:
    FieldSpec spec_;
    std::vector<Pattern> members_;
    std::vector<std::uint64_t> ranks_;
};

// Distributions and tables share immutable supports by pointer.
using SupportPtr = std::shared_ptr<const Support>;

// Undirected edge between support members differing at exactly one site.
struct FlipEdge {
    std::size_t a = 0; // a < b, both support indices
    std::size_t b = 0;
    int site = 0; // the single differing site
};

struct FlipGraph {
    std::size_t node_count = 0;
    std::vector<FlipEdge> edges;
    // component_ids[i] numbers components by smallest member index.
    std::vector<int> component_ids;
    int component_count = 0;
};

FlipGraph flip_graph(const Support& support);

} // namespace cmrf
