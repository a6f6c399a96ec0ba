#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cmrf/guard.hpp"

namespace cmrf {

using Label = std::int32_t;

// A realization over all sites; labels[l] < alphabet_sizes[l].
using Pattern = std::vector<Label>;

// A clique: any subset of site indices, kept sorted ascending.
// The empty subset is a valid clique.
using Clique = std::vector<int>;

// Sites and their finite label alphabets. Immutable after construction.
// Patterns are ordered by mixed-radix rank with site 0 most significant;
// that order is the lexicographic order every module addresses members by.
class FieldSpec {
public:
    explicit FieldSpec(std::vector<int> alphabet_sizes);

    int site_count() const { return static_cast<int>(alphabet_sizes_.size()); }
    const std::vector<int>& alphabet_sizes() const { return alphabet_sizes_; }
    int alphabet_size(int site) const { return alphabet_sizes_[static_cast<std::size_t>(site)]; }

    // Saturates at uint64 max when the true product overflows.
    std::uint64_t pattern_count() const { return pattern_count_; }
    bool pattern_count_overflowed() const { return overflowed_; }

    bool pattern_valid(const Pattern& x) const;
    void require_valid(const Pattern& x) const; // throws MalformedSpec

    std::uint64_t rank_of(const Pattern& x) const;
    Pattern pattern_at(std::uint64_t rank) const;

    // Advances x to the next pattern in rank order; false after the last.
    bool next_pattern(Pattern& x) const;

    bool operator==(const FieldSpec& other) const { return alphabet_sizes_ == other.alphabet_sizes_; }

private:
    std::vector<int> alphabet_sizes_;
    std::uint64_t pattern_count_ = 1;
    bool overflowed_ = false;
};

// A family of distinct cliques over a field, canonically ordered by
// (size, lexicographic site order). Immutable after construction.
class CliqueSet {
public:
    CliqueSet() = default;
    CliqueSet(std::vector<Clique> cliques, int site_count);

    const std::vector<Clique>& cliques() const { return cliques_; }
    std::size_t size() const { return cliques_.size(); }
    bool empty() const { return cliques_.empty(); }

    bool operator==(const CliqueSet& other) const { return cliques_ == other.cliques_; }

private:
    std::vector<Clique> cliques_;
};

// Per-site neighbor sets; symmetric and irreflexive by construction.
class NeighborhoodSystem {
public:
    explicit NeighborhoodSystem(std::vector<std::vector<int>> neighbors);

    // eta_l = all other sites, for every l.
    static NeighborhoodSystem full_complement(int site_count);

    int site_count() const { return static_cast<int>(neighbors_.size()); }
    const std::vector<int>& neighbors(int site) const { return neighbors_[static_cast<std::size_t>(site)]; }
    const std::vector<std::vector<int>>& all() const { return neighbors_; }

    bool operator==(const NeighborhoodSystem& other) const { return neighbors_ == other.neighbors_; }

private:
    std::vector<std::vector<int>> neighbors_;
};

// All patterns of the field in rank order. Throws GuardExceeded when the
// count exceeds the limit (default: the global pattern guard).
std::vector<Pattern> enumerate_patterns(const FieldSpec& spec,
                                        std::optional<std::uint64_t> guard_limit = std::nullopt);

// D_l: the cliques that contain site l.
CliqueSet cliques_containing(const CliqueSet& q, int site);

// eta_l = (union of the cliques containing l) minus {l}.
NeighborhoodSystem neighborhood_from_cliques(const CliqueSet& q, int site_count);

// Restriction of a pattern to a clique's sites, in clique order.
std::vector<Label> restrict_to_clique(const Pattern& x, const Clique& c);

} // namespace cmrf
