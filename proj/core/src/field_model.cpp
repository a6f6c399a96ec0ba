#include "cmrf/field_model.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "cmrf/errors.hpp"

namespace cmrf {

FieldSpec::FieldSpec(std::vector<int> alphabet_sizes)
    : alphabet_sizes_(std::move(alphabet_sizes)) {
    if (alphabet_sizes_.empty()) {
        throw MalformedSpec("field must have at least one site");
    }
    for (std::size_t l = 0; l < alphabet_sizes_.size(); ++l) {
        if (alphabet_sizes_[l] < 1) {
            throw MalformedSpec("alphabet size at site " + std::to_string(l) +
                                " must be >= 1, got " + std::to_string(alphabet_sizes_[l]));
        }
    }
    constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
    for (int m : alphabet_sizes_) {
        const auto factor = static_cast<std::uint64_t>(m);
        if (pattern_count_ > kMax / factor) {
            pattern_count_ = kMax;
            overflowed_ = true;
            break;
        }
        pattern_count_ *= factor;
    }
}

bool FieldSpec::pattern_valid(const Pattern& x) const {
    if (x.size() != alphabet_sizes_.size()) return false;
    for (std::size_t l = 0; l < x.size(); ++l) {
        if (x[l] < 0 || x[l] >= alphabet_sizes_[l]) return false;
    }
    return true;
}

void FieldSpec::require_valid(const Pattern& x) const {
    if (!pattern_valid(x)) {
        throw MalformedSpec("pattern has wrong arity or out-of-range label for this field");
    }
}

std::uint64_t FieldSpec::rank_of(const Pattern& x) const {
    require_valid(x);
    std::uint64_t rank = 0;
    for (std::size_t l = 0; l < x.size(); ++l) {
        rank = rank * static_cast<std::uint64_t>(alphabet_sizes_[l]) + static_cast<std::uint64_t>(x[l]);
    }
    return rank;
}

Pattern FieldSpec::pattern_at(std::uint64_t rank) const {
    if (overflowed_ || rank >= pattern_count_) {
        throw MalformedSpec("pattern rank out of range");
    }
    Pattern x(alphabet_sizes_.size());
    for (std::size_t l = alphabet_sizes_.size(); l-- > 0;) {
        const auto m = static_cast<std::uint64_t>(alphabet_sizes_[l]);
        x[l] = static_cast<Label>(rank % m);
        rank /= m;
    }
    return x;
}

bool FieldSpec::next_pattern(Pattern& x) const {
    for (std::size_t l = x.size(); l-- > 0;) {
        if (x[l] + 1 < alphabet_sizes_[l]) {
            ++x[l];
            std::fill(x.begin() + static_cast<std::ptrdiff_t>(l) + 1, x.end(), 0);
            return true;
        }
    }
    return false;
}

namespace {

bool clique_order_less(const Clique& a, const Clique& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

} // namespace

CliqueSet::CliqueSet(std::vector<Clique> cliques, int site_count)
    : cliques_(std::move(cliques)) {
    for (auto& c : cliques_) {
        std::sort(c.begin(), c.end());
        if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
            throw MalformedSpec("clique contains a repeated site");
        }
        for (int s : c) {
            if (s < 0 || s >= site_count) {
                throw MalformedSpec("clique site " + std::to_string(s) + " out of range");
            }
        }
    }
    std::sort(cliques_.begin(), cliques_.end(), clique_order_less);
    if (std::adjacent_find(cliques_.begin(), cliques_.end()) != cliques_.end()) {
        throw MalformedSpec("clique set contains a duplicate clique");
    }
}

NeighborhoodSystem::NeighborhoodSystem(std::vector<std::vector<int>> neighbors)
    : neighbors_(std::move(neighbors)) {
    const int n = static_cast<int>(neighbors_.size());
    if (n == 0) throw MalformedSpec("neighborhood system must cover at least one site");
    for (int l = 0; l < n; ++l) {
        auto& eta = neighbors_[static_cast<std::size_t>(l)];
        std::sort(eta.begin(), eta.end());
        eta.erase(std::unique(eta.begin(), eta.end()), eta.end());
        for (int s : eta) {
            if (s < 0 || s >= n) {
                throw MalformedSpec("neighbor index " + std::to_string(s) + " out of range");
            }
            if (s == l) {
                throw MalformedSpec("site " + std::to_string(l) + " listed as its own neighbor");
            }
        }
    }
    for (int l = 0; l < n; ++l) {
        for (int s : neighbors_[static_cast<std::size_t>(l)]) {
            const auto& back = neighbors_[static_cast<std::size_t>(s)];
            if (!std::binary_search(back.begin(), back.end(), l)) {
                throw MalformedSpec("neighborhood is not symmetric between sites " +
                                    std::to_string(l) + " and " + std::to_string(s));
            }
        }
    }
}

NeighborhoodSystem NeighborhoodSystem::full_complement(int site_count) {
    std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(site_count));
    for (int l = 0; l < site_count; ++l) {
        auto& eta = neighbors[static_cast<std::size_t>(l)];
        eta.reserve(static_cast<std::size_t>(site_count) - 1);
        for (int s = 0; s < site_count; ++s) {
            if (s != l) eta.push_back(s);
        }
    }
    return NeighborhoodSystem(std::move(neighbors));
}

std::vector<Pattern> enumerate_patterns(const FieldSpec& spec,
                                        std::optional<std::uint64_t> guard_limit) {
    const std::uint64_t limit = guard_limit.value_or(guard::pattern_limit());
    if (spec.pattern_count_overflowed() || spec.pattern_count() > limit) {
        throw GuardExceeded("pattern space of size " +
                            (spec.pattern_count_overflowed() ? std::string("> 2^64")
                                                             : std::to_string(spec.pattern_count())) +
                            " exceeds enumeration limit " + std::to_string(limit));
    }
    std::vector<Pattern> out;
    out.reserve(static_cast<std::size_t>(spec.pattern_count()));
    Pattern x(static_cast<std::size_t>(spec.site_count()), 0);
    do {
        out.push_back(x);
    } while (spec.next_pattern(x));
    return out;
}

CliqueSet cliques_containing(const CliqueSet& q, int site) {
    std::vector<Clique> hits;
    for (const auto& c : q.cliques()) {
        if (std::binary_search(c.begin(), c.end(), site)) hits.push_back(c);
    }
    // Members of q are already canonical and distinct, so revalidation is a no-op.
    return CliqueSet(std::move(hits), std::numeric_limits<int>::max());
}

NeighborhoodSystem neighborhood_from_cliques(const CliqueSet& q, int site_count) {
    std::vector<std::set<int>> eta(static_cast<std::size_t>(site_count));
    for (const auto& c : q.cliques()) {
        for (int a : c) {
            for (int b : c) {
                if (a != b) eta[static_cast<std::size_t>(a)].insert(b);
            }
        }
    }
    std::vector<std::vector<int>> neighbors(static_cast<std::size_t>(site_count));
    for (int l = 0; l < site_count; ++l) {
        neighbors[static_cast<std::size_t>(l)].assign(eta[static_cast<std::size_t>(l)].begin(),
                                                      eta[static_cast<std::size_t>(l)].end());
    }
    return NeighborhoodSystem(std::move(neighbors));
}

std::vector<Label> restrict_to_clique(const Pattern& x, const Clique& c) {
    std::vector<Label> out;
    out.reserve(c.size());
    for (int s : c) out.push_back(x[static_cast<std::size_t>(s)]);
    return out;
}

} // namespace cmrf
