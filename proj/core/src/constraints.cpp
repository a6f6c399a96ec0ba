#include "cmrf/constraints.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "cmrf/errors.hpp"

namespace cmrf {

namespace {

void canonicalize_window(ForbiddenWindow& w, const FieldSpec& spec) {
    if (w.sites.empty()) {
        throw MalformedSpec("forbidden window must name at least one site");
    }
    if (w.sites.size() != w.labels.size()) {
        throw MalformedSpec("forbidden window has " + std::to_string(w.sites.size()) +
                            " sites but " + std::to_string(w.labels.size()) + " labels");
    }
    std::vector<std::size_t> order(w.sites.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return w.sites[i] < w.sites[j]; });
    std::vector<int> sites;
    std::vector<Label> labels;
    sites.reserve(order.size());
    labels.reserve(order.size());
    for (std::size_t k : order) {
        sites.push_back(w.sites[k]);
        labels.push_back(w.labels[k]);
    }
    if (std::adjacent_find(sites.begin(), sites.end()) != sites.end()) {
        throw MalformedSpec("forbidden window names a site twice");
    }
    for (std::size_t k = 0; k < sites.size(); ++k) {
        if (sites[k] < 0 || sites[k] >= spec.site_count()) {
            throw MalformedSpec("forbidden window site " + std::to_string(sites[k]) + " out of range");
        }
        if (labels[k] < 0 || labels[k] >= spec.alphabet_size(sites[k])) {
            throw MalformedSpec("forbidden window label " + std::to_string(labels[k]) +
                                " out of range at site " + std::to_string(sites[k]));
        }
    }
    w.sites = std::move(sites);
    w.labels = std::move(labels);
}

void canonicalize_count(CountConstraint& c, const FieldSpec& spec) {
    int max_alphabet = 0;
    for (int m : spec.alphabet_sizes()) max_alphabet = std::max(max_alphabet, m);
    if (c.label < 0 || c.label >= max_alphabet) {
        throw MalformedSpec("count constraint label " + std::to_string(c.label) +
                            " occurs in no site alphabet");
    }
    if (c.bound < 0) {
        throw MalformedSpec("count constraint bound must be >= 0, got " + std::to_string(c.bound));
    }
}

void canonicalize_list(std::vector<Pattern>& patterns, const FieldSpec& spec, const char* kind) {
    // An empty allow list admits nothing (support construction reports
    // EmptySupport); an empty deny list denies nothing.
    for (const auto& p : patterns) {
        if (!spec.pattern_valid(p)) {
            throw MalformedSpec(std::string(kind) + " contains a pattern invalid for this field");
        }
    }
    std::sort(patterns.begin(), patterns.end(),
              [&](const Pattern& a, const Pattern& b) { return spec.rank_of(a) < spec.rank_of(b); });
    patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
}

bool window_satisfied(const ForbiddenWindow& w, const Pattern& x) {
    for (std::size_t k = 0; k < w.sites.size(); ++k) {
        if (x[static_cast<std::size_t>(w.sites[k])] != w.labels[k]) return true;
    }
    return false; // window matched exactly: forbidden
}

bool count_satisfied(const CountConstraint& c, const Pattern& x) {
    int count = 0;
    for (Label v : x) {
        if (v == c.label) ++count;
    }
    switch (c.cmp) {
    case Cmp::Eq: return count == c.bound;
    case Cmp::Le: return count <= c.bound;
    case Cmp::Ge: return count >= c.bound;
    }
    return false;
}

bool list_contains(const std::vector<Pattern>& patterns, const Pattern& x) {
    // Canonical lists are rank-sorted, which for fixed arity matches
    // lexicographic order on the label vectors.
    return std::binary_search(patterns.begin(), patterns.end(), x);
}

} // namespace

ConstraintSet::ConstraintSet(std::vector<Constraint> constraints, const FieldSpec& spec)
    : constraints_(std::move(constraints)) {
    for (auto& c : constraints_) {
        std::visit([&](auto& concrete) {
            using T = std::decay_t<decltype(concrete)>;
            if constexpr (std::is_same_v<T, ForbiddenWindow>) {
                canonicalize_window(concrete, spec);
            } else if constexpr (std::is_same_v<T, CountConstraint>) {
                canonicalize_count(concrete, spec);
            } else if constexpr (std::is_same_v<T, AllowList>) {
                canonicalize_list(concrete.patterns, spec, "allow list");
            } else {
                canonicalize_list(concrete.patterns, spec, "deny list");
            }
        }, c);
    }
}

bool ConstraintSet::evaluate(const Pattern& x) const {
    for (const auto& c : constraints_) {
        const bool ok = std::visit([&](const auto& concrete) {
            using T = std::decay_t<decltype(concrete)>;
            if constexpr (std::is_same_v<T, ForbiddenWindow>) {
                return window_satisfied(concrete, x);
            } else if constexpr (std::is_same_v<T, CountConstraint>) {
                return count_satisfied(concrete, x);
            } else if constexpr (std::is_same_v<T, AllowList>) {
                return list_contains(concrete.patterns, x);
            } else {
                return !list_contains(concrete.patterns, x);
            }
        }, c);
        if (!ok) return false;
    }
    return true;
}

ConstraintSet intersect(const ConstraintSet& a, const ConstraintSet& b) {
    std::vector<Constraint> merged = a.constraints();
    merged.insert(merged.end(), b.constraints().begin(), b.constraints().end());
    return ConstraintSet(std::move(merged), ConstraintSet::AlreadyCanonical{});
}

Support::Support(FieldSpec spec, std::vector<Pattern> members)
    : spec_(std::move(spec)) {
    if (members.empty()) {
        throw EmptySupport("support has no members");
    }
    ranks_.reserve(members.size());
    for (const auto& p : members) {
        ranks_.push_back(spec_.rank_of(p)); // validates p
    }
    std::vector<std::size_t> order(members.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return ranks_[i] < ranks_[j]; });
    members_.reserve(members.size());
    std::vector<std::uint64_t> sorted_ranks;
    sorted_ranks.reserve(members.size());
    for (std::size_t k : order) {
        members_.push_back(std::move(members[k]));
        sorted_ranks.push_back(ranks_[k]);
    }
    ranks_ = std::move(sorted_ranks);
    if (std::adjacent_find(ranks_.begin(), ranks_.end()) != ranks_.end()) {
        throw MalformedSpec("support member list contains a duplicate pattern");
    }
}

Support Support::build(const FieldSpec& spec, const ConstraintSet& cs,
                       std::optional<std::uint64_t> guard_limit) {
    const std::uint64_t limit = guard_limit.value_or(guard::pattern_limit());
    if (spec.pattern_count_overflowed() || spec.pattern_count() > limit) {
        throw GuardExceeded("pattern space of size " +
                            (spec.pattern_count_overflowed() ? std::string("> 2^64")
                                                             : std::to_string(spec.pattern_count())) +
                            " exceeds enumeration limit " + std::to_string(limit));
    }
    std::vector<Pattern> members;
    Pattern x(static_cast<std::size_t>(spec.site_count()), 0);
    do {
        if (cs.evaluate(x)) members.push_back(x);
    } while (spec.next_pattern(x));
    if (members.empty()) {
        throw EmptySupport("constraint set admits no pattern of the field");
    }
    return Support(spec, std::move(members));
}

Support Support::full(const FieldSpec& spec, std::optional<std::uint64_t> guard_limit) {
    return build(spec, ConstraintSet{}, guard_limit);
}

std::optional<std::size_t> Support::index_of(const Pattern& x) const {
    return index_of_rank(spec_.rank_of(x));
}

std::optional<std::size_t> Support::index_of_rank(std::uint64_t r) const {
    const auto it = std::lower_bound(ranks_.begin(), ranks_.end(), r);
    if (it == ranks_.end() || *it != r) return std::nullopt;
    return static_cast<std::size_t>(it - ranks_.begin());
}

bool Support::covers_full_space() const {
    return !spec_.pattern_count_overflowed() &&
           static_cast<std::uint64_t>(members_.size()) == spec_.pattern_count();
}

FlipGraph flip_graph(const Support& support) {
    const FieldSpec& spec = support.spec();
    const int n = spec.site_count();

    // Rank increment per unit label change at each site.
    std::vector<std::uint64_t> weight(static_cast<std::size_t>(n), 1);
    for (int l = n - 2; l >= 0; --l) {
        weight[static_cast<std::size_t>(l)] =
            weight[static_cast<std::size_t>(l) + 1] *
            static_cast<std::uint64_t>(spec.alphabet_size(l + 1));
    }

    FlipGraph g;
    g.node_count = support.size();
    for (std::size_t i = 0; i < support.size(); ++i) {
        const Pattern& p = support.member(i);
        const std::uint64_t r = support.rank(i);
        for (int l = 0; l < n; ++l) {
            // Raising the label strictly raises the rank, so each Hamming-1
            // pair appears exactly once with a < b.
            for (Label v = p[static_cast<std::size_t>(l)] + 1; v < spec.alphabet_size(l); ++v) {
                const std::uint64_t rq =
                    r + static_cast<std::uint64_t>(v - p[static_cast<std::size_t>(l)]) *
                            weight[static_cast<std::size_t>(l)];
                if (auto j = support.index_of_rank(rq)) {
                    g.edges.push_back(FlipEdge{i, *j, l});
                }
            }
        }
    }

    std::vector<std::vector<std::size_t>> adj(g.node_count);
    for (const auto& e : g.edges) {
        adj[e.a].push_back(e.b);
        adj[e.b].push_back(e.a);
    }
    g.component_ids.assign(g.node_count, -1);
    int next_id = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < g.node_count; ++s) {
        if (g.component_ids[s] != -1) continue;
        g.component_ids[s] = next_id;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v : adj[u]) {
                if (g.component_ids[v] == -1) {
                    g.component_ids[v] = next_id;
                    stack.push_back(v);
                }
            }
        }
        ++next_id;
    }
    g.component_count = next_id;
    return g;
}

} // namespace cmrf
