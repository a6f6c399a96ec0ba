#include "cmrf/markov.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <string>

#include "cmrf/errors.hpp"
#include "cmrf/numerics.hpp"

namespace cmrf {

namespace {

constexpr double kDistSumTol = 1e-12;

std::vector<std::vector<int>> build_key_sites(const FieldSpec& spec, const NeighborhoodSystem& eta,
                                              ConditionalKeying keying) {
    const int n = spec.site_count();
    std::vector<std::vector<int>> key_sites(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        if (keying == ConditionalKeying::Neighborhood) {
            key_sites[static_cast<std::size_t>(l)] = eta.neighbors(l);
        } else {
            auto& ks = key_sites[static_cast<std::size_t>(l)];
            ks.reserve(static_cast<std::size_t>(n) - 1);
            for (int s = 0; s < n; ++s) {
                if (s != l) ks.push_back(s);
            }
        }
    }
    return key_sites;
}

std::uint64_t key_space_size(const FieldSpec& spec, const std::vector<int>& key_sites) {
    std::uint64_t total = 1;
    for (int s : key_sites) total *= static_cast<std::uint64_t>(spec.alphabet_size(s));
    return total;
}

} // namespace

LocalConditionalTable::LocalConditionalTable(FieldSpec spec, ConstraintSet cs,
                                             NeighborhoodSystem eta, ConditionalKeying keying,
                                             std::vector<SiteEntries> entries)
    : spec_(std::move(spec)),
      cs_(std::move(cs)),
      eta_(std::move(eta)),
      keying_(keying),
      entries_(std::move(entries)) {
    const int n = spec_.site_count();
    if (eta_.site_count() != n) {
        throw MalformedSpec("conditional table neighborhood covers " +
                            std::to_string(eta_.site_count()) + " sites, field has " +
                            std::to_string(n));
    }
    if (entries_.size() != static_cast<std::size_t>(n)) {
        throw MalformedSpec("conditional table must have one entry map per site");
    }
    key_sites_ = build_key_sites(spec_, eta_, keying_);
    for (int l = 0; l < n; ++l) {
        const auto m = static_cast<std::size_t>(spec_.alphabet_size(l));
        const std::uint64_t keys = key_space_size(spec_, key_sites_[static_cast<std::size_t>(l)]);
        for (const auto& [key, dist] : entries_[static_cast<std::size_t>(l)]) {
            if (key >= keys) {
                throw MalformedSpec("conditional boundary key out of range at site " +
                                    std::to_string(l));
            }
            if (dist.size() != m) {
                throw MalformedSpec("conditional distribution at site " + std::to_string(l) +
                                    " has " + std::to_string(dist.size()) + " entries, alphabet is " +
                                    std::to_string(m));
            }
            double sum = 0.0;
            for (double p : dist) {
                if (!std::isfinite(p) || p < 0.0) {
                    throw MalformedSpec("conditional probability out of range at site " +
                                        std::to_string(l));
                }
                sum += p;
            }
            if (std::abs(sum - 1.0) > kDistSumTol) {
                throw MalformedSpec("conditional distribution at site " + std::to_string(l) +
                                    " sums to " + std::to_string(sum));
            }
        }
    }
}

std::uint64_t LocalConditionalTable::boundary_key(const FieldSpec& spec,
                                                  const std::vector<int>& key_sites,
                                                  const Pattern& x) {
    std::uint64_t key = 0;
    for (int s : key_sites) {
        key = key * static_cast<std::uint64_t>(spec.alphabet_size(s)) +
              static_cast<std::uint64_t>(x[static_cast<std::size_t>(s)]);
    }
    return key;
}

const std::vector<double>* LocalConditionalTable::find(int l, const Pattern& x) const {
    const auto& site = entries_[static_cast<std::size_t>(l)];
    const auto it = site.find(boundary_key(spec_, key_sites(l), x));
    return it == site.end() ? nullptr : &it->second;
}

LocalConditionalTable local_conditionals_from_joint(const JointDistribution& d,
                                                    std::optional<NeighborhoodSystem> eta,
                                                    ConstraintSet cs) {
    const Support& s = d.support();
    const FieldSpec& spec = s.spec();
    const int n = spec.site_count();
    const ConditionalKeying keying =
        eta ? ConditionalKeying::Neighborhood : ConditionalKeying::FullComplement;
    NeighborhoodSystem declared = eta ? std::move(*eta) : NeighborhoodSystem::full_complement(n);

    const auto key_sites = build_key_sites(spec, declared, keying);
    std::vector<LocalConditionalTable::SiteEntries> entries(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        // Per boundary key, per label: log-probs of the matching members.
        std::map<std::uint64_t, std::vector<std::vector<double>>> groups;
        const auto m = static_cast<std::size_t>(spec.alphabet_size(l));
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Pattern& x = s.member(i);
            const std::uint64_t key =
                LocalConditionalTable::boundary_key(spec, key_sites[static_cast<std::size_t>(l)], x);
            auto [it, inserted] = groups.try_emplace(key, m);
            it->second[static_cast<std::size_t>(x[static_cast<std::size_t>(l)])].push_back(
                d.log_prob(i));
        }
        for (auto& [key, per_label] : groups) {
            std::vector<double> all;
            for (const auto& lps : per_label) all.insert(all.end(), lps.begin(), lps.end());
            const double denom = log_sum_exp(all);
            std::vector<double> dist(m, 0.0);
            for (std::size_t v = 0; v < m; ++v) {
                if (!per_label[v].empty()) {
                    dist[v] = std::exp(log_sum_exp(per_label[v]) - denom);
                }
            }
            entries[static_cast<std::size_t>(l)].emplace(key, std::move(dist));
        }
    }
    return LocalConditionalTable(spec, std::move(cs), std::move(declared), keying,
                                 std::move(entries));
}

MarkovianityReport check_markovianity(const JointDistribution& d, const NeighborhoodSystem& eta,
                                      double tol) {
    const Support& s = d.support();
    const FieldSpec& spec = s.spec();
    const int n = spec.site_count();
    if (eta.site_count() != n) {
        throw MalformedSpec("neighborhood system covers a different number of sites");
    }

    MarkovianityReport report;
    std::vector<int> complement;
    for (int l = 0; l < n; ++l) {
        complement.clear();
        for (int site = 0; site < n; ++site) {
            if (site != l) complement.push_back(site);
        }
        const auto m = static_cast<std::size_t>(spec.alphabet_size(l));

        // Exact conditioning: a full-complement boundary plus a label pins
        // down one pattern, so each cell holds at most one log-prob.
        struct BoundaryGroup {
            std::vector<double> lp;          // per label; NaN when absent
            std::size_t representative = 0;  // any member realizing the boundary
        };
        std::map<std::uint64_t, BoundaryGroup> boundaries;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const Pattern& x = s.member(i);
            const std::uint64_t key = LocalConditionalTable::boundary_key(spec, complement, x);
            auto [it, inserted] = boundaries.try_emplace(key);
            if (inserted) {
                it->second.lp.assign(m, std::numeric_limits<double>::quiet_NaN());
                it->second.representative = i;
            }
            it->second.lp[static_cast<std::size_t>(x[static_cast<std::size_t>(l)])] = d.log_prob(i);
        }

        // Conditional per boundary, then group boundaries by the eta_l key.
        struct Extreme {
            double min = std::numeric_limits<double>::infinity();
            double max = -std::numeric_limits<double>::infinity();
            std::size_t argmin = 0;
            std::size_t argmax = 0;
        };
        std::map<std::uint64_t, std::vector<Extreme>> eta_groups;
        const auto& eta_l = eta.neighbors(l);
        for (const auto& [key, group] : boundaries) {
            std::vector<double> present;
            for (double lp : group.lp) {
                if (!std::isnan(lp)) present.push_back(lp);
            }
            const double denom = log_sum_exp(present);
            const std::uint64_t eta_key =
                LocalConditionalTable::boundary_key(spec, eta_l, s.member(group.representative));
            auto [it, inserted] = eta_groups.try_emplace(eta_key);
            if (inserted) it->second.assign(m, Extreme{});
            for (std::size_t v = 0; v < m; ++v) {
                const double p = std::isnan(group.lp[v]) ? 0.0 : std::exp(group.lp[v] - denom);
                auto& e = it->second[v];
                if (p < e.min) {
                    e.min = p;
                    e.argmin = group.representative;
                }
                if (p > e.max) {
                    e.max = p;
                    e.argmax = group.representative;
                }
            }
        }

        for (const auto& [eta_key, extremes] : eta_groups) {
            for (std::size_t v = 0; v < m; ++v) {
                const auto& e = extremes[v];
                const double dev = e.max - e.min;
                if (dev > report.worst_deviation) {
                    report.worst_deviation = dev;
                    report.witness = MarkovianityWitness{l, s.member(e.argmax), s.member(e.argmin),
                                                         static_cast<Label>(v), dev};
                }
            }
        }
    }
    report.pass = report.worst_deviation <= tol;
    return report;
}

namespace {

struct EdgeDelta {
    double value = 0.0; // ln p(b-label) - ln p(a-label), oriented a -> b
};

double edge_delta(const LocalConditionalTable& t, const Support& s, const FlipEdge& e) {
    const Pattern& xa = s.member(e.a);
    const Pattern& xb = s.member(e.b);
    const std::vector<double>* dist = t.find(e.site, xa);
    if (dist == nullptr) {
        throw MalformedSpec("no conditional entry at site " + std::to_string(e.site) +
                            " for the boundary of support member " + std::to_string(e.a));
    }
    const double pa = (*dist)[static_cast<std::size_t>(xa[static_cast<std::size_t>(e.site)])];
    const double pb = (*dist)[static_cast<std::size_t>(xb[static_cast<std::size_t>(e.site)])];
    if (!(pa > 0.0) || !(pb > 0.0)) {
        throw MalformedSpec("conditional table assigns zero probability to a support member at site " +
                            std::to_string(e.site));
    }
    return std::log(pb) - std::log(pa);
}

} // namespace

ReconstructionResult joint_from_local_conditionals(const LocalConditionalTable& t, SupportPtr s,
                                                   std::optional<std::vector<double>> component_masses,
                                                   double cycle_tol) {
    if (!s) throw MalformedSpec("reconstruction: support is null");
    if (!(t.field() == s->spec())) {
        throw MalformedSpec("conditional table and support describe different fields");
    }
    const FlipGraph fg = flip_graph(*s);

    std::vector<std::vector<std::size_t>> components(static_cast<std::size_t>(fg.component_count));
    for (std::size_t i = 0; i < fg.node_count; ++i) {
        components[static_cast<std::size_t>(fg.component_ids[i])].push_back(i);
    }

    if (component_masses) {
        if (component_masses->size() != components.size()) {
            throw MalformedSpec("expected " + std::to_string(components.size()) +
                                " component masses, got " + std::to_string(component_masses->size()));
        }
        double sum = 0.0;
        for (double mass : *component_masses) {
            if (!(mass > 0.0) || !std::isfinite(mass)) {
                throw MalformedSpec("component masses must be strictly positive and finite");
            }
            sum += mass;
        }
        if (std::abs(sum - 1.0) > kDistSumTol) {
            throw MalformedSpec("component masses must sum to 1");
        }
    } else if (fg.component_count > 1) {
        return NonIdentifiable{fg.component_count, std::move(components)};
    }

    std::vector<double> delta(fg.edges.size());
    for (std::size_t k = 0; k < fg.edges.size(); ++k) {
        delta[k] = edge_delta(t, *s, fg.edges[k]);
    }

    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(fg.node_count);
    for (std::size_t k = 0; k < fg.edges.size(); ++k) {
        adj[fg.edges[k].a].emplace_back(fg.edges[k].b, k);
        adj[fg.edges[k].b].emplace_back(fg.edges[k].a, k);
    }

    std::vector<double> lw(fg.node_count, 0.0);
    std::vector<bool> visited(fg.node_count, false);
    std::vector<bool> tree_edge(fg.edges.size(), false);
    std::vector<std::size_t> parent(fg.node_count, 0);
    for (const auto& comp : components) {
        const std::size_t root = comp.front(); // smallest support index
        visited[root] = true;
        parent[root] = root;
        std::deque<std::size_t> queue{root};
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (const auto& [v, k] : adj[u]) {
                if (visited[v]) continue;
                visited[v] = true;
                parent[v] = u;
                tree_edge[k] = true;
                lw[v] = lw[u] + (fg.edges[k].a == u ? delta[k] : -delta[k]);
                queue.push_back(v);
            }
        }
    }

    double worst = 0.0;
    std::size_t worst_edge = fg.edges.size();
    for (std::size_t k = 0; k < fg.edges.size(); ++k) {
        if (tree_edge[k]) continue;
        const double residual = std::abs(lw[fg.edges[k].b] - lw[fg.edges[k].a] - delta[k]);
        if (residual > worst) {
            worst = residual;
            worst_edge = k;
        }
    }
    if (worst > cycle_tol) {
        // Witness: tree path a -> b, closed by the offending edge.
        const auto& e = fg.edges[worst_edge];
        std::vector<std::size_t> up_a{e.a};
        while (parent[up_a.back()] != up_a.back()) up_a.push_back(parent[up_a.back()]);
        std::set<std::size_t> on_a(up_a.begin(), up_a.end());
        std::vector<std::size_t> up_b{e.b};
        while (on_a.find(up_b.back()) == on_a.end()) up_b.push_back(parent[up_b.back()]);
        std::vector<std::size_t> cycle;
        for (std::size_t node : up_a) {
            cycle.push_back(node);
            if (node == up_b.back()) break;
        }
        for (std::size_t i = up_b.size() - 1; i-- > 0;) cycle.push_back(up_b[i]);
        cycle.push_back(e.a);
        return InconsistentConditionals{worst, std::move(cycle)};
    }

    if (components.size() == 1) {
        return JointDistribution::from_log_weights(std::move(s), std::move(lw));
    }
    std::vector<double> log_probs(fg.node_count, 0.0);
    std::vector<double> comp_lw;
    for (std::size_t c = 0; c < components.size(); ++c) {
        comp_lw.clear();
        for (std::size_t i : components[c]) comp_lw.push_back(lw[i]);
        const double lse = log_sum_exp(comp_lw);
        const double log_mass = std::log((*component_masses)[c]);
        for (std::size_t i : components[c]) log_probs[i] = lw[i] - lse + log_mass;
    }
    return JointDistribution::from_log_weights(std::move(s), std::move(log_probs));
}

} // namespace cmrf
