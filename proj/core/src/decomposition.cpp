#include "cmrf/decomposition.hpp"

#include <cmath>
#include <string>

#include "cmrf/errors.hpp"

namespace cmrf {

GibbsSpec canonical_potentials(const EnergyTable& u, std::optional<Pattern> reference_labels,
                               std::optional<int> clique_order_limit,
                               std::optional<std::uint64_t> table_value_limit) {
    const Support& s = u.support();
    const FieldSpec& spec = s.spec();
    const int n = spec.site_count();
    if (!u.covers_full_space()) {
        throw MalformedSpec("decomposition requires an energy defined on the whole field");
    }

    const int order_limit = clique_order_limit.value_or(guard::clique_order_limit());
    if (n > order_limit) {
        throw GuardExceeded("decomposition over " + std::to_string(n) +
                            " sites exceeds the clique order limit " + std::to_string(order_limit));
    }
    // Total values across all 2^n tables: prod_l (1 + m_l).
    const std::uint64_t value_limit = table_value_limit.value_or(guard::pattern_limit());
    std::uint64_t total_values = 1;
    for (int m : spec.alphabet_sizes()) {
        const auto factor = static_cast<std::uint64_t>(m) + 1;
        if (total_values > value_limit / factor) {
            throw GuardExceeded("decomposition output would exceed the table value limit " +
                                std::to_string(value_limit));
        }
        total_values *= factor;
    }

    Pattern ref = reference_labels.value_or(Pattern(static_cast<std::size_t>(n), 0));
    spec.require_valid(ref);

    // In-place alternating-sum transform. After processing every site,
    // F[x] holds V_c(x on c) for c = {l : x_l != ref_l}; entries with
    // x_l = ref_l act as bases and are never written during site l's pass.
    std::vector<double> f = u.energies(); // support covers the field, so index == rank
    std::vector<std::uint64_t> weight(static_cast<std::size_t>(n), 1);
    for (int l = n - 2; l >= 0; --l) {
        weight[static_cast<std::size_t>(l)] =
            weight[static_cast<std::size_t>(l) + 1] *
            static_cast<std::uint64_t>(spec.alphabet_size(l + 1));
    }
    for (int l = 0; l < n; ++l) {
        const auto w = weight[static_cast<std::size_t>(l)];
        const auto m = static_cast<std::uint64_t>(spec.alphabet_size(l));
        const auto r = static_cast<std::uint64_t>(ref[static_cast<std::size_t>(l)]);
        for (std::uint64_t rank = 0; rank < f.size(); ++rank) {
            const std::uint64_t label = (rank / w) % m;
            if (label != r) {
                const std::uint64_t base = rank - label * w + r * w;
                f[rank] -= f[base];
            }
        }
    }

    std::vector<PotentialTable> tables;
    tables.reserve(std::size_t{1} << n);
    std::vector<int> clique_sites;
    Pattern z(static_cast<std::size_t>(n));
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        clique_sites.clear();
        for (int l = 0; l < n; ++l) {
            if (mask & (std::uint64_t{1} << l)) clique_sites.push_back(l);
        }
        std::size_t count = 1;
        for (int l : clique_sites) count *= static_cast<std::size_t>(spec.alphabet_size(l));
        std::vector<double> values(count, 0.0);
        // Enumerate assignments on the clique in mixed-radix order.
        std::vector<Label> y(clique_sites.size(), 0);
        for (std::size_t a = 0; a < count; ++a) {
            bool touches_reference = false;
            z = ref;
            for (std::size_t k = 0; k < clique_sites.size(); ++k) {
                if (y[k] == ref[static_cast<std::size_t>(clique_sites[k])]) {
                    touches_reference = true;
                    break;
                }
                z[static_cast<std::size_t>(clique_sites[k])] = y[k];
            }
            if (!touches_reference) {
                values[a] = f[spec.rank_of(z)];
            }
            for (std::size_t k = clique_sites.size(); k-- > 0;) {
                if (++y[k] < spec.alphabet_size(clique_sites[k])) break;
                y[k] = 0;
            }
        }
        tables.emplace_back(Clique(clique_sites), std::move(values), spec);
    }
    return GibbsSpec(spec, std::move(tables));
}

CliqueSet minimal_clique_set(const GibbsSpec& g, double tol) {
    std::vector<Clique> kept;
    for (const auto& p : g.potentials()) {
        for (double v : p.values()) {
            if (std::abs(v) > tol) {
                kept.push_back(p.clique());
                break;
            }
        }
    }
    return CliqueSet(std::move(kept), g.field().site_count());
}

} // namespace cmrf
