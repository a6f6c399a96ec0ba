#include "cmrf/spec_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "cmrf/errors.hpp"

namespace cmrf {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

const json& require_key(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        throw MalformedSpec(where + ": missing key '" + key + "'");
    }
    return *it;
}

const json& require_object(const json& v, const std::string& where) {
    if (!v.is_object()) throw MalformedSpec(where + ": expected an object");
    return v;
}

const json& require_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw MalformedSpec(where + ": expected an array");
    return v;
}

int require_int(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw MalformedSpec(where + ": expected an integer");
    return v.get<int>();
}

std::uint64_t require_rank(const json& v, const std::string& where) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
        throw MalformedSpec(where + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

double require_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw MalformedSpec(where + ": expected a number");
    return v.get<double>();
}

std::string require_string(const json& v, const std::string& where) {
    if (!v.is_string()) throw MalformedSpec(where + ": expected a string");
    return v.get<std::string>();
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            throw MalformedSpec(where + ": unknown key '" + key + "'");
        }
    }
}

std::vector<int> int_array(const json& v, const std::string& where) {
    require_array(v, where);
    std::vector<int> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(require_int(v[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

Pattern label_array(const json& v, const std::string& where) {
    require_array(v, where);
    Pattern out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(static_cast<Label>(require_int(v[i], where + "[" + std::to_string(i) + "]")));
    }
    return out;
}

FieldSpec parse_field(const json& j) {
    require_object(j, "field");
    reject_unknown_keys(j, {"site_count", "alphabet_sizes"}, "field");
    const int site_count = require_int(require_key(j, "site_count", "field"), "field.site_count");
    std::vector<int> sizes = int_array(require_key(j, "alphabet_sizes", "field"), "field.alphabet_sizes");
    if (site_count < 1 || sizes.size() != static_cast<std::size_t>(site_count)) {
        throw MalformedSpec("field: alphabet_sizes length must equal site_count");
    }
    try {
        return FieldSpec(std::move(sizes));
    } catch (const MalformedSpec& e) {
        throw MalformedSpec(std::string("field: ") + e.what());
    }
}

ConstraintSet parse_constraints(const json* j, const FieldSpec& field) {
    if (j == nullptr) return ConstraintSet{};
    require_array(*j, "constraints");
    std::vector<Constraint> parsed;
    for (std::size_t i = 0; i < j->size(); ++i) {
        const std::string where = "constraints[" + std::to_string(i) + "]";
        const json& c = require_object((*j)[i], where);
        const std::string kind = require_string(require_key(c, "kind", where), where + ".kind");
        if (kind == "forbidden_window") {
            reject_unknown_keys(c, {"kind", "sites", "labels"}, where);
            ForbiddenWindow w;
            w.sites = int_array(require_key(c, "sites", where), where + ".sites");
            w.labels = label_array(require_key(c, "labels", where), where + ".labels");
            parsed.emplace_back(std::move(w));
        } else if (kind == "count") {
            reject_unknown_keys(c, {"kind", "label", "comparator", "bound"}, where);
            CountConstraint cc;
            cc.label = static_cast<Label>(require_int(require_key(c, "label", where), where + ".label"));
            const std::string cmp =
                require_string(require_key(c, "comparator", where), where + ".comparator");
            if (cmp == "eq") cc.cmp = Cmp::Eq;
            else if (cmp == "le") cc.cmp = Cmp::Le;
            else if (cmp == "ge") cc.cmp = Cmp::Ge;
            else throw MalformedSpec(where + ".comparator: expected one of eq, le, ge");
            cc.bound = require_int(require_key(c, "bound", where), where + ".bound");
            parsed.emplace_back(cc);
        } else if (kind == "allow_list" || kind == "deny_list") {
            reject_unknown_keys(c, {"kind", "patterns"}, where);
            const json& pats = require_array(require_key(c, "patterns", where), where + ".patterns");
            std::vector<Pattern> patterns;
            patterns.reserve(pats.size());
            for (std::size_t k = 0; k < pats.size(); ++k) {
                patterns.push_back(
                    label_array(pats[k], where + ".patterns[" + std::to_string(k) + "]"));
            }
            if (kind == "allow_list") parsed.emplace_back(AllowList{std::move(patterns)});
            else parsed.emplace_back(DenyList{std::move(patterns)});
        } else {
            throw MalformedSpec(where + ".kind: unknown constraint kind '" + kind + "'");
        }
    }
    try {
        return ConstraintSet(std::move(parsed), field);
    } catch (const MalformedSpec& e) {
        throw MalformedSpec(std::string("constraints: ") + e.what());
    }
}

GibbsSpec parse_gibbs(const json& j, const FieldSpec& field) {
    require_object(j, "gibbs");
    reject_unknown_keys(j, {"cliques"}, "gibbs");
    const json& cliques = require_array(require_key(j, "cliques", "gibbs"), "gibbs.cliques");
    std::vector<PotentialTable> tables;
    tables.reserve(cliques.size());
    for (std::size_t i = 0; i < cliques.size(); ++i) {
        const std::string where = "gibbs.cliques[" + std::to_string(i) + "]";
        const json& c = require_object(cliques[i], where);
        reject_unknown_keys(c, {"sites", "values"}, where);
        std::vector<int> sites = int_array(require_key(c, "sites", where), where + ".sites");
        if (!std::is_sorted(sites.begin(), sites.end()) ||
            std::adjacent_find(sites.begin(), sites.end()) != sites.end()) {
            throw MalformedSpec(where + ".sites: sites must be strictly ascending");
        }
        for (int s : sites) {
            if (s < 0 || s >= field.site_count()) {
                throw MalformedSpec(where + ".sites: site " + std::to_string(s) + " out of range");
            }
        }
        std::size_t expected = 1;
        for (int s : sites) expected *= static_cast<std::size_t>(field.alphabet_size(s));
        const json& values = require_array(require_key(c, "values", where), where + ".values");
        std::vector<double> table(expected);
        std::vector<bool> seen(expected, false);
        for (std::size_t k = 0; k < values.size(); ++k) {
            const std::string vwhere = where + ".values[" + std::to_string(k) + "]";
            const json& entry = require_object(values[k], vwhere);
            reject_unknown_keys(entry, {"labels", "value"}, vwhere);
            const Pattern labels = label_array(require_key(entry, "labels", vwhere), vwhere + ".labels");
            if (labels.size() != sites.size()) {
                throw MalformedSpec(vwhere + ".labels: expected one label per clique site");
            }
            std::size_t rank = 0;
            for (std::size_t t = 0; t < sites.size(); ++t) {
                const int m = field.alphabet_size(sites[t]);
                if (labels[t] < 0 || labels[t] >= m) {
                    throw MalformedSpec(vwhere + ".labels: label out of range at site " +
                                        std::to_string(sites[t]));
                }
                rank = rank * static_cast<std::size_t>(m) + static_cast<std::size_t>(labels[t]);
            }
            if (seen[rank]) {
                throw MalformedSpec(vwhere + ": duplicate label assignment for this clique");
            }
            seen[rank] = true;
            table[rank] = require_number(require_key(entry, "value", vwhere), vwhere + ".value");
        }
        if (values.size() != expected) {
            std::ostringstream clique_name;
            clique_name << "{";
            for (std::size_t t = 0; t < sites.size(); ++t) {
                clique_name << (t ? "," : "") << sites[t];
            }
            clique_name << "}";
            throw MalformedSpec(where + ": potential table for clique " + clique_name.str() +
                                " has " + std::to_string(values.size()) + " assignments, expected " +
                                std::to_string(expected));
        }
        try {
            tables.emplace_back(Clique(std::move(sites)), std::move(table), field);
        } catch (const MalformedSpec& e) {
            throw MalformedSpec(where + ": " + e.what());
        }
    }
    try {
        return GibbsSpec(field, std::move(tables));
    } catch (const MalformedSpec& e) {
        throw MalformedSpec(std::string("gibbs: ") + e.what());
    }
}

struct RankedValues {
    std::vector<std::uint64_t> ranks;
    std::vector<double> values;
};

RankedValues parse_ranked_entries(const json& j, const FieldSpec& field, const char* section,
                                  const char* value_key) {
    const std::string base = section;
    require_object(j, base);
    reject_unknown_keys(j, {"entries"}, base);
    const json& entries = require_array(require_key(j, "entries", base), base + ".entries");
    std::vector<std::pair<std::uint64_t, double>> pairs;
    pairs.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string where = base + ".entries[" + std::to_string(i) + "]";
        const json& e = require_object(entries[i], where);
        reject_unknown_keys(e, {"rank", value_key}, where);
        const std::uint64_t rank = require_rank(require_key(e, "rank", where), where + ".rank");
        if (field.pattern_count_overflowed() || rank >= field.pattern_count()) {
            throw MalformedSpec(where + ".rank: " + std::to_string(rank) + " out of range");
        }
        const double value =
            require_number(require_key(e, value_key, where), where + "." + value_key);
        pairs.emplace_back(rank, value);
    }
    std::sort(pairs.begin(), pairs.end());
    RankedValues out;
    out.ranks.reserve(pairs.size());
    out.values.reserve(pairs.size());
    for (const auto& [rank, value] : pairs) {
        if (!out.ranks.empty() && out.ranks.back() == rank) {
            throw MalformedSpec(base + ".entries: duplicate rank " + std::to_string(rank));
        }
        out.ranks.push_back(rank);
        out.values.push_back(value);
    }
    return out;
}

std::vector<std::uint64_t> support_ranks(const Support& s) {
    std::vector<std::uint64_t> ranks;
    ranks.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) ranks.push_back(s.rank(i));
    return ranks;
}

EnergyTable parse_energy(const json& j, const FieldSpec& field, const SupportPtr& support) {
    RankedValues rv = parse_ranked_entries(j, field, "energy", "value");
    SupportPtr target;
    if (!field.pattern_count_overflowed() &&
        rv.ranks.size() == field.pattern_count()) {
        target = std::make_shared<Support>(Support::full(field));
    } else if (rv.ranks == support_ranks(*support)) {
        target = support;
    } else {
        throw MalformedSpec(
            "energy.entries: ranks must cover exactly the whole field or exactly the "
            "constraint support");
    }
    try {
        return EnergyTable(std::move(target), std::move(rv.values));
    } catch (const MalformedSpec& e) {
        throw MalformedSpec(std::string("energy: ") + e.what());
    }
}

LocalConditionalTable parse_conditionals(const json& j, const FieldSpec& field,
                                         const ConstraintSet& cs, const Support& support) {
    require_object(j, "conditionals");
    reject_unknown_keys(j, {"keyed_by", "neighborhoods", "entries"}, "conditionals");

    ConditionalKeying keying = ConditionalKeying::FullComplement;
    if (const auto it = j.find("keyed_by"); it != j.end()) {
        const std::string s = require_string(*it, "conditionals.keyed_by");
        if (s == "full_complement") keying = ConditionalKeying::FullComplement;
        else if (s == "neighborhood") keying = ConditionalKeying::Neighborhood;
        else throw MalformedSpec("conditionals.keyed_by: expected full_complement or neighborhood");
    }

    const int n = field.site_count();
    NeighborhoodSystem eta = NeighborhoodSystem::full_complement(n);
    if (const auto it = j.find("neighborhoods"); it != j.end()) {
        const json& arr = require_array(*it, "conditionals.neighborhoods");
        if (arr.size() != static_cast<std::size_t>(n)) {
            throw MalformedSpec("conditionals.neighborhoods: expected one neighbor list per site");
        }
        std::vector<std::vector<int>> neighbors;
        neighbors.reserve(arr.size());
        for (std::size_t l = 0; l < arr.size(); ++l) {
            neighbors.push_back(
                int_array(arr[l], "conditionals.neighborhoods[" + std::to_string(l) + "]"));
        }
        try {
            eta = NeighborhoodSystem(std::move(neighbors));
        } catch (const MalformedSpec& e) {
            throw MalformedSpec(std::string("conditionals.neighborhoods: ") + e.what());
        }
    } else if (keying == ConditionalKeying::Neighborhood) {
        throw MalformedSpec("conditionals: keyed_by neighborhood requires a neighborhoods key");
    }

    // Recreate the per-site key-site lists the table will use.
    std::vector<std::vector<int>> key_sites(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        if (keying == ConditionalKeying::Neighborhood) {
            key_sites[static_cast<std::size_t>(l)] = eta.neighbors(l);
        } else {
            for (int s = 0; s < n; ++s) {
                if (s != l) key_sites[static_cast<std::size_t>(l)].push_back(s);
            }
        }
    }

    const json& entries = require_array(require_key(j, "entries", "conditionals"), "conditionals.entries");
    std::vector<LocalConditionalTable::SiteEntries> site_entries(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string where = "conditionals.entries[" + std::to_string(i) + "]";
        const json& e = require_object(entries[i], where);
        reject_unknown_keys(e, {"site", "boundary", "probs"}, where);
        const int site = require_int(require_key(e, "site", where), where + ".site");
        if (site < 0 || site >= n) {
            throw MalformedSpec(where + ".site: out of range");
        }
        const auto& ks = key_sites[static_cast<std::size_t>(site)];
        const Pattern boundary = label_array(require_key(e, "boundary", where), where + ".boundary");
        if (boundary.size() != ks.size()) {
            throw MalformedSpec(where + ".boundary: expected " + std::to_string(ks.size()) +
                                " labels (one per key site of site " + std::to_string(site) + ")");
        }
        std::uint64_t key = 0;
        for (std::size_t t = 0; t < ks.size(); ++t) {
            const int m = field.alphabet_size(ks[t]);
            if (boundary[t] < 0 || boundary[t] >= m) {
                throw MalformedSpec(where + ".boundary: label out of range at site " +
                                    std::to_string(ks[t]));
            }
            key = key * static_cast<std::uint64_t>(m) + static_cast<std::uint64_t>(boundary[t]);
        }
        const json& probs_json = require_array(require_key(e, "probs", where), where + ".probs");
        std::vector<double> probs;
        probs.reserve(probs_json.size());
        for (std::size_t k = 0; k < probs_json.size(); ++k) {
            probs.push_back(
                require_number(probs_json[k], where + ".probs[" + std::to_string(k) + "]"));
        }
        if (!site_entries[static_cast<std::size_t>(site)].emplace(key, std::move(probs)).second) {
            throw MalformedSpec(where + ": duplicate (site, boundary) entry");
        }
    }

    std::optional<LocalConditionalTable> table;
    try {
        table.emplace(field, cs, std::move(eta), keying, std::move(site_entries));
    } catch (const MalformedSpec& e) {
        throw MalformedSpec(std::string("conditionals: ") + e.what());
    }

    // Coverage and positivity on every realized (site, boundary).
    for (std::size_t i = 0; i < support.size(); ++i) {
        const Pattern& x = support.member(i);
        for (int l = 0; l < n; ++l) {
            const std::vector<double>* dist = table->find(l, x);
            if (dist == nullptr) {
                throw MalformedSpec("conditionals: no entry for site " + std::to_string(l) +
                                    " and the boundary of support pattern with rank " +
                                    std::to_string(support.rank(i)));
            }
            if (!((*dist)[static_cast<std::size_t>(x[static_cast<std::size_t>(l)])] > 0.0)) {
                throw MalformedSpec("conditionals: support pattern with rank " +
                                    std::to_string(support.rank(i)) +
                                    " has zero conditional probability at site " + std::to_string(l));
            }
        }
    }
    return std::move(*table);
}

constexpr double kJointSumTol = 1e-9;

} // namespace

SpecDocument parse_spec(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw MalformedSpec(std::string("document is not valid JSON: ") + e.what());
    }
    require_object(root, "document");
    reject_unknown_keys(root,
                        {"format_version", "field", "constraints", "gibbs", "energy",
                         "conditionals", "joint"},
                        "document");

    const int version =
        require_int(require_key(root, "format_version", "document"), "format_version");
    if (version != 1) {
        throw MalformedSpec("format_version: unsupported version " + std::to_string(version));
    }

    FieldSpec field = parse_field(require_key(root, "field", "document"));
    const auto constraints_it = root.find("constraints");
    ConstraintSet cs =
        parse_constraints(constraints_it == root.end() ? nullptr : &*constraints_it, field);
    auto support = std::make_shared<Support>(Support::build(field, cs));

    int model_sections = 0;
    for (const char* key : {"gibbs", "energy", "conditionals", "joint"}) {
        if (root.contains(key)) ++model_sections;
    }
    if (model_sections != 1) {
        throw MalformedSpec(
            "document must contain exactly one model section (gibbs | energy | conditionals | "
            "joint), found " +
            std::to_string(model_sections));
    }

    if (root.contains("gibbs")) {
        GibbsSpec g = parse_gibbs(root["gibbs"], field);
        return SpecDocument{version,          std::move(field), std::move(cs), std::move(support),
                            ModelKind::Gibbs, std::move(g),     std::nullopt,  std::nullopt,
                            std::nullopt,     {}};
    }
    if (root.contains("energy")) {
        EnergyTable u = parse_energy(root["energy"], field, support);
        return SpecDocument{version,      std::move(field), std::move(cs), std::move(support),
                            ModelKind::Energy, std::nullopt, std::move(u),  std::nullopt,
                            std::nullopt, {}};
    }
    if (root.contains("conditionals")) {
        LocalConditionalTable t = parse_conditionals(root["conditionals"], field, cs, *support);
        return SpecDocument{version,      std::move(field), std::move(cs), std::move(support),
                            ModelKind::Conditionals, std::nullopt, std::nullopt, std::move(t),
                            std::nullopt, {}};
    }

    RankedValues rv = parse_ranked_entries(root["joint"], field, "joint", "probability");
    if (rv.ranks != support_ranks(*support)) {
        throw MalformedSpec("joint.entries: ranks must cover exactly the constraint support");
    }
    double sum = 0.0;
    for (double p : rv.values) {
        if (!(p > 0.0)) {
            throw MalformedSpec("joint.entries: probabilities must be strictly positive");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kJointSumTol) {
        std::ostringstream msg;
        msg << "joint.entries: probabilities sum to " << sum << ", expected 1";
        throw MalformedSpec(msg.str());
    }
    JointDistribution d = JointDistribution::from_probabilities(support, rv.values);
    return SpecDocument{version,      std::move(field),  std::move(cs), std::move(support),
                        ModelKind::Joint, std::nullopt,  std::nullopt,  std::nullopt,
                        std::move(d), std::move(rv.values)};
}

SpecDocument load_spec_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw MalformedSpec("cannot open spec file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_spec(buffer.str());
}

std::string serialize_spec(const SpecDocument& doc) {
    ordered_json root;
    root["format_version"] = doc.format_version;
    root["field"] = {{"site_count", doc.field.site_count()},
                     {"alphabet_sizes", doc.field.alphabet_sizes()}};

    ordered_json constraints = ordered_json::array();
    for (const auto& c : doc.constraints.constraints()) {
        ordered_json jc;
        std::visit(
            [&](const auto& concrete) {
                using T = std::decay_t<decltype(concrete)>;
                if constexpr (std::is_same_v<T, ForbiddenWindow>) {
                    jc["kind"] = "forbidden_window";
                    jc["sites"] = concrete.sites;
                    jc["labels"] = concrete.labels;
                } else if constexpr (std::is_same_v<T, CountConstraint>) {
                    jc["kind"] = "count";
                    jc["label"] = concrete.label;
                    jc["comparator"] = concrete.cmp == Cmp::Eq   ? "eq"
                                       : concrete.cmp == Cmp::Le ? "le"
                                                                 : "ge";
                    jc["bound"] = concrete.bound;
                } else if constexpr (std::is_same_v<T, AllowList>) {
                    jc["kind"] = "allow_list";
                    jc["patterns"] = concrete.patterns;
                } else {
                    jc["kind"] = "deny_list";
                    jc["patterns"] = concrete.patterns;
                }
            },
            c);
        constraints.push_back(std::move(jc));
    }
    root["constraints"] = std::move(constraints);

    switch (doc.kind) {
    case ModelKind::Gibbs: {
        ordered_json cliques = ordered_json::array();
        for (const auto& p : doc.gibbs->potentials()) {
            ordered_json values = ordered_json::array();
            for (std::size_t a = 0; a < p.assignment_count(); ++a) {
                values.push_back({{"labels", p.assignment_at(a)}, {"value", p.values()[a]}});
            }
            cliques.push_back({{"sites", p.clique()}, {"values", std::move(values)}});
        }
        root["gibbs"] = {{"cliques", std::move(cliques)}};
        break;
    }
    case ModelKind::Energy: {
        ordered_json entries = ordered_json::array();
        const Support& s = doc.energy->support();
        for (std::size_t i = 0; i < s.size(); ++i) {
            entries.push_back({{"rank", s.rank(i)}, {"value", doc.energy->at(i)}});
        }
        root["energy"] = {{"entries", std::move(entries)}};
        break;
    }
    case ModelKind::Conditionals: {
        const LocalConditionalTable& t = *doc.conditionals;
        ordered_json section;
        section["keyed_by"] = t.keying() == ConditionalKeying::FullComplement ? "full_complement"
                                                                              : "neighborhood";
        section["neighborhoods"] = t.eta().all();
        ordered_json entries = ordered_json::array();
        for (int l = 0; l < t.field().site_count(); ++l) {
            const auto& ks = t.key_sites(l);
            for (const auto& [key, probs] : t.entries()[static_cast<std::size_t>(l)]) {
                // Decode the mixed-radix key back into boundary labels.
                std::vector<int> boundary(ks.size());
                std::uint64_t rest = key;
                for (std::size_t k = ks.size(); k-- > 0;) {
                    const auto m = static_cast<std::uint64_t>(t.field().alphabet_size(ks[k]));
                    boundary[k] = static_cast<int>(rest % m);
                    rest /= m;
                }
                entries.push_back({{"site", l}, {"boundary", boundary}, {"probs", probs}});
            }
        }
        section["entries"] = std::move(entries);
        root["conditionals"] = std::move(section);
        break;
    }
    case ModelKind::Joint: {
        ordered_json entries = ordered_json::array();
        const Support& s = doc.joint->support();
        for (std::size_t i = 0; i < s.size(); ++i) {
            entries.push_back({{"rank", s.rank(i)}, {"probability", doc.joint_probabilities[i]}});
        }
        root["joint"] = {{"entries", std::move(entries)}};
        break;
    }
    }
    return root.dump(2) + "\n";
}

} // namespace cmrf
