#include "cmrf/cli.hpp"

#include <cmath>
#include <iomanip>
#include <optional>
#include <sstream>
#include <variant>

#include "CLI11.hpp"
#include "json.hpp"

#include "cmrf/checker.hpp"
#include "cmrf/errors.hpp"
#include "cmrf/sampler.hpp"
#include "cmrf/spec_io.hpp"

namespace cmrf {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kCheckRoundTripTol = 1e-9;
constexpr double kCheckExactTol = 1e-12;

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

std::string labels_to_string(const Pattern& x) {
    std::ostringstream os;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) os << ' ';
        os << x[i];
    }
    return os.str();
}

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::Gibbs: return "gibbs";
    case ModelKind::Energy: return "energy";
    case ModelKind::Conditionals: return "conditionals";
    case ModelKind::Joint: return "joint";
    }
    return "?";
}

// The joint over C implied by the document's model section, with the
// Gibbs normalizer and, when the model covers the whole field, P(C).
struct ResolvedJoint {
    JointDistribution joint;
    double log_k = 0.0;
    std::optional<double> p_c;
};

std::variant<ResolvedJoint, NonIdentifiable, InconsistentConditionals> resolve_joint(
    const SpecDocument& doc, const std::optional<std::vector<double>>& masses) {
    if (masses && doc.kind != ModelKind::Conditionals) {
        throw MalformedSpec("--component-masses applies only to a conditionals model");
    }
    switch (doc.kind) {
    case ModelKind::Gibbs: {
        const EnergyJointResult constrained =
            joint_from_energy(energy_table(*doc.gibbs, doc.support), ConstraintSet{});
        auto full_support = std::make_shared<Support>(Support::full(doc.field));
        const EnergyJointResult full =
            joint_from_energy(energy_table(*doc.gibbs, std::move(full_support)), ConstraintSet{});
        const double p_c = probability_of_constraint(full.joint, doc.constraints);
        return ResolvedJoint{constrained.joint, constrained.log_k, p_c};
    }
    case ModelKind::Energy: {
        if (doc.energy->covers_full_space()) {
            const EnergyJointResult constrained = joint_from_energy(*doc.energy, doc.constraints);
            const EnergyJointResult full = joint_from_energy(*doc.energy, ConstraintSet{});
            const double p_c = probability_of_constraint(full.joint, doc.constraints);
            return ResolvedJoint{constrained.joint, constrained.log_k, p_c};
        }
        const EnergyJointResult constrained = joint_from_energy(*doc.energy, ConstraintSet{});
        return ResolvedJoint{constrained.joint, constrained.log_k, std::nullopt};
    }
    case ModelKind::Joint: {
        std::optional<double> p_c;
        if (doc.joint->support().covers_full_space()) {
            p_c = probability_of_constraint(*doc.joint, doc.constraints);
        }
        // Canonical gauge: U vanishes on the first member, so k = P(first).
        return ResolvedJoint{*doc.joint, doc.joint->log_prob(0), p_c};
    }
    case ModelKind::Conditionals: {
        ReconstructionResult rec =
            joint_from_local_conditionals(*doc.conditionals, doc.support, masses);
        if (auto* ni = std::get_if<NonIdentifiable>(&rec)) return std::move(*ni);
        if (auto* ic = std::get_if<InconsistentConditionals>(&rec)) return std::move(*ic);
        JointDistribution joint = std::move(std::get<JointDistribution>(rec));
        const double log_k = joint.log_prob(0);
        return ResolvedJoint{std::move(joint), log_k, std::nullopt};
    }
    }
    throw MalformedSpec("unreachable model kind");
}

// A potential model equivalent to the document when one exists: the gibbs
// section itself, or the canonical decomposition of a full-field energy
// or joint.
std::optional<GibbsSpec> resolve_gibbs(const SpecDocument& doc) {
    switch (doc.kind) {
    case ModelKind::Gibbs:
        return doc.gibbs;
    case ModelKind::Energy:
        if (doc.energy->covers_full_space()) return canonical_potentials(*doc.energy);
        return std::nullopt;
    case ModelKind::Joint:
        if (doc.joint->support().covers_full_space()) {
            return canonical_potentials(energy_from_joint(*doc.joint));
        }
        return std::nullopt;
    case ModelKind::Conditionals: {
        ReconstructionResult rec = joint_from_local_conditionals(*doc.conditionals, doc.support);
        if (const auto* j = std::get_if<JointDistribution>(&rec)) {
            if (j->support().covers_full_space()) {
                return canonical_potentials(energy_from_joint(*j));
            }
        }
        return std::nullopt;
    }
    }
    return std::nullopt;
}

int report_reconstruction_failure(
    const std::variant<ResolvedJoint, NonIdentifiable, InconsistentConditionals>& r,
    std::ostream& err) {
    if (const auto* ni = std::get_if<NonIdentifiable>(&r)) {
        err << "error: conditionals determine the joint only within flip-graph components ("
            << ni->component_count << " components); pass --component-masses to fix the scale\n";
        for (std::size_t c = 0; c < ni->components.size(); ++c) {
            err << "  component " << c << ": " << ni->components[c].size() << " patterns\n";
        }
        return 1;
    }
    const auto& ic = std::get<InconsistentConditionals>(r);
    err << "error: conditionals are cyclically inconsistent (worst residual "
        << fmt(ic.worst_residual) << ")\n";
    return 1;
}

int cmd_info(const SpecDocument& doc, bool as_json, std::ostream& out) {
    const FlipGraph fg = flip_graph(*doc.support);
    if (as_json) {
        ordered_json j;
        j["format_version"] = doc.format_version;
        j["site_count"] = doc.field.site_count();
        j["alphabet_sizes"] = doc.field.alphabet_sizes();
        j["model"] = model_kind_name(doc.kind);
        j["pattern_count"] = doc.field.pattern_count();
        j["support_size"] = doc.support->size();
        j["flip_graph_edges"] = fg.edges.size();
        j["flip_graph_components"] = fg.component_count;
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "key\tvalue\n";
    out << "format_version\t" << doc.format_version << "\n";
    out << "site_count\t" << doc.field.site_count() << "\n";
    std::ostringstream sizes;
    for (std::size_t i = 0; i < doc.field.alphabet_sizes().size(); ++i) {
        if (i) sizes << ' ';
        sizes << doc.field.alphabet_sizes()[i];
    }
    out << "alphabet_sizes\t" << sizes.str() << "\n";
    out << "model\t" << model_kind_name(doc.kind) << "\n";
    out << "pattern_count\t" << doc.field.pattern_count() << "\n";
    out << "support_size\t" << doc.support->size() << "\n";
    out << "flip_graph_edges\t" << fg.edges.size() << "\n";
    out << "flip_graph_components\t" << fg.component_count << "\n";
    return 0;
}

int cmd_support(const SpecDocument& doc, bool as_json, std::ostream& out) {
    const Support& s = *doc.support;
    if (as_json) {
        ordered_json members = ordered_json::array();
        for (std::size_t i = 0; i < s.size(); ++i) {
            members.push_back({{"index", i}, {"rank", s.rank(i)}, {"labels", s.member(i)}});
        }
        out << ordered_json{{"support", std::move(members)}}.dump(2) << "\n";
        return 0;
    }
    out << "index\trank\tlabels\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << i << "\t" << s.rank(i) << "\t" << labels_to_string(s.member(i)) << "\n";
    }
    return 0;
}

int cmd_joint(const SpecDocument& doc, const std::optional<std::vector<double>>& masses,
              bool as_json, std::ostream& out, std::ostream& err) {
    const auto resolved = resolve_joint(doc, masses);
    if (!std::holds_alternative<ResolvedJoint>(resolved)) {
        return report_reconstruction_failure(resolved, err);
    }
    const ResolvedJoint& r = std::get<ResolvedJoint>(resolved);
    const Support& s = r.joint.support();
    if (as_json) {
        ordered_json j;
        j["ln_k"] = r.log_k;
        if (r.p_c) j["P_C"] = *r.p_c;
        ordered_json entries = ordered_json::array();
        for (std::size_t i = 0; i < r.joint.size(); ++i) {
            entries.push_back({{"index", i},
                               {"rank", s.rank(i)},
                               {"labels", s.member(i)},
                               {"probability", r.joint.prob(i)},
                               {"log_probability", r.joint.log_prob(i)}});
        }
        j["joint"] = std::move(entries);
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "# ln_k " << fmt(r.log_k) << "\n";
    if (r.p_c) out << "# P_C " << fmt(*r.p_c) << "\n";
    out << "index\trank\tlabels\tprobability\tlog_probability\n";
    for (std::size_t i = 0; i < r.joint.size(); ++i) {
        out << i << "\t" << s.rank(i) << "\t" << labels_to_string(s.member(i)) << "\t"
            << fmt(r.joint.prob(i)) << "\t" << fmt(r.joint.log_prob(i)) << "\n";
    }
    return 0;
}

int cmd_decompose(const SpecDocument& doc, bool as_json, std::ostream& out) {
    std::optional<GibbsSpec> g = resolve_gibbs(doc);
    if (!g) {
        throw MalformedSpec(
            "decompose requires a potential model: a gibbs section or a full-field energy/joint");
    }
    // Decompose the induced energy rather than echoing input tables, so
    // the output is canonical for every accepted model kind.
    auto full_support = std::make_shared<Support>(Support::full(doc.field));
    const GibbsSpec canonical = canonical_potentials(energy_table(*g, std::move(full_support)));
    const CliqueSet minimal = minimal_clique_set(canonical);
    const NeighborhoodSystem eta = neighborhood_from_cliques(minimal, doc.field.site_count());

    if (as_json) {
        ordered_json j;
        ordered_json cliques = ordered_json::array();
        for (const auto& c : minimal.cliques()) cliques.push_back(c);
        j["minimal_cliques"] = std::move(cliques);
        j["neighborhoods"] = eta.all();
        ordered_json tables = ordered_json::array();
        for (const auto& p : canonical.potentials()) {
            if (!std::binary_search(minimal.cliques().begin(), minimal.cliques().end(), p.clique(),
                                    [](const Clique& a, const Clique& b) {
                                        if (a.size() != b.size()) return a.size() < b.size();
                                        return a < b;
                                    })) {
                continue;
            }
            ordered_json values = ordered_json::array();
            for (std::size_t a = 0; a < p.assignment_count(); ++a) {
                values.push_back({{"labels", p.assignment_at(a)}, {"value", p.values()[a]}});
            }
            tables.push_back({{"sites", p.clique()}, {"values", std::move(values)}});
        }
        j["potentials"] = std::move(tables);
        out << j.dump(2) << "\n";
        return 0;
    }

    out << "# minimal_clique_count " << minimal.size() << "\n";
    for (int l = 0; l < doc.field.site_count(); ++l) {
        out << "# eta_" << l;
        for (int s : eta.neighbors(l)) out << " " << s;
        out << "\n";
    }
    out << "clique\tlabels\tvalue\n";
    for (const auto& p : canonical.potentials()) {
        bool is_minimal = false;
        for (const auto& c : minimal.cliques()) {
            if (c == p.clique()) {
                is_minimal = true;
                break;
            }
        }
        if (!is_minimal) continue;
        std::ostringstream cname;
        for (std::size_t k = 0; k < p.clique().size(); ++k) {
            if (k) cname << ',';
            cname << p.clique()[k];
        }
        for (std::size_t a = 0; a < p.assignment_count(); ++a) {
            std::ostringstream labels;
            const auto assignment = p.assignment_at(a);
            for (std::size_t k = 0; k < assignment.size(); ++k) {
                if (k) labels << ' ';
                labels << assignment[k];
            }
            out << cname.str() << "\t" << labels.str() << "\t" << fmt(p.values()[a]) << "\n";
        }
    }
    return 0;
}

struct CheckRow {
    std::string name;
    std::string status; // PASS | FAIL | SKIP
    std::string worst;
    std::string detail;
};

int cmd_check(const SpecDocument& doc, bool as_json, std::ostream& out) {
    std::vector<CheckRow> rows;
    bool any_fail = false;

    const std::optional<GibbsSpec> g = resolve_gibbs(doc);

    if (g) {
        const GrfToMrfReport r = verify_grf_to_mrf(*g, doc.constraints, kCheckRoundTripTol);
        std::ostringstream detail;
        if (!r.markovianity.pass && r.markovianity.witness) {
            const auto& w = *r.markovianity.witness;
            detail << "markovianity: site " << w.site << " label " << w.label << " patterns ["
                   << labels_to_string(w.pattern_a) << "] vs [" << labels_to_string(w.pattern_b)
                   << "]";
        } else if (r.worst_localization_deviation > kCheckRoundTripTol && r.localization_witness) {
            const auto& w = *r.localization_witness;
            detail << "localization: site " << w.site << " label " << w.label << " boundary ["
                   << labels_to_string(w.boundary) << "]";
        }
        rows.push_back(CheckRow{
            "grf_to_mrf", r.pass ? "PASS" : "FAIL",
            fmt(std::max(r.markovianity.worst_deviation, r.worst_localization_deviation)),
            detail.str()});
        any_fail |= !r.pass;
    } else {
        rows.push_back(CheckRow{"grf_to_mrf", "SKIP", "-", "requires a potential model"});
    }

    // Reconstruction check: from the document's own conditionals when that
    // is the model, otherwise from conditionals extracted from the joint.
    std::optional<JointDistribution> joint;
    {
        const auto resolved = resolve_joint(doc, std::nullopt);
        if (const auto* rj = std::get_if<ResolvedJoint>(&resolved)) joint = rj->joint;
    }
    {
        std::optional<MrfToGrfReport> r;
        if (doc.kind == ModelKind::Conditionals) {
            r = verify_mrf_to_grf(*doc.conditionals, doc.support, kCheckRoundTripTol);
        } else if (joint) {
            const LocalConditionalTable extracted =
                local_conditionals_from_joint(*joint, std::nullopt, doc.constraints);
            r = verify_mrf_to_grf(extracted, joint->support_ptr(), kCheckRoundTripTol);
        }
        if (r) {
            std::ostringstream detail;
            if (const auto* ni = std::get_if<NonIdentifiable>(&r->reconstruction)) {
                detail << "flip graph has " << ni->component_count
                       << " components; joint not determined by conditionals";
            } else if (const auto* ic = std::get_if<InconsistentConditionals>(&r->reconstruction)) {
                detail << "cycle residual " << fmt(ic->worst_residual) << " over "
                       << ic->witness_cycle.size() - 1 << " patterns";
            }
            rows.push_back(CheckRow{"mrf_to_grf", r->pass ? "PASS" : "FAIL",
                                    fmt(r->worst_rebuild_deviation), detail.str()});
            any_fail |= !r->pass;
        } else {
            rows.push_back(CheckRow{"mrf_to_grf", "SKIP", "-", "no joint available"});
        }
    }

    if (g) {
        auto full_support = std::make_shared<Support>(Support::full(doc.field));
        const JointDistribution full =
            joint_from_energy(energy_table(*g, std::move(full_support)), ConstraintSet{}).joint;
        const RatioInvarianceReport r =
            verify_ratio_invariance(full, doc.constraints, kCheckExactTol);
        std::ostringstream detail;
        if (!r.pass && r.witness) {
            detail << "patterns [" << labels_to_string(r.witness->first) << "] vs ["
                   << labels_to_string(r.witness->second) << "]";
        }
        rows.push_back(CheckRow{"ratio_invariance", r.pass ? "PASS" : "FAIL",
                                fmt(r.worst_relative_error), detail.str()});
        any_fail |= !r.pass;
    } else {
        rows.push_back(CheckRow{"ratio_invariance", "SKIP", "-", "requires a full-field model"});
    }

    if (joint) {
        const PositivityGibbsFormReport r = verify_positivity_gibbs_form(*joint, kCheckExactTol);
        rows.push_back(CheckRow{"positivity_gibbs_form", r.pass ? "PASS" : "FAIL",
                                fmt(r.worst_deviation), r.pass ? "" : "rebuild mismatch"});
        any_fail |= !r.pass;
    } else {
        rows.push_back(CheckRow{"positivity_gibbs_form", "SKIP", "-", "no joint available"});
    }

    if (as_json) {
        ordered_json checks = ordered_json::array();
        for (const auto& row : rows) {
            checks.push_back({{"check", row.name},
                              {"status", row.status},
                              {"worst", row.worst},
                              {"detail", row.detail}});
        }
        out << ordered_json{{"checks", std::move(checks)}, {"pass", !any_fail}}.dump(2) << "\n";
    } else {
        out << "check\tstatus\tworst\tdetail\n";
        for (const auto& row : rows) {
            out << row.name << "\t" << row.status << "\t" << row.worst << "\t" << row.detail
                << "\n";
        }
    }
    return any_fail ? 1 : 0;
}

int cmd_sample(const SpecDocument& doc, const std::string& method, std::size_t n,
               std::uint64_t seed, std::size_t burn_in,
               const std::optional<std::vector<double>>& masses,
               const std::optional<Pattern>& init, bool as_json, std::ostream& out,
               std::ostream& err) {
    std::vector<Pattern> samples;
    bool non_ergodic = false;
    if (method == "exact") {
        const auto resolved = resolve_joint(doc, masses);
        if (!std::holds_alternative<ResolvedJoint>(resolved)) {
            return report_reconstruction_failure(resolved, err);
        }
        samples = exact_sample(std::get<ResolvedJoint>(resolved).joint, seed, n);
    } else {
        const std::optional<GibbsSpec> g = resolve_gibbs(doc);
        if (!g) {
            throw MalformedSpec(
                "gibbs sampling requires a potential model: a gibbs section or a full-field "
                "energy/joint");
        }
        const Pattern start = init ? *init : doc.support->member(0);
        GibbsRunResult run = gibbs_run(*g, doc.constraints, start, seed, n + burn_in, burn_in);
        samples = std::move(run.samples);
        non_ergodic = run.non_ergodic;
        if (non_ergodic) {
            err << "warning: flip graph has " << run.component_count
                << " components; the chain cannot leave the initial pattern's component\n";
        }
    }

    if (as_json) {
        ordered_json j;
        j["method"] = method;
        j["seed"] = seed;
        if (method == "gibbs") {
            j["burn_in"] = burn_in;
            j["non_ergodic"] = non_ergodic;
        }
        ordered_json arr = ordered_json::array();
        for (const auto& x : samples) arr.push_back(x);
        j["samples"] = std::move(arr);
        out << j.dump(2) << "\n";
        return 0;
    }
    out << "# method " << method << "\n";
    out << "# seed " << seed << "\n";
    if (method == "gibbs") {
        out << "# burn_in " << burn_in << "\n";
        out << "# non_ergodic " << (non_ergodic ? "true" : "false") << "\n";
    }
    for (const auto& x : samples) out << labels_to_string(x) << "\n";
    return 0;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact Markov and Gibbs random fields with hard constraints"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string spec_path;
    std::string format = "tsv";
    std::optional<std::uint64_t> pattern_limit;
    app.add_option("--spec", spec_path, "path to a field-spec document")->required();
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"tsv", "json"}));
    app.add_option("--pattern-limit", pattern_limit,
                   "override the global pattern enumeration limit");

    CLI::App* info = app.add_subcommand("info", "field and model summary");
    CLI::App* support = app.add_subcommand("support", "list the constraint support");
    CLI::App* joint = app.add_subcommand("joint", "compute the joint distribution over the support");
    CLI::App* decompose =
        app.add_subcommand("decompose", "canonical potentials and minimal cliques");
    CLI::App* check = app.add_subcommand("check", "run the equivalence checks");
    CLI::App* sample = app.add_subcommand("sample", "draw samples from the model");

    std::vector<double> masses_arg;
    joint->add_option("--component-masses", masses_arg,
                      "per-component masses for a disconnected flip graph")
        ->delimiter(',');

    std::string method = "exact";
    std::uint64_t seed = 0;
    std::size_t n = 1;
    std::size_t burn_in = 0;
    std::vector<int> init_arg;
    std::vector<double> sample_masses_arg;
    sample->add_option("--method", method, "sampling method")
        ->check(CLI::IsMember({"exact", "gibbs"}));
    sample->add_option("--n", n, "number of samples")->required();
    sample->add_option("--seed", seed, "random seed")->required();
    sample->add_option("--burn-in", burn_in, "discarded leading sweeps (gibbs)");
    sample->add_option("--init", init_arg, "initial pattern labels (gibbs)")->delimiter(',');
    sample->add_option("--component-masses", sample_masses_arg,
                       "per-component masses for a disconnected flip graph (exact)")
        ->delimiter(',');

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    // The limit is process-global; restore it so embedded callers can issue
    // further commands unaffected.
    struct LimitRestore {
        std::uint64_t saved = guard::pattern_limit();
        ~LimitRestore() { guard::set_pattern_limit(saved); }
    } limit_restore;

    try {
        if (pattern_limit) guard::set_pattern_limit(*pattern_limit);
        const bool as_json = format == "json";
        const SpecDocument doc = load_spec_file(spec_path);

        if (info->parsed()) return cmd_info(doc, as_json, out);
        if (support->parsed()) return cmd_support(doc, as_json, out);
        if (joint->parsed()) {
            std::optional<std::vector<double>> masses;
            if (!masses_arg.empty()) masses = masses_arg;
            return cmd_joint(doc, masses, as_json, out, err);
        }
        if (decompose->parsed()) return cmd_decompose(doc, as_json, out);
        if (check->parsed()) return cmd_check(doc, as_json, out);
        if (sample->parsed()) {
            std::optional<std::vector<double>> masses;
            if (!sample_masses_arg.empty()) masses = sample_masses_arg;
            std::optional<Pattern> init;
            if (!init_arg.empty()) init = Pattern(init_arg.begin(), init_arg.end());
            return cmd_sample(doc, method, n, seed, burn_in, masses, init, as_json, out, err);
        }
        err << "error: no subcommand selected\n";
        return 2;
    } catch (const GuardExceeded& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const EmptySupport& e) {
        err << "error: EmptySupport: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace cmrf
