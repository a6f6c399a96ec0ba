#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

#include "cmrf/cli.hpp"

using namespace cmrf;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_command(args, out, err);
    return {code, out.str(), err.str()};
}

std::string write_doc(const std::string& name, const std::string& text) {
    const std::string path = "/tmp/cmrf_cli_" + name + ".json";
    std::ofstream f(path);
    f << text;
    return path;
}

bool mentions(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

std::size_t line_count(const std::string& text) {
    std::size_t lines = 0;
    for (char c : text) {
        if (c == '\n') ++lines;
    }
    return lines;
}

// Matches the CLI's numeric formatting.
std::string sig12(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

const char* kZeroEnergyOverC = R"({
  "format_version": 1,
  "field": {"site_count": 3, "alphabet_sizes": [2, 2, 2]},
  "constraints": [
    {"kind": "forbidden_window", "sites": [0, 1], "labels": [1, 1]},
    {"kind": "forbidden_window", "sites": [1, 2], "labels": [1, 1]}
  ],
  "energy": {"entries": [
    {"rank": 0, "value": 0.0},
    {"rank": 1, "value": 0.0},
    {"rank": 2, "value": 0.0},
    {"rank": 4, "value": 0.0},
    {"rank": 5, "value": 0.0}
  ]}
})";

const char* kChainGibbs = R"({
  "format_version": 1,
  "field": {"site_count": 3, "alphabet_sizes": [2, 2, 2]},
  "constraints": [
    {"kind": "forbidden_window", "sites": [0, 1], "labels": [1, 1]},
    {"kind": "forbidden_window", "sites": [1, 2], "labels": [1, 1]}
  ],
  "gibbs": {"cliques": [
    {"sites": [0, 1], "values": [
      {"labels": [0, 0], "value": 0.0},
      {"labels": [0, 1], "value": 0.0},
      {"labels": [1, 0], "value": 0.0},
      {"labels": [1, 1], "value": 1.0}
    ]},
    {"sites": [1, 2], "values": [
      {"labels": [0, 0], "value": 0.0},
      {"labels": [0, 1], "value": 0.0},
      {"labels": [1, 0], "value": 0.0},
      {"labels": [1, 1], "value": 1.0}
    ]}
  ]}
})";

const char* kContradictory = R"({
  "format_version": 1,
  "field": {"site_count": 3, "alphabet_sizes": [2, 2, 2]},
  "constraints": [
    {"kind": "allow_list", "patterns": [[0, 0, 0]]},
    {"kind": "deny_list", "patterns": [[0, 0, 0]]}
  ],
  "gibbs": {"cliques": []}
})";

const char* kSkewedConditionals = R"({
  "format_version": 1,
  "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
  "conditionals": {"entries": [
    {"site": 0, "boundary": [0], "probs": [0.2325581395348837, 0.7674418604651163]},
    {"site": 0, "boundary": [1], "probs": [0.3333333333333333, 0.6666666666666667]},
    {"site": 1, "boundary": [0], "probs": [0.3333333333333333, 0.6666666666666667]},
    {"site": 1, "boundary": [1], "probs": [0.42857142857142855, 0.5714285714285714]}
  ]}
})";

const char* kSplitSupport = R"({
  "format_version": 1,
  "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
  "constraints": [{"kind": "allow_list", "patterns": [[0, 1], [1, 0]]}],
  "gibbs": {"cliques": []}
})";

const char* kProductJoint = R"({
  "format_version": 1,
  "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
  "joint": {"entries": [
    {"rank": 0, "probability": 0.36},
    {"rank": 1, "probability": 0.24},
    {"rank": 2, "probability": 0.24},
    {"rank": 3, "probability": 0.16}
  ]}
})";

} // namespace

TEST_CASE("joint over a constrained zero-energy model is uniform on the support") {
    const std::string path = write_doc("flat_energy", kZeroEnergyOverC);
    const CliResult r = run({"--spec", path, "joint"});
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    CHECK(mentions(r.out, "# ln_k " + sig12(-std::log(5.0))));
    CHECK_FALSE(mentions(r.out, "# P_C"));
    CHECK(mentions(r.out, "index\trank\tlabels\tprobability\tlog_probability"));
    // Five members, each at exactly the printed value 0.2.
    CHECK(line_count(r.out) == 7);
    CHECK(mentions(r.out, "0\t0\t0 0 0\t0.2\t"));
    CHECK(mentions(r.out, "4\t5\t1 0 1\t0.2\t"));
}

TEST_CASE("a full-field gibbs document reports the constraint probability") {
    const std::string path = write_doc("chain_gibbs", kChainGibbs);
    const CliResult r = run({"--spec", path, "joint"});
    CHECK(r.code == 0);
    // P(C) under the chain weights: every admissible pattern has zero
    // energy, so the admissible mass is exactly 5.
    const double z = 5.0 + 2.0 * std::exp(-1.0) + std::exp(-2.0);
    CHECK(mentions(r.out, "# P_C " + sig12(5.0 / z)));
}

TEST_CASE("contradictory constraints exit with code 2 naming EmptySupport") {
    const std::string path = write_doc("contradictory", kContradictory);
    const CliResult r = run({"--spec", path, "support"});
    CHECK(r.code == 2);
    CHECK(mentions(r.err, "EmptySupport"));
}

TEST_CASE("check passes all four rows for a consistent gibbs document") {
    const std::string path = write_doc("chain_check", kChainGibbs);
    const CliResult r = run({"--spec", path, "check"});
    CHECK(r.code == 0);
    CHECK(mentions(r.out, "grf_to_mrf\tPASS"));
    CHECK(mentions(r.out, "mrf_to_grf\tPASS"));
    CHECK(mentions(r.out, "ratio_invariance\tPASS"));
    CHECK(mentions(r.out, "positivity_gibbs_form\tPASS"));
}

TEST_CASE("check skips the full-field rows for a support-only energy") {
    const std::string path = write_doc("flat_energy_check", kZeroEnergyOverC);
    const CliResult r = run({"--spec", path, "check"});
    CHECK(r.code == 0);
    CHECK(mentions(r.out, "grf_to_mrf\tSKIP\t-\trequires a potential model"));
    CHECK(mentions(r.out, "mrf_to_grf\tPASS"));
    CHECK(mentions(r.out, "ratio_invariance\tSKIP\t-\trequires a full-field model"));
    CHECK(mentions(r.out, "positivity_gibbs_form\tPASS"));
}

TEST_CASE("check fails with exit 1 on cyclically inconsistent conditionals") {
    const std::string path = write_doc("skewed", kSkewedConditionals);
    const CliResult r = run({"--spec", path, "check"});
    CHECK(r.code == 1);
    CHECK(mentions(r.out, "mrf_to_grf\tFAIL"));
    CHECK(mentions(r.out, "cycle residual"));
}

TEST_CASE("check exits 2 on a malformed document") {
    const std::string path = write_doc("no_model", R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2]}
    })");
    const CliResult r = run({"--spec", path, "check"});
    CHECK(r.code == 2);
    CHECK(mentions(r.err, "error:"));
}

TEST_CASE("json output parses and carries the same verdicts") {
    const std::string path = write_doc("chain_json", kChainGibbs);
    const CliResult check = run({"--spec", path, "--format", "json", "check"});
    CHECK(check.code == 0);
    const auto jc = nlohmann::json::parse(check.out);
    CHECK(jc["pass"] == true);
    REQUIRE(jc["checks"].size() == 4);
    for (const auto& row : jc["checks"]) CHECK(row["status"] == "PASS");

    const CliResult joint = run({"--spec", path, "--format", "json", "joint"});
    CHECK(joint.code == 0);
    const auto jj = nlohmann::json::parse(joint.out);
    CHECK(jj["joint"].size() == 5);
    CHECK(jj["ln_k"].is_number());
    CHECK(jj["P_C"].is_number());
}

TEST_CASE("probabilities print with twelve significant digits") {
    const std::string path = write_doc("thirds", R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2]},
      "energy": {"entries": [
        {"rank": 0, "value": 0.0},
        {"rank": 1, "value": 0.6931471805599453}
      ]}
    })");
    const CliResult r = run({"--spec", path, "joint"});
    CHECK(r.code == 0);
    CHECK(mentions(r.out, "0.666666666667"));
    CHECK(mentions(r.out, "0.333333333333"));
    CHECK(mentions(r.out, "# P_C 1"));
}

TEST_CASE("decompose recovers the product structure of an independent joint") {
    const std::string path = write_doc("product_joint", kProductJoint);
    const CliResult r = run({"--spec", path, "decompose"});
    CHECK(r.code == 0);
    CHECK(mentions(r.out, "# minimal_clique_count 2"));
    CHECK(mentions(r.out, "# eta_0\n"));
    CHECK(mentions(r.out, "# eta_1\n"));
    // V_0(1) = ln(P(00)/P(10)) = ln 1.5; same for site 1 by symmetry.
    CHECK(mentions(r.out, "0\t1\t" + sig12(std::log(1.5))));
    CHECK(mentions(r.out, "1\t1\t" + sig12(std::log(1.5))));
}

TEST_CASE("exact sampling through the CLI is deterministic") {
    const std::string path = write_doc("sample_exact", kChainGibbs);
    const CliResult a = run({"--spec", path, "sample", "--method", "exact", "--n", "5",
                             "--seed", "9"});
    const CliResult b = run({"--spec", path, "sample", "--method", "exact", "--n", "5",
                             "--seed", "9"});
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(mentions(a.out, "# method exact"));
    CHECK(mentions(a.out, "# seed 9"));
    CHECK(line_count(a.out) == 7);
}

TEST_CASE("gibbs sampling reports its chain header and respects constraints") {
    const std::string path = write_doc("sample_gibbs", kChainGibbs);
    const CliResult r = run({"--spec", path, "sample", "--method", "gibbs", "--n", "4",
                             "--seed", "3", "--burn-in", "2"});
    CHECK(r.code == 0);
    CHECK(mentions(r.out, "# method gibbs"));
    CHECK(mentions(r.out, "# burn_in 2"));
    CHECK(mentions(r.out, "# non_ergodic false"));
    CHECK(line_count(r.out) == 8);
    CHECK_FALSE(mentions(r.out, "1 1"));
}

TEST_CASE("gibbs sampling warns when the flip graph is disconnected") {
    const std::string path = write_doc("split", kSplitSupport);
    const CliResult r = run({"--spec", path, "sample", "--method", "gibbs", "--n", "3",
                             "--seed", "1"});
    CHECK(r.code == 0);
    CHECK(mentions(r.out, "# non_ergodic true"));
    CHECK(mentions(r.err, "components"));
    // Started at the first support member, the chain never leaves it.
    CHECK(mentions(r.out, "0 1\n0 1\n0 1\n"));
}

TEST_CASE("the pattern limit guard exits with code 3 and then resets") {
    const std::string path = write_doc("guarded", kChainGibbs);
    const CliResult guarded = run({"--spec", path, "--pattern-limit", "4", "info"});
    CHECK(guarded.code == 3);
    CHECK(mentions(guarded.err, "error:"));

    // The override does not leak into the next invocation.
    const CliResult after = run({"--spec", path, "info"});
    CHECK(after.code == 0);
    CHECK(mentions(after.out, "support_size\t5"));
}

TEST_CASE("help prints usage and exits cleanly") {
    const CliResult r = run({"--help"});
    CHECK(r.code == 0);
    CHECK(mentions(r.out, "Usage"));
}

TEST_CASE("argument errors exit with code 2") {
    CHECK(run({"info"}).code == 2);
    const std::string path = write_doc("fmt_err", kChainGibbs);
    CHECK(run({"--spec", path, "--format", "xml", "info"}).code == 2);
    CHECK(run({"--spec", path, "sample", "--n", "3"}).code == 2);
    CHECK(run({"--spec", "/nonexistent.json", "info"}).code == 2);
}

TEST_CASE("info summarizes the document and flip graph") {
    const std::string path = write_doc("info", kZeroEnergyOverC);
    const CliResult r = run({"--spec", path, "info"});
    CHECK(r.code == 0);
    CHECK(mentions(r.out, "model\tenergy"));
    CHECK(mentions(r.out, "pattern_count\t8"));
    CHECK(mentions(r.out, "support_size\t5"));
    CHECK(mentions(r.out, "flip_graph_edges\t5"));
    CHECK(mentions(r.out, "flip_graph_components\t1"));
}
