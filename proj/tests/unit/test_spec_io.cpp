#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "cmrf/errors.hpp"
#include "cmrf/spec_io.hpp"

using namespace cmrf;

namespace {

std::string parse_error(const std::string& text) {
    try {
        parse_spec(text);
    } catch (const MalformedSpec& e) {
        return e.what();
    }
    return {};
}

bool mentions(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

const char* kJointDoc = R"({
  "format_version": 1,
  "field": {"site_count": 1, "alphabet_sizes": [2]},
  "joint": {"entries": [
    {"rank": 0, "probability": 0.3},
    {"rank": 1, "probability": 0.7}
  ]}
})";

const char* kGibbsDoc = R"({
  "format_version": 1,
  "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
  "constraints": [{"kind": "deny_list", "patterns": [[1, 1]]}],
  "gibbs": {"cliques": [
    {"sites": [0, 1], "values": [
      {"labels": [0, 0], "value": 0.1},
      {"labels": [0, 1], "value": -0.25},
      {"labels": [1, 0], "value": 0.75},
      {"labels": [1, 1], "value": 1.5}
    ]}
  ]}
})";

const char* kEnergyDoc = R"({
  "format_version": 1,
  "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
  "constraints": [{"kind": "deny_list", "patterns": [[1, 1]]}],
  "energy": {"entries": [
    {"rank": 0, "value": 0.5},
    {"rank": 1, "value": -1.25},
    {"rank": 2, "value": 2.0}
  ]}
})";

const char* kConditionalsDoc = R"({
  "format_version": 1,
  "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
  "conditionals": {
    "keyed_by": "full_complement",
    "entries": [
      {"site": 0, "boundary": [0], "probs": [0.4, 0.6]},
      {"site": 0, "boundary": [1], "probs": [0.3, 0.7]},
      {"site": 1, "boundary": [0], "probs": [0.5, 0.5]},
      {"site": 1, "boundary": [1], "probs": [0.25, 0.75]}
    ]
  }
})";

} // namespace

TEST_CASE("a minimal joint document parses into a validated distribution") {
    const SpecDocument doc = parse_spec(kJointDoc);
    CHECK(doc.format_version == 1);
    CHECK(doc.kind == ModelKind::Joint);
    CHECK(doc.field.site_count() == 1);
    CHECK(doc.constraints.constraints().empty());
    REQUIRE(doc.support);
    CHECK(doc.support->size() == 2);
    REQUIRE(doc.joint.has_value());
    CHECK(doc.joint->prob(0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(doc.joint->prob(1) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(doc.joint_probabilities == std::vector<double>{0.3, 0.7});
}

TEST_CASE("each document carries exactly one model section") {
    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2]}
    })"),
                   "exactly one model section"));

    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2]},
      "gibbs": {"cliques": []},
      "joint": {"entries": [
        {"rank": 0, "probability": 0.5},
        {"rank": 1, "probability": 0.5}
      ]}
    })"),
                   "exactly one model section"));
}

TEST_CASE("format versions other than 1 are refused") {
    CHECK(mentions(parse_error(R"({
      "format_version": 2,
      "field": {"site_count": 1, "alphabet_sizes": [2]},
      "gibbs": {"cliques": []}
    })"),
                   "unsupported version 2"));
    CHECK(mentions(parse_error(R"({
      "field": {"site_count": 1, "alphabet_sizes": [2]},
      "gibbs": {"cliques": []}
    })"),
                   "missing key 'format_version'"));
}

TEST_CASE("text that is not JSON is reported as such") {
    CHECK(mentions(parse_error("not a document"), "document is not valid JSON"));
}

TEST_CASE("unknown keys are named in the error") {
    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2]},
      "gibbs": {"cliques": []},
      "extra": true
    })"),
                   "unknown key 'extra'"));
    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2], "rows": 1},
      "gibbs": {"cliques": []}
    })"),
                   "unknown key 'rows'"));
    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2]},
      "gibbs": {"potentials": []}
    })"),
                   "unknown key 'potentials'"));
}

TEST_CASE("field shape mismatches are rejected") {
    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2]},
      "gibbs": {"cliques": []}
    })"),
                   "length must equal site_count"));
    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 0]},
      "gibbs": {"cliques": []}
    })"),
                   "field:"));
}

TEST_CASE("an incomplete potential table names its clique") {
    const std::string err = parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "gibbs": {"cliques": [
        {"sites": [0, 1], "values": [
          {"labels": [0, 0], "value": 0.0},
          {"labels": [0, 1], "value": 0.0},
          {"labels": [1, 0], "value": 0.0}
        ]}
      ]}
    })");
    CHECK(mentions(err, "clique {0,1}"));
    CHECK(mentions(err, "has 3 assignments, expected 4"));
}

TEST_CASE("gibbs sites must ascend and labels must be complete and unique") {
    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "gibbs": {"cliques": [{"sites": [1, 0], "values": []}]}
    })"),
                   "strictly ascending"));
    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "gibbs": {"cliques": [
        {"sites": [0], "values": [
          {"labels": [0], "value": 0.0},
          {"labels": [0], "value": 1.0}
        ]}
      ]}
    })"),
                   "duplicate label assignment"));
}

TEST_CASE("joint entries must cover the support exactly once with unit mass") {
    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2]},
      "joint": {"entries": [
        {"rank": 0, "probability": 0.5},
        {"rank": 0, "probability": 0.5}
      ]}
    })"),
                   "duplicate rank 0"));

    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "constraints": [{"kind": "deny_list", "patterns": [[1, 1]]}],
      "joint": {"entries": [
        {"rank": 0, "probability": 0.25},
        {"rank": 1, "probability": 0.25},
        {"rank": 2, "probability": 0.25},
        {"rank": 3, "probability": 0.25}
      ]}
    })"),
                   "cover exactly the constraint support"));

    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2]},
      "joint": {"entries": [
        {"rank": 0, "probability": 0.5},
        {"rank": 1, "probability": 0.6}
      ]}
    })"),
                   "probabilities sum to"));

    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2]},
      "joint": {"entries": [
        {"rank": 0, "probability": 0.0},
        {"rank": 1, "probability": 1.0}
      ]}
    })"),
                   "strictly positive"));

    // Mass within the tolerance parses.
    CHECK_NOTHROW(parse_spec(R"({
      "format_version": 1,
      "field": {"site_count": 1, "alphabet_sizes": [2]},
      "joint": {"entries": [
        {"rank": 0, "probability": 0.3},
        {"rank": 1, "probability": 0.7000000005}
      ]}
    })"));
}

TEST_CASE("energy entries cover the whole field or exactly the support") {
    const SpecDocument doc = parse_spec(kEnergyDoc);
    CHECK(doc.kind == ModelKind::Energy);
    REQUIRE(doc.energy.has_value());
    CHECK_FALSE(doc.energy->covers_full_space());
    CHECK(doc.energy->energies() == std::vector<double>{0.5, -1.25, 2.0});

    // Full-field energies are accepted even under constraints.
    CHECK_NOTHROW(parse_spec(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "constraints": [{"kind": "deny_list", "patterns": [[1, 1]]}],
      "energy": {"entries": [
        {"rank": 0, "value": 0.0},
        {"rank": 1, "value": 0.0},
        {"rank": 2, "value": 0.0},
        {"rank": 3, "value": 0.0}
      ]}
    })"));

    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "constraints": [{"kind": "deny_list", "patterns": [[1, 1]]}],
      "energy": {"entries": [
        {"rank": 0, "value": 0.0},
        {"rank": 3, "value": 0.0}
      ]}
    })"),
                   "whole field or exactly the constraint support"));
}

TEST_CASE("count constraints parse each comparator") {
    for (const char* cmp : {"eq", "le", "ge"}) {
        const std::string text = std::string(R"({
          "format_version": 1,
          "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
          "constraints": [{"kind": "count", "label": 1, "comparator": ")") +
                                 cmp + R"(", "bound": 1}],
          "gibbs": {"cliques": []}
        })";
        CHECK_NOTHROW(parse_spec(text));
    }
    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "constraints": [{"kind": "count", "label": 1, "comparator": "gt", "bound": 1}],
      "gibbs": {"cliques": []}
    })"),
                   "expected one of eq, le, ge"));
}

TEST_CASE("conditionals must cover every realized boundary with positive mass") {
    CHECK_NOTHROW(parse_spec(kConditionalsDoc));

    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "conditionals": {"entries": [
        {"site": 0, "boundary": [0], "probs": [0.4, 0.6]},
        {"site": 1, "boundary": [0], "probs": [0.5, 0.5]},
        {"site": 1, "boundary": [1], "probs": [0.25, 0.75]}
      ]}
    })"),
                   "no entry for site 0"));

    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "conditionals": {"entries": [
        {"site": 0, "boundary": [0], "probs": [0.0, 1.0]},
        {"site": 0, "boundary": [1], "probs": [0.3, 0.7]},
        {"site": 1, "boundary": [0], "probs": [0.5, 0.5]},
        {"site": 1, "boundary": [1], "probs": [0.25, 0.75]}
      ]}
    })"),
                   "zero conditional probability"));

    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "conditionals": {"entries": [
        {"site": 0, "boundary": [0], "probs": [0.4, 0.6]},
        {"site": 0, "boundary": [0], "probs": [0.4, 0.6]}
      ]}
    })"),
                   "duplicate (site, boundary) entry"));

    CHECK(mentions(parse_error(R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "conditionals": {"keyed_by": "neighborhood", "entries": []}
    })"),
                   "requires a neighborhoods key"));
}

TEST_CASE("serialization is a fixed point after one round trip") {
    for (const char* text : {kJointDoc, kGibbsDoc, kEnergyDoc, kConditionalsDoc}) {
        const SpecDocument doc1 = parse_spec(text);
        const std::string s1 = serialize_spec(doc1);
        const SpecDocument doc2 = parse_spec(s1);
        const std::string s2 = serialize_spec(doc2);
        CHECK(s1 == s2);
        CHECK(doc1.kind == doc2.kind);
    }
}

TEST_CASE("joint probabilities survive serialization bit for bit") {
    const char* text = R"({
      "format_version": 1,
      "field": {"site_count": 2, "alphabet_sizes": [2, 2]},
      "joint": {"entries": [
        {"rank": 0, "probability": 0.30000000000000004},
        {"rank": 1, "probability": 0.19999999999999998},
        {"rank": 2, "probability": 0.125},
        {"rank": 3, "probability": 0.375}
      ]}
    })";
    const SpecDocument doc1 = parse_spec(text);
    const SpecDocument doc2 = parse_spec(serialize_spec(doc1));
    CHECK(doc1.joint_probabilities == doc2.joint_probabilities);
    CHECK(doc2.joint_probabilities[0] == 0.30000000000000004);
    CHECK(doc2.joint_probabilities[1] == 0.19999999999999998);
}

TEST_CASE("loading a missing file is a spec error naming the path") {
    try {
        load_spec_file("/nonexistent/spec.json");
        FAIL("expected MalformedSpec");
    } catch (const MalformedSpec& e) {
        CHECK(mentions(e.what(), "cannot open spec file"));
    }
}

TEST_CASE("loading a file parses its contents") {
    const std::string path = "/tmp/cmrf_io_test_spec.json";
    {
        std::ofstream out(path);
        out << kJointDoc;
    }
    const SpecDocument doc = load_spec_file(path);
    CHECK(doc.kind == ModelKind::Joint);
    std::remove(path.c_str());
}
