// SPDX-License-Identifier: Apache-2.0
#include "levylab/config.hpp"

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "levylab/demo.hpp"
#include "levylab/runner.hpp"

using namespace levylab;

namespace {

std::string minimal_config(const std::string& checks,
                           const std::string& sigma = "0.0") {
    return R"json({
  "seed": 7,
  "samples": 2000,
  "model": {
    "drift": 0.0, "horizon": 1.0, "sigma": )json" +
           sigma + R"json(,
    "components": [{"kind": "atom", "x": 1.0, "mass": 2.0}]
  },
  "boxes": {
    "A": [[0.0, 1.0, 0.5, 1.5]],
    "Z": [[0.0, 1.0, 2.0, 3.0]]
  },
  "functionals": {
    "N": "count(A)",
    "out": "count(Z)"
  },
  "checks": [)json" + checks +
           R"json(]
})json";
}

const std::string kWeightedCheck =
    R"json({"name": "w", "kind": "weighted_norm", "functional": "N", "box": "A", "theta": 1.0, "seed": 3})json";

}  // namespace

TEST_CASE("a valid config produces no diagnostics and runs") {
    std::string text = minimal_config(kWeightedCheck);
    auto diagnostics = validate_config(text);
    CHECK(diagnostics.empty());

    ExperimentConfig config = load_config(text);
    RunResult result = run_config(config);
    REQUIRE(result.report.checks.size() == 1);
    CHECK(result.report.checks[0].pass);
    CHECK(result.report.seed == 7);
}

TEST_CASE("schema diagnostics name the offending field") {
    SUBCASE("missing seed") {
        std::string text = minimal_config(kWeightedCheck);
        text.replace(text.find("\"seed\": 7,"), 10, "");
        auto diagnostics = validate_config(text);
        REQUIRE(!diagnostics.empty());
        CHECK(diagnostics[0].find("seed") != std::string::npos);
    }
    SUBCASE("sigma != 0 is rejected as out of scope") {
        auto diagnostics = validate_config(minimal_config(kWeightedCheck, "0.1"));
        REQUIRE(!diagnostics.empty());
        CHECK(diagnostics[0].find("sigma") != std::string::npos);
        CHECK(diagnostics[0].find("out of scope") != std::string::npos);
    }
    SUBCASE("JSON syntax errors surface the parser message") {
        auto diagnostics = validate_config("{ not json");
        REQUIRE(diagnostics.size() == 1);
        CHECK(diagnostics[0].find("parse error") != std::string::npos);
    }
    SUBCASE("functional referencing an undeclared box") {
        std::string text = minimal_config(kWeightedCheck);
        text.replace(text.find("count(Z)"), 8, "count(Q)");
        auto diagnostics = validate_config(text);
        REQUIRE(diagnostics.size() == 1);
        CHECK(diagnostics[0].find("Q") != std::string::npos);
    }
    SUBCASE("DSL syntax errors carry the position") {
        std::string text = minimal_config(kWeightedCheck);
        text.replace(text.find("count(Z)"), 8, "count(");
        auto diagnostics = validate_config(text);
        REQUIRE(!diagnostics.empty());
        CHECK(diagnostics[0].find("column") != std::string::npos);
    }
    SUBCASE("missing check seed is an explicit-seed violation") {
        auto diagnostics = validate_config(minimal_config(
            R"json({"name": "w", "kind": "weighted_norm", "functional": "N", "box": "A"})json"));
        REQUIRE(!diagnostics.empty());
        CHECK(diagnostics[0].find("seed") != std::string::npos);
    }
    SUBCASE("nonpositive budgets are rejected") {
        auto diagnostics = validate_config(minimal_config(
            R"json({"name": "w", "kind": "weighted_norm", "functional": "N", "box": "A", "seed": 1, "samples": 0})json"));
        REQUIRE(!diagnostics.empty());
        CHECK(diagnostics[0].find("samples") != std::string::npos);
    }
}

TEST_CASE("equivalence checks demand the measurability certificate") {
    auto diagnostics = validate_config(minimal_config(
        R"json({"name": "eq", "kind": "equivalence", "functional": "out", "box": "A", "seed": 5})json"));
    REQUIRE(!diagnostics.empty());
    // the offending box is named
    CHECK(diagnostics[0].find("Z") != std::string::npos);
    CHECK(diagnostics[0].find("measurab") != std::string::npos);
}

TEST_CASE("reports are byte-identical across reruns and worker counts") {
    std::string text = minimal_config(
        kWeightedCheck + "," +
        R"json({"name": "s", "kind": "sandwich", "functional": "N", "box": "A", "seed": 11})json");
    ExperimentConfig config = load_config(text);
    RunOptions serial;
    RunOptions fanout;
    fanout.workers = 4;
    fanout.parallel_checks = true;
    std::string first = render_json(run_config(config, serial).report);
    std::string second = render_json(run_config(config, serial).report);
    std::string third = render_json(run_config(config, fanout).report);
    CHECK(first == second);
    CHECK(first == third);
}

TEST_CASE("manifest digest tracks config bytes exactly") {
    std::string text = minimal_config(kWeightedCheck);
    ExperimentConfig config = load_config(text);
    Report report = run_config(config).report;
    CHECK(report.config_digest == digest_hex(text));

    std::string altered = text;
    altered.replace(altered.find("\"seed\": 7"), 9, "\"seed\": 8");
    ExperimentConfig other = load_config(altered);
    CHECK(run_config(other).report.config_digest != report.config_digest);
}

TEST_CASE("CSV rendering is stable and complete") {
    ExperimentConfig config = load_config(minimal_config(kWeightedCheck));
    Report report = run_config(config).report;
    std::string csv = render_csv(report);
    CHECK(csv.find("check,kind,digest,metric,value") == 0);
    CHECK(csv.find("w,weighted_norm") != std::string::npos);
    CHECK(csv.find(",pass,1") != std::string::npos);
    CHECK(csv == render_csv(report));
}

TEST_CASE("path dumps come out as artifacts") {
    std::string text = minimal_config(kWeightedCheck);
    text.replace(text.find("\"checks\""), 8,
                 "\"path_dump\": {\"streams\": 3, \"file\": \"p.tsv\"}, "
                 "\"checks\"");
    ExperimentConfig config = load_config(text);
    RunResult result = run_config(config);
    REQUIRE(result.artifacts.size() == 1);
    CHECK(result.artifacts[0].first == "p.tsv");
    CHECK(!result.artifacts[0].second.empty());
}

TEST_CASE("bundled demo configs validate clean and match configs/") {
    for (const std::string& name : demo_config_names()) {
        const char* text = demo_config(name);
        REQUIRE(text != nullptr);
        auto diagnostics = validate_config(text);
        for (const auto& d : diagnostics) MESSAGE(d);
        CHECK(diagnostics.empty());

        std::ifstream file(std::string(LEVYLAB_CONFIG_DIR) + "/" + name +
                           ".cfg");
        REQUIRE(file.good());
        std::ostringstream buffer;
        buffer << file.rdbuf();
        CHECK(buffer.str() == std::string(text) + "\n");
    }
    CHECK(demo_config("nonsense") == nullptr);
}
