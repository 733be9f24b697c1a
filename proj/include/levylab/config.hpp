// SPDX-License-Identifier: Apache-2.0
//
// Experiment configs: a JSON document declaring the model, named box sets,
// named functionals (DSL sources), and a list of checks with explicit seeds
// and sample budgets. Loading collects diagnostics instead of bailing at the
// first problem, so `validate` and `run` share one code path; a config that
// validates clean cannot fail `run` on static grounds.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "levylab/functional.hpp"
#include "levylab/model.hpp"

namespace levylab {

struct MeckeParams {
    std::string functional, box;
    std::optional<double> expect;
};
struct CovarianceParams {
    std::string box1, box2;
};
struct IsometryParams {
    std::string box;
    int splits = 2;
};
struct OrthogonalityParams {
    std::string box;
    int splits = 2;
};
struct SandwichParams {
    std::string functional, box;
    std::optional<double> expect_a, expect_b, expect_d;
};
struct EquivalenceParams {
    std::string functional, box;
};
struct WeightedNormParams {
    std::string functional, box;
    double theta = 1.0;
    std::optional<double> expect;
};
struct KSurrogateParams {
    std::string functional, box;
    double s = 1.0;
    std::optional<double> expect;
};
struct InterpolationBandParams {
    std::string functional, box;
    double theta = 0.5;
    std::string table;  // optional (s, surrogate) table artifact
};
struct FubiniParams {
    std::string functional, box;
    double theta = 0.5;
};
struct ThetaIntegralParams {
    double theta = 0.5, c = 1.0;
    double rel_tol = 1e-6;
};
struct ClassifyParams {
    std::string functional, box;
    double theta = 1.0;
    std::int64_t truncation = 1 << 20;
    std::string expect = "finite";
    std::string table;  // optional (m, partial) trace artifact
};
struct CounterexampleParams {
    double lambda = 1.0, a = 2.0;
    std::int64_t truncation = 1 << 20;
    std::string table;
};
struct PhiStarParams {
    double lambda = 1.0;
    std::optional<double> expect;
    double tol = 1e-4;
};
struct YoungParams {
    int points = 64;
    double range = 10.0;
};
struct ProductRuleParams {
    std::string f, g;
    std::int64_t trials = 1000;
    double rel_tol = 1e-12;
};
struct ChainRuleParams {
    std::string functional;
    std::string g = "abs";  // abs | clamp | min | max
    double lo = -1.0, hi = 1.0, c = 0.0;
    std::int64_t trials = 1000;
    double rel_tol = 1e-12;
};
struct DerivativeNormParams {
    std::string functional, box;
    std::optional<double> expect;
};
struct L2LogParams {
    std::string functional;
    std::optional<double> expect;
};

using CheckParams =
    std::variant<MeckeParams, CovarianceParams, IsometryParams,
                 OrthogonalityParams, SandwichParams, EquivalenceParams,
                 WeightedNormParams, KSurrogateParams,
                 InterpolationBandParams, FubiniParams, ThetaIntegralParams,
                 ClassifyParams, CounterexampleParams, PhiStarParams,
                 YoungParams, ProductRuleParams, ChainRuleParams,
                 DerivativeNormParams, L2LogParams>;

struct CheckSpec {
    std::string name;
    std::string kind;
    std::uint64_t seed = 0;
    std::int64_t samples = 100000;
    double sigmas = 3.0;
    CheckParams params;
};

struct PathDumpSpec {
    std::uint64_t streams = 0;
    std::string file;
};

struct ExperimentConfig {
    std::string raw;  // exact config bytes (digested into the manifest)
    std::uint64_t seed = 0;
    std::optional<JumpModel> model;
    BoxEnv boxes;
    std::map<std::string, std::string> functional_sources;
    std::map<std::string, Functional> functionals;
    std::vector<CheckSpec> checks;
    std::optional<PathDumpSpec> path_dump;
};

// Full static validation: schema, name resolution, scope, budgets, DSL
// parses, measurability certificates. Empty result means clean.
std::vector<std::string> validate_config(const std::string& text,
                                         ExperimentConfig* out = nullptr);

// Loads or throws ConfigError with the first diagnostic.
ExperimentConfig load_config(const std::string& text);

}  // namespace levylab
