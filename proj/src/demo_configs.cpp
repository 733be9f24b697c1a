// SPDX-License-Identifier: Apache-2.0
#include "levylab/demo.hpp"

namespace levylab {

namespace {

constexpr const char* k_theorem31 = R"CFG({
  "seed": 31001,
  "samples": 100000,
  "sigmas": 3.0,
  "model": {
    "drift": 0.0,
    "horizon": 1.0,
    "sigma": 0.0,
    "components": [
      {"kind": "atom", "x": 1.0, "mass": 2.0}
    ]
  },
  "boxes": {
    "A": [[0.0, 1.0, 0.5, 1.5]]
  },
  "functionals": {
    "N": "count(A)",
    "one": "1",
    "bern": "clamp(count(A), 0, 1)",
    "sq": "sumjumps(A, x2)",
    "mix": "sumjumps(A, absx) + min(count(A), 3)"
  },
  "checks": [
    {"name": "sandwich-count", "kind": "sandwich", "functional": "N", "box": "A", "seed": 101,
     "expect_a": 4.69041575982343, "expect_b": 3.4641016151377544, "expect_d": 1.4142135623730951},
    {"name": "sandwich-bernoulli", "kind": "sandwich", "functional": "bern", "box": "A", "seed": 102,
     "expect_a": 1.4142135623730951, "expect_b": 1.3150397079657992, "expect_d": 0.520260095022889},
    {"name": "sandwich-constant", "kind": "sandwich", "functional": "one", "box": "A", "seed": 103},
    {"name": "equivalence-count", "kind": "equivalence", "functional": "N", "box": "A", "seed": 104},
    {"name": "equivalence-constant", "kind": "equivalence", "functional": "one", "box": "A", "seed": 105},
    {"name": "equivalence-bernoulli", "kind": "equivalence", "functional": "bern", "box": "A", "seed": 106},
    {"name": "equivalence-squares", "kind": "equivalence", "functional": "sq", "box": "A", "seed": 107},
    {"name": "equivalence-mixed", "kind": "equivalence", "functional": "mix", "box": "A", "seed": 108}
  ]
})CFG";

constexpr const char* k_interpolation = R"CFG({
  "seed": 41001,
  "samples": 100000,
  "sigmas": 3.0,
  "model": {
    "drift": 0.0,
    "horizon": 1.0,
    "sigma": 0.0,
    "components": [
      {"kind": "atom", "x": 1.0, "mass": 2.0}
    ]
  },
  "boxes": {
    "A": [[0.0, 1.0, 0.5, 1.5]]
  },
  "functionals": {
    "N": "count(A)",
    "one": "1"
  },
  "checks": [
    {"name": "theta-integral-25-05", "kind": "theta_integral", "theta": 0.25, "c": 0.5, "seed": 201},
    {"name": "theta-integral-25-1", "kind": "theta_integral", "theta": 0.25, "c": 1.0, "seed": 202},
    {"name": "theta-integral-25-2", "kind": "theta_integral", "theta": 0.25, "c": 2.0, "seed": 203},
    {"name": "theta-integral-50-05", "kind": "theta_integral", "theta": 0.5, "c": 0.5, "seed": 204},
    {"name": "theta-integral-50-1", "kind": "theta_integral", "theta": 0.5, "c": 1.0, "seed": 205},
    {"name": "theta-integral-50-2", "kind": "theta_integral", "theta": 0.5, "c": 2.0, "seed": 206},
    {"name": "theta-integral-75-05", "kind": "theta_integral", "theta": 0.75, "c": 0.5, "seed": 207},
    {"name": "theta-integral-75-1", "kind": "theta_integral", "theta": 0.75, "c": 1.0, "seed": 208},
    {"name": "theta-integral-75-2", "kind": "theta_integral", "theta": 0.75, "c": 2.0, "seed": 209},
    {"name": "weighted-norm-constant", "kind": "weighted_norm", "functional": "one", "box": "A",
     "theta": 1.0, "expect": 1.7320508075688772, "seed": 210},
    {"name": "band-count-25", "kind": "interpolation_band", "functional": "N", "box": "A", "theta": 0.25, "seed": 211},
    {"name": "band-count-50", "kind": "interpolation_band", "functional": "N", "box": "A", "theta": 0.5, "seed": 212},
    {"name": "band-count-75", "kind": "interpolation_band", "functional": "N", "box": "A", "theta": 0.75, "seed": 213},
    {"name": "band-constant-50", "kind": "interpolation_band", "functional": "one", "box": "A",
     "theta": 0.5, "table": "kprofile.tsv", "seed": 214},
    {"name": "fubini-constant", "kind": "fubini", "functional": "one", "box": "A", "theta": 0.5, "seed": 215},
    {"name": "fubini-count", "kind": "fubini", "functional": "N", "box": "A", "theta": 0.5, "seed": 216},
    {"name": "surrogate-unit", "kind": "k_surrogate", "functional": "one", "box": "A", "s": 1.0,
     "expect": 1.0, "seed": 217}
  ]
})CFG";

constexpr const char* k_orlicz = R"CFG({
  "seed": 51001,
  "samples": 100000,
  "sigmas": 3.0,
  "model": {
    "drift": 0.0,
    "horizon": 1.0,
    "sigma": 0.0,
    "components": [
      {"kind": "atom", "x": 1.0, "mass": 1.0}
    ]
  },
  "boxes": {
    "A": [[0.0, 1.0, 0.5, 1.5]]
  },
  "functionals": {
    "N": "count(A)",
    "one": "1"
  },
  "checks": [
    {"name": "phi-star-moment", "kind": "phi_star", "lambda": 1.0,
     "expect": 3.57494152476088, "tol": 0.0001, "seed": 301},
    {"name": "young-inequality", "kind": "young", "points": 80, "range": 10.0, "seed": 302},
    {"name": "counterexample-a2", "kind": "counterexample", "lambda": 1.0, "a": 2.0,
     "truncation": 1048576, "table": "d12_trace.tsv", "seed": 303},
    {"name": "counterexample-a15", "kind": "counterexample", "lambda": 1.0, "a": 1.5,
     "truncation": 1048576, "seed": 304},
    {"name": "l2log-constant", "kind": "l2log", "functional": "one", "expect": 0.0, "seed": 305},
    {"name": "classify-count", "kind": "classify", "functional": "N", "box": "A",
     "theta": 1.0, "truncation": 65536, "expect": "finite", "seed": 306}
  ]
})CFG";

constexpr const char* k_chaos = R"CFG({
  "seed": 61001,
  "samples": 100000,
  "sigmas": 3.0,
  "model": {
    "drift": 0.0,
    "horizon": 1.0,
    "sigma": 0.0,
    "components": [
      {"kind": "atom", "x": 1.0, "mass": 2.0},
      {"kind": "uniform", "a": -3.0, "b": -1.0, "mass": 1.0}
    ]
  },
  "boxes": {
    "A": [[0.0, 1.0, 0.5, 1.5]],
    "B1": [[0.0, 1.0, -2.0, 1.5]],
    "B2": [[0.0, 0.5, -3.0, 1.0]],
    "B3": [[0.2, 0.8, 0.5, 2.0]]
  },
  "functionals": {
    "N": "count(A)",
    "capped": "clamp(count(A), 0, 3)",
    "absorbed": "sumjumps(A, absx)",
    "sq": "sumjumps(A, x2)",
    "mix": "sumjumps(A, absx) + min(count(A), 3)"
  },
  "checks": [
    {"name": "isometry-h", "kind": "isometry", "box": "A", "splits": 2, "seed": 401},
    {"name": "orthogonality-12", "kind": "orthogonality", "box": "A", "splits": 2, "seed": 402},
    {"name": "covariance-1", "kind": "covariance", "box1": "B1", "box2": "B2", "seed": 403},
    {"name": "covariance-2", "kind": "covariance", "box1": "B1", "box2": "B3", "seed": 404},
    {"name": "covariance-3", "kind": "covariance", "box1": "B2", "box2": "B3", "seed": 405},
    {"name": "mecke-count", "kind": "mecke", "functional": "N", "box": "A", "expect": 6.0, "seed": 406},
    {"name": "mecke-capped", "kind": "mecke", "functional": "capped", "box": "A", "seed": 407},
    {"name": "mecke-absorbed", "kind": "mecke", "functional": "absorbed", "box": "A", "seed": 408},
    {"name": "product-rule", "kind": "product_rule", "f": "N", "g": "sq", "trials": 1000, "seed": 409},
    {"name": "chain-rule", "kind": "chain_rule", "functional": "mix", "g": "clamp",
     "lo": 0.0, "hi": 2.0, "trials": 1000, "seed": 410},
    {"name": "derivative-norm-count", "kind": "derivative_norm", "functional": "N", "box": "A",
     "expect": 2.0, "seed": 411}
  ],
  "path_dump": {"streams": 4, "file": "paths.tsv"}
})CFG";

}  // namespace

const char* demo_config(const std::string& name) {
    if (name == "theorem31") return k_theorem31;
    if (name == "interpolation") return k_interpolation;
    if (name == "orlicz") return k_orlicz;
    if (name == "chaos") return k_chaos;
    return nullptr;
}

std::vector<std::string> demo_config_names() {
    return {"theorem31", "interpolation", "orlicz", "chaos"};
}

}  // namespace levylab
