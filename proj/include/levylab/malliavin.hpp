// SPDX-License-Identifier: Apache-2.0
//
// The Malliavin derivative realized two ways and cross-checked: the
// add-one-jump difference quotient (F(X + x 1_[t,inf)) - F(X)) / x for path
// functionals, and the chaos-shift n I_{n-1}(f~_n(., (t,x))) for coefficient
// grids. On the pure-jump space these agree pathwise for elementary grids,
// which the tests exploit as an exact identity. Also here: the Mecke check,
// the pathwise product and chain rules, and conditional projection onto F_A.
#pragma once

#include <functional>

#include "levylab/chaos.hpp"
#include "levylab/estimate.hpp"
#include "levylab/functional.hpp"

namespace levylab {

struct DerivativePoint {
    double t = 0.0;
    double x = 1.0;  // must stay nonzero
};

using PathFunctional = std::function<double(const JumpPath&)>;

// (F(path + jump(t,x)) - F(path)) / x
double derivative_quotient(const PathFunctional& f, const JumpPath& path,
                           DerivativePoint p);
double derivative_quotient(const Functional& f, const JumpModel& model,
                           const BoxEnv& boxes, const JumpPath& path,
                           DerivativePoint p);

// sum_n n * chaos_eval of the (n-1)-slice f~_n(., cell containing (t,x));
// zero when the point lies outside the partition support. The grid must be
// symmetric (symmetrize first).
double derivative_chaos(const JumpModel& model, const CoefficientGrid& grid,
                        const JumpPath& path, DerivativePoint p);

// Draw (t,x) from m restricted to A, normalized; weight m_measure(A).
DerivativePoint sample_point_m(const JumpModel& model, const BoxSet& a,
                               Rng& rng);
// Draw (t,x) from (dt (x) nu) restricted to A, normalized.
DerivativePoint sample_point_dtnu(const JumpModel& model, const BoxSet& a,
                                  Rng& rng);

// Estimates ||DY 1_A||^2 in L_2(m (x) P): importance-sample (t,x) from
// m|_A / m(A), draw an independent path, average m(A) * quotient^2.
Estimate derivative_norm_sq(const JumpModel& model, const BoxEnv& boxes,
                            const Functional& f, const BoxSet& a,
                            std::int64_t n_samples, SeedSpec seed,
                            int workers = 1, double sigmas = 3.0);
Estimate derivative_norm_sq(const JumpModel& model, const PathFunctional& f,
                            const BoxSet& a, std::int64_t n_samples,
                            SeedSpec seed, int workers = 1,
                            double sigmas = 3.0);

struct MeckePair {
    Estimate lhs;  // integral of E[F(X + x 1_[t,inf))] over A against dt nu
    Estimate rhs;  // E[N(A) F(X)]
    bool negativity_warning = false;  // F took a negative value somewhere
};

MeckePair mecke_check(const JumpModel& model, const BoxEnv& boxes,
                      const Functional& f, const BoxSet& a,
                      std::int64_t n_samples, SeedSpec seed, int workers = 1,
                      double sigmas = 3.0);

struct PathwisePair {
    double lhs = 0.0;
    double rhs = 0.0;
};

// D(fg) vs f Dg + g Df + x Df Dg, all derivatives as quotients; exact
// pathwise up to floating point.
PathwisePair product_rule_check(const JumpModel& model, const BoxEnv& boxes,
                                const Functional& f, const Functional& g,
                                const JumpPath& path, DerivativePoint p);

// Lipschitz post-compositions available for the chain rule.
struct LipschitzFn {
    enum class Kind { Clamp, Abs, MinConst, MaxConst };

    static LipschitzFn clamp(double lo, double hi);
    static LipschitzFn abs();
    static LipschitzFn min_const(double c);
    static LipschitzFn max_const(double c);

    double operator()(double y) const;
    // g composed onto an expression, using only DSL operators
    ExprPtr compose(const ExprPtr& e) const;

    Kind kind = Kind::Abs;
    double lo = 0.0, hi = 0.0, c = 0.0;
};

// D g(Y) vs (g(Y + x DY) - g(Y)) / x; exact pathwise up to floating point.
PathwisePair chain_rule_check(const JumpModel& model, const BoxEnv& boxes,
                              const LipschitzFn& g, const Functional& f,
                              const JumpPath& path, DerivativePoint p);

// E[Y|F_A] on grids: zero every tensor entry with an index cell outside A.
// Cells must be inside A or disjoint from it; straddling cells are an error.
CoefficientGrid conditional_projection(const CoefficientGrid& grid,
                                       const BoxSet& a);

// E[Y|F_A](path) by Monte Carlo: keep the path's A-jumps, resample the
// complement, average f over the merged paths.
double conditional_mc(const JumpModel& model, const PathFunctional& f,
                      const BoxSet& a, const JumpPath& path,
                      std::int64_t resamples, SeedSpec seed);
double conditional_mc(const JumpModel& model, const BoxEnv& boxes,
                      const Functional& f, const BoxSet& a,
                      const JumpPath& path, std::int64_t resamples,
                      SeedSpec seed);

}  // namespace levylab
