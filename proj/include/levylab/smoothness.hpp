// SPDX-License-Identifier: Apache-2.0
//
// Weighted-norm estimators and the numerical form of the main theorems:
// the D_{1,2} sandwich between |  ||Y sqrt(N(A))|| - ||Y|| sqrt(E N(A)) |
// and ||DY 1_A||, the norm equivalence with constant sqrt(2)(sqrt(EN)+1),
// the K-functional surrogate ||Y min{1, s sqrt(N(A)+1)}||, the interpolation
// norm quadrature with power-law tails, and the finite/divergent classifier
// for E[Y^2 N(A)^theta].
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "levylab/estimate.hpp"
#include "levylab/functional.hpp"
#include "levylab/malliavin.hpp"
#include "levylab/series.hpp"

namespace levylab {

// ||Y (N(A)+1)^(theta/2)||_{L2(P)} with a delta-method standard error.
// theta = 0 gives the plain L2 norm, theta = 1 the D_{1,2} weight.
Estimate weighted_norm(const JumpModel& model, const BoxEnv& boxes,
                       const Functional& f, const BoxSet& a, double theta,
                       std::int64_t n_samples, SeedSpec seed, int workers = 1,
                       double sigmas = 3.0);

// Same weight, but the second moment E[Y^2 (N(A)+1)^theta] as an Estimate.
Estimate weighted_moment(const JumpModel& model, const BoxEnv& boxes,
                         const Functional& f, const BoxSet& a, double theta,
                         std::int64_t n_samples, SeedSpec seed,
                         int workers = 1, double sigmas = 3.0);

// Exact Poisson series sum_n phi(n)^2 (n+1)^theta e^-lambda lambda^n / n!
// for f = phi(count(A)), truncated at m with the dyadic decision rule.
// Throws if f is not a function of count(box_name) alone.
SeriesScan exact_series_norm(const JumpModel& model, const Functional& f,
                             const std::string& box_name, const BoxSet& a,
                             double theta, std::int64_t m);

struct SandwichReport {
    Estimate a;        // ||Y sqrt(N(A))||
    Estimate b;        // ||Y|| sqrt(E N(A))
    Estimate d;        // ||DY 1_A||
    double gap = 0.0;  // |a - b|
    double gap_tolerance = 0.0;    // sigmas * combined se for inequality 1
    double sum_tolerance = 0.0;    // sigmas * combined se for inequality 2
    bool inequality1 = false;      // |a - b| <= d + tol
    bool inequality2 = false;      // d <= a + b + tol
    double sigmas = 3.0;
};

SandwichReport sandwich_check(const JumpModel& model, const BoxEnv& boxes,
                              const Functional& f, const BoxSet& a,
                              std::int64_t n_samples, SeedSpec seed,
                              int workers = 1, double sigmas = 3.0);

struct EquivalenceReport {
    double ratio = 0.0;  // D_{1,2} proxy / || Y sqrt(N(A)+1) ||
    double std_error = 0.0;
    double band_low = 0.0;   // 1/c
    double band_high = 0.0;  // c = sqrt(2)(sqrt(E N(A)) + 1)
    bool pass = false;
    Estimate proxy;     // (E Y^2 + ||DY 1_A||^2)^(1/2)
    Estimate weighted;  // || Y sqrt(N(A)+1) ||
    double sigmas = 3.0;
};

// Requires the F_A-measurability certificate (theorem hypothesis); throws
// on uncertified functionals, naming the offending boxes.
EquivalenceReport equivalence_ratio(const JumpModel& model,
                                    const BoxEnv& boxes, const Functional& f,
                                    const BoxSet& a, std::int64_t n_samples,
                                    SeedSpec seed, int workers = 1,
                                    double sigmas = 3.0);

// || Y min{1, s sqrt(N(A)+1)} ||, the K-functional surrogate at scale s.
Estimate k_surrogate(const JumpModel& model, const BoxEnv& boxes,
                     const Functional& f, const BoxSet& a, double s,
                     std::int64_t n_samples, SeedSpec seed, int workers = 1,
                     double sigmas = 3.0);

// ||Y_0|| + s * (E[Y_1^2] + ||DY_1 1_A||^2)^(1/2) for the explicit split
// Y_0 = Y 1{s sqrt(N(A)+1) >= 1}; an admissible competitor, hence an upper
// bound for K(Y, s).
Estimate k_upper(const JumpModel& model, const BoxEnv& boxes,
                 const Functional& f, const BoxSet& a, double s,
                 std::int64_t n_samples, SeedSpec seed, int workers = 1,
                 double sigmas = 3.0);

struct QuadratureGrid {
    double s_min = 1e-3;
    double s_max = 1e3;
    int points = 512;  // log-spaced; the min-kink gets split exactly
};

// integral of s^(-2 theta) min{1, s^2 c^2} ds/s: closed form and the
// log-Simpson quadrature with analytic power-law tails.
double closed_form_theta_integral(double c, double theta);
double theta_integral_quadrature(double c, double theta,
                                 const QuadratureGrid& grid = {1e-3, 1e3,
                                                               10000});

struct InterpolationResult {
    Estimate norm;            // [ integral |s^-theta surrogate|^2 ds/s ]^1/2
    double quad_error = 0.0;  // |fine - half-resolution| on the squared value
    bool tail_warning = false;
    // Fubini reference from the same paths: E[Y^2 (N+1)^theta]/(2theta(1-theta))
    Estimate fubini_reference;
    // mean and se of the per-path quadrature-minus-closed-form defect
    double defect = 0.0;
    double defect_se = 0.0;
    std::vector<std::pair<double, double>> profile;  // (s, surrogate(s))
};

InterpolationResult interpolation_norm(const JumpModel& model,
                                       const BoxEnv& boxes,
                                       const Functional& f, const BoxSet& a,
                                       double theta, std::int64_t n_samples,
                                       SeedSpec seed,
                                       const QuadratureGrid& grid = {},
                                       int workers = 1, double sigmas = 3.0,
                                       bool with_profile = false);

struct Verdict {
    SeriesStatus status = SeriesStatus::Inconclusive;
    bool exact_mode = false;
    // E[Y^2 N(A)^theta]: truncated series (exact mode) or MC mean
    double weighted_moment = 0.0;
    double weighted_norm = 0.0;  // sqrt of the above
    Estimate estimate;           // MC mode only
    SeriesScan scan;             // exact mode diagnostics (growth trace)
    std::string note;
};

// Theorem criterion E[Y^2 N(A)^theta] < infinity; theta = 1 is the D_{1,2}
// membership test. Exact-series mode when f = phi(count(box_name)); MC mode
// (never "divergent") otherwise. Requires the measurability certificate.
Verdict classify(const JumpModel& model, const BoxEnv& boxes,
                 const Functional& f, const std::string& box_name,
                 double theta, std::int64_t n_samples, SeedSpec seed,
                 std::int64_t truncation, int workers = 1,
                 double sigmas = 3.0);

// Series-mode classifier for phi given directly in log space
// (log_phi_sq(n, ln n!) = ln phi(n)^2, -inf where phi(n) = 0).
Verdict classify_series(
    double lambda, double theta, std::int64_t truncation,
    const std::function<double(std::int64_t, double)>& log_phi_sq);

}  // namespace levylab
