// SPDX-License-Identifier: Apache-2.0
//
// The Young pair Phi(x) = (x+1)ln(x+1) - x, Phi*(x) = e^x - x - 1, the
// L2 log+ L2 norm E[Y^2 ln+ Y^2], the exact Phi*-moment of a Poisson count,
// and the strictness counterexample f(n) = sqrt(e^l (n!/l^n) / (n^2 ln^a n)).
// Everything involving n!/lambda^n works in log space; ln n! is a running
// sum of ln k, cross-checked against Stirling.
#pragma once

#include <cstdint>
#include <utility>

#include "levylab/estimate.hpp"
#include "levylab/functional.hpp"
#include "levylab/series.hpp"

namespace levylab {

double young_phi(double x);       // (x+1) ln(x+1) - x
double young_phi_star(double x);  // e^x - x - 1
double young_phi_inverse_density(double y);  // phi(y) = ln(y+1)

// (xy, Phi(x) + Phi*(y)); the Young inequality says lhs <= rhs on x,y >= 0.
std::pair<double, double> young_check(double x, double y);

// Monte Carlo estimate of E[Y^2 ln+ Y^2].
Estimate l2log_norm(const JumpModel& model, const BoxEnv& boxes,
                    const Functional& f, std::int64_t n_samples,
                    SeedSpec seed, int workers = 1, double sigmas = 3.0);

// Series mode for phi given in log space: terms phi(n)^2 ln+(phi(n)^2) times
// the Poisson(lambda) pmf, scanned with the dyadic decision rule.
SeriesScan l2log_series(
    double lambda, std::int64_t truncation,
    const std::function<double(std::int64_t, double)>& log_phi_sq);

// Exact-series mode for a DSL functional of the count alone,
// f = phi(count(box_name)); throws otherwise.
SeriesScan exact_l2log_series(const JumpModel& model, const Functional& f,
                              const std::string& box_name, const BoxSet& a,
                              std::int64_t truncation);

struct PhiStarMoment {
    double exact = 0.0;        // e^((e-1) lambda) - lambda - 1
    double paper_bound = 0.0;  // e^((e-1) lambda) - lambda
};

// E[Phi*(N)] for N ~ Poisson(lambda), via the generating function
// E[e^N] = e^(lambda(e-1)); exact, plus the stated upper bound.
PhiStarMoment phi_star_moment(double lambda);

// f(0) = f(1) = 0, f(n) = sqrt(e^lambda (n!/lambda^n) / (n^2 ln^a n)).
// Values that overflow a double come back +inf; series consumers use the
// log form below instead.
double counterexample_f(std::int64_t n, double lambda, double a);
// ln f(n)^2 given ln n!; -inf at n = 0, 1.
double counterexample_log_f_sq(std::int64_t n, double lambda, double a,
                               double ln_factorial);

// E[N f^2(N)]: terms reduce to 1/(n ln^a n) exactly; finite for a > 1.
SeriesScan counterexample_d12_series(double lambda, double a,
                                     std::int64_t truncation);
// E[f^2(N) ln+ f^2(N)] scan (diverges for a <= 2).
SeriesScan counterexample_l2log_series(double lambda, double a,
                                       std::int64_t truncation);

struct DivergenceCertificate {
    bool certified = false;
    std::int64_t from_n = 0;   // per-term bound verified for n in [from_n, m]
    double min_ratio = 0.0;    // min over the scan of term / harmonic bound
    double comparison = 0.0;   // the constant the ratio must stay above
};

// Certify divergence of the ln+ series term by term: via
// ln n! >= n ln n - n + 1 each term dominates a fixed multiple of
// 1/(n ln^(a-1) n), whose sum diverges for a <= 2.
DivergenceCertificate certify_l2log_divergence(double lambda, double a,
                                               std::int64_t m);

}  // namespace levylab
