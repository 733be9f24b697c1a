// SPDX-License-Identifier: Apache-2.0
//
// Scans of Poisson-weighted series sum_n term(n) with an explicit, documented
// finite/divergent decision rule over dyadic truncations. Terms are produced
// by a callback that receives ln n! (maintained as a running sum of ln k, so
// n!/lambda^n ratios can be formed in log space without overflow).
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace levylab {

enum class SeriesStatus { Finite, Divergent, Inconclusive };

const char* series_status_name(SeriesStatus s);

struct SeriesTracePoint {
    std::int64_t m = 0;   // truncation index
    double partial = 0.0; // partial sum through n = m
};

struct SeriesScan {
    double partial = 0.0;         // partial sum through m_max
    double last_increment = 0.0;  // mass added by the final dyadic window
    std::vector<SeriesTracePoint> trace;
    SeriesStatus status = SeriesStatus::Inconclusive;
    double growth_exponent = 0.0;  // slope of ln(increment) vs ln(m)
    double growth_se = 0.0;        // standard error of that slope
};

// term(n, ln_n_factorial) -> term value (callback does its own log-space
// arithmetic; +inf marks certified super-exponential blow-up).
//
// Decision rule on dyadic checkpoints m_0, 2 m_0, 4 m_0, ...:
//   divergent    iff the last three window increments are non-decreasing and
//                the fitted growth exponent exceeds 0 by 2 standard errors,
//                or the partial sum overflows;
//   finite       iff the last three window increments are strictly
//                decreasing and the fitted exponent is below 0 by 2 standard
//                errors, or increments fell below 1e-14 of the partial sum;
//   inconclusive otherwise.
SeriesScan scan_series(
    std::int64_t m_max,
    const std::function<double(std::int64_t, double)>& term);

// ln of the Poisson(lambda) pmf at n, given ln n!.
double log_poisson_pmf(std::int64_t n, double lambda, double ln_factorial);

// Stirling with two correction terms; reference for the running-sum ln n!.
double stirling_log_factorial(std::int64_t n);

}  // namespace levylab
