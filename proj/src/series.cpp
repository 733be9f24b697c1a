// SPDX-License-Identifier: Apache-2.0
#include "levylab/series.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "levylab/errors.hpp"

namespace levylab {

const char* series_status_name(SeriesStatus s) {
    switch (s) {
        case SeriesStatus::Finite: return "finite";
        case SeriesStatus::Divergent: return "divergent";
        case SeriesStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

double log_poisson_pmf(std::int64_t n, double lambda, double ln_factorial) {
    return -lambda + static_cast<double>(n) * std::log(lambda) - ln_factorial;
}

double stirling_log_factorial(std::int64_t n) {
    if (n < 2) return 0.0;
    double x = static_cast<double>(n);
    return x * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi * x)
           + 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x);
}

namespace {

// least-squares slope of y against x with its standard error
void fit_slope(const std::vector<double>& x, const std::vector<double>& y,
               double& slope, double& se) {
    std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    slope = sxy / sxx;
    if (n <= 2) {
        se = std::numeric_limits<double>::infinity();
        return;
    }
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = y[i] - my - slope * (x[i] - mx);
        rss += r * r;
    }
    se = std::sqrt(rss / (double(n) - 2.0) / sxx);
}

}  // namespace

SeriesScan scan_series(
    std::int64_t m_max,
    const std::function<double(std::int64_t, double)>& term) {
    if (m_max < 1) throw Error("series truncation must be >= 1");
    SeriesScan scan;
    double sum = 0.0;
    double ln_factorial = 0.0;  // ln 0! = 0
    std::int64_t checkpoint = 16;
    double prev_sum = 0.0;
    std::vector<double> increments;
    std::vector<std::int64_t> checkpoints;

    for (std::int64_t n = 0; n <= m_max; ++n) {
        if (n >= 2) ln_factorial += std::log(static_cast<double>(n));
        double t = term(n, ln_factorial);
        if (std::isnan(t)) {  // producer gave up (e.g. phi overflow)
            scan.trace.push_back({n, sum});
            increments.push_back(sum - prev_sum);
            checkpoints.push_back(n);
            break;
        }
        sum += t;
        if (std::isinf(sum)) {  // certified super-exponential growth
            scan.partial = sum;
            scan.status = SeriesStatus::Divergent;
            scan.trace.push_back({n, sum});
            return scan;
        }
        if (n == checkpoint || n == m_max) {
            scan.trace.push_back({n, sum});
            increments.push_back(sum - prev_sum);
            checkpoints.push_back(n);
            prev_sum = sum;
            if (n == checkpoint) checkpoint *= 2;
        }
    }
    scan.partial = sum;
    scan.last_increment = increments.empty() ? sum : increments.back();

    std::size_t k = increments.size();
    // underflowed tail: every recent window adds a negligible sliver
    if (k >= 1 &&
        std::abs(scan.last_increment) <= 1e-14 * std::max(1.0, std::abs(sum))) {
        scan.status = SeriesStatus::Finite;
        return scan;
    }
    if (k < 3) {
        scan.status = SeriesStatus::Inconclusive;
        return scan;
    }

    bool nondecreasing = increments[k - 1] >= increments[k - 2] &&
                         increments[k - 2] >= increments[k - 3];
    bool decreasing = increments[k - 1] < increments[k - 2] &&
                      increments[k - 2] < increments[k - 3];

    // fit ln(increment) vs ln(m) over the positive windows
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < k; ++i)
        if (increments[i] > 0.0) {
            lx.push_back(std::log(static_cast<double>(checkpoints[i])));
            ly.push_back(std::log(increments[i]));
        }
    double slope = 0.0, se = std::numeric_limits<double>::infinity();
    if (lx.size() >= 3) fit_slope(lx, ly, slope, se);
    scan.growth_exponent = slope;
    scan.growth_se = se;

    if (nondecreasing && slope > 2.0 * se)
        scan.status = SeriesStatus::Divergent;
    else if (decreasing && slope < -2.0 * se)
        scan.status = SeriesStatus::Finite;
    else
        scan.status = SeriesStatus::Inconclusive;
    return scan;
}

}  // namespace levylab
