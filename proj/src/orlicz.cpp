// SPDX-License-Identifier: Apache-2.0
#include "levylab/orlicz.hpp"

#include <cmath>
#include <limits>

#include "levylab/errors.hpp"
#include "levylab/simulate.hpp"

namespace levylab {

namespace {
constexpr double kE = 2.718281828459045235360287;
}

double young_phi(double x) {
    if (x < 0.0) throw Error("young_phi defined for x >= 0");
    return (x + 1.0) * std::log1p(x) - x;
}

double young_phi_star(double x) {
    if (x < 0.0) throw Error("young_phi_star defined for x >= 0");
    return std::expm1(x) - x;
}

double young_phi_inverse_density(double y) {
    if (y < 0.0) throw Error("phi density defined for y >= 0");
    return std::log1p(y);
}

std::pair<double, double> young_check(double x, double y) {
    return {x * y, young_phi(x) + young_phi_star(y)};
}

Estimate l2log_norm(const JumpModel& model, const BoxEnv& boxes,
                    const Functional& f, std::int64_t n_samples,
                    SeedSpec seed, int workers, double sigmas) {
    return estimate_mean(
        n_samples, seed, workers, sigmas, [&](std::int64_t, Rng& rng) {
            JumpPath path = sample_path(model, rng, seed);
            double y = evaluate(f, model, boxes, path);
            double ysq = y * y;
            return ysq > 1.0 ? ysq * std::log(ysq) : 0.0;
        });
}

SeriesScan l2log_series(
    double lambda, std::int64_t truncation,
    const std::function<double(std::int64_t, double)>& log_phi_sq) {
    return scan_series(truncation, [&](std::int64_t n, double lnfact) {
        double lp = log_phi_sq(n, lnfact);
        if (std::isnan(lp)) return lp;
        if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
        double lnplus = std::max(lp, 0.0);
        if (lnplus == 0.0) return 0.0;
        return std::exp(lp + log_poisson_pmf(n, lambda, lnfact)) * lnplus;
    });
}

SeriesScan exact_l2log_series(const JumpModel& model, const Functional& f,
                              const std::string& box_name, const BoxSet& a,
                              std::int64_t truncation) {
    auto phi = as_count_function(f, box_name);
    if (!phi)
        throw Error("exact_l2log_series: functional must depend on the path "
                    "only through count(" + box_name + ")");
    double lambda = expected_count(model, a);
    return l2log_series(lambda, truncation,
                        [&phi](std::int64_t n, double) {
                            double value;
                            try {
                                value = (*phi)(n);
                            } catch (const Error&) {
                                return std::numeric_limits<double>::quiet_NaN();
                            }
                            if (value == 0.0)
                                return -std::numeric_limits<double>::infinity();
                            return 2.0 * std::log(std::abs(value));
                        });
}

PhiStarMoment phi_star_moment(double lambda) {
    if (!(lambda > 0.0)) throw Error("lambda must be > 0");
    PhiStarMoment m;
    m.exact = std::exp(lambda * (kE - 1.0)) - lambda - 1.0;
    m.paper_bound = std::exp(lambda * (kE - 1.0)) - lambda;
    return m;
}

double counterexample_log_f_sq(std::int64_t n, double lambda, double a,
                               double ln_factorial) {
    if (n < 2) return -std::numeric_limits<double>::infinity();
    double ln_n = std::log(static_cast<double>(n));
    return lambda + ln_factorial - static_cast<double>(n) * std::log(lambda)
           - 2.0 * ln_n - a * std::log(ln_n);
}

double counterexample_f(std::int64_t n, double lambda, double a) {
    if (!(lambda > 0.0)) throw Error("lambda must be > 0");
    if (!(a > 1.0 && a <= 2.0)) throw Error("a must lie in (1, 2]");
    if (n < 0) throw Error("n must be >= 0");
    if (n < 2) return 0.0;
    double ln_factorial = 0.0;  // running sum, the documented route
    for (std::int64_t k = 2; k <= n; ++k)
        ln_factorial += std::log(static_cast<double>(k));
    return std::exp(0.5 * counterexample_log_f_sq(n, lambda, a, ln_factorial));
}

SeriesScan counterexample_d12_series(double lambda, double a,
                                     std::int64_t truncation) {
    if (!(a > 1.0 && a <= 2.0)) throw Error("a must lie in (1, 2]");
    return scan_series(truncation, [&](std::int64_t n, double lnfact) {
        if (n < 2) return 0.0;
        // n f(n)^2 pois(n); the log pieces cancel to 1/(n ln^a n)
        double log_term = counterexample_log_f_sq(n, lambda, a, lnfact) +
                          std::log(static_cast<double>(n)) +
                          log_poisson_pmf(n, lambda, lnfact);
        return std::exp(log_term);
    });
}

SeriesScan counterexample_l2log_series(double lambda, double a,
                                       std::int64_t truncation) {
    if (!(a > 1.0 && a <= 2.0)) throw Error("a must lie in (1, 2]");
    return l2log_series(lambda, truncation,
                        [lambda, a](std::int64_t n, double lnfact) {
                            return counterexample_log_f_sq(n, lambda, a,
                                                           lnfact);
                        });
}

DivergenceCertificate certify_l2log_divergence(double lambda, double a,
                                               std::int64_t m) {
    if (!(a > 1.0 && a <= 2.0)) throw Error("a must lie in (1, 2]");
    DivergenceCertificate cert;
    cert.from_n = 64;
    cert.comparison = 0.5;
    cert.min_ratio = std::numeric_limits<double>::infinity();
    if (m < cert.from_n + 16) throw Error("scan range too short to certify");
    for (std::int64_t n = cert.from_n; n <= m; ++n) {
        double x = static_cast<double>(n);
        double ln_n = std::log(x);
        // f(n)^2 pois(n) cancels algebraically to 1/(n^2 ln^a n), and
        // ln n! >= n ln n - n + 1 bounds ln f(n)^2 from below, so each term
        // of the ln+ series dominates
        //   [l + n ln n - n + 1 - n ln l - 2 ln n - a ln ln n] / (n^2 ln^a n)
        double weight = x * x * std::pow(ln_n, a);
        double lower = lambda + x * ln_n - x + 1.0 - x * std::log(lambda) -
                       2.0 * ln_n - a * std::log(ln_n);
        double term_bound = std::max(lower, 0.0) / weight;
        // ... which is compared against 1/(n ln^(a-1) n); that series
        // diverges for a <= 2, so a uniform ratio >= comparison certifies
        double harmonic = 1.0 / (x * std::pow(ln_n, a - 1.0));
        cert.min_ratio = std::min(cert.min_ratio, term_bound / harmonic);
        if (cert.min_ratio < cert.comparison) break;
    }
    cert.certified = cert.min_ratio >= cert.comparison;
    return cert;
}

}  // namespace levylab
