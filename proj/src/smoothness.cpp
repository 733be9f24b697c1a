// SPDX-License-Identifier: Apache-2.0
#include "levylab/smoothness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "levylab/errors.hpp"

namespace levylab {

namespace {

constexpr std::uint64_t kSubStream = std::uint64_t{1} << 32;

double count_weight(std::int64_t n, double theta) {
    return std::pow(static_cast<double>(n) + 1.0, theta);
}

}  // namespace

// ---------------------------------------------------------------------------
// Weighted norms
// ---------------------------------------------------------------------------

Estimate weighted_moment(const JumpModel& model, const BoxEnv& boxes,
                         const Functional& f, const BoxSet& a, double theta,
                         std::int64_t n_samples, SeedSpec seed, int workers,
                         double sigmas) {
    if (theta < 0.0 || theta > 1.0) throw Error("theta must lie in [0, 1]");
    return estimate_mean(
        n_samples, seed, workers, sigmas, [&](std::int64_t, Rng& rng) {
            JumpPath path = sample_path(model, rng, seed);
            double y = evaluate(f, model, boxes, path);
            return y * y * count_weight(count_in(path, a), theta);
        });
}

Estimate weighted_norm(const JumpModel& model, const BoxEnv& boxes,
                       const Functional& f, const BoxSet& a, double theta,
                       std::int64_t n_samples, SeedSpec seed, int workers,
                       double sigmas) {
    if (theta < 0.0 || theta > 1.0) throw Error("theta must lie in [0, 1]");
    auto moments = run_mc(
        1, n_samples, seed, workers,
        [&](std::int64_t, Rng& rng, std::span<double> out) {
            JumpPath path = sample_path(model, rng, seed);
            double y = evaluate(f, model, boxes, path);
            out[0] = y * y * count_weight(count_in(path, a), theta);
        });
    return moments.sqrt_component(0, sigmas, seed);
}

SeriesScan exact_series_norm(const JumpModel& model, const Functional& f,
                             const std::string& box_name, const BoxSet& a,
                             double theta, std::int64_t m) {
    auto phi = as_count_function(f, box_name);
    if (!phi)
        throw Error("exact_series_norm: functional must depend on the path "
                    "only through count(" + box_name + ")");
    double lambda = expected_count(model, a);
    return scan_series(m, [&](std::int64_t n, double lnfact) {
        double value;
        try {
            value = (*phi)(n);
        } catch (const Error&) {
            return std::numeric_limits<double>::quiet_NaN();  // stop scan
        }
        if (value == 0.0) return 0.0;
        double log_term = 2.0 * std::log(std::abs(value)) +
                          theta * std::log1p(static_cast<double>(n)) +
                          log_poisson_pmf(n, lambda, lnfact);
        return std::exp(log_term);
    });
}

// ---------------------------------------------------------------------------
// Sandwich and equivalence
// ---------------------------------------------------------------------------

SandwichReport sandwich_check(const JumpModel& model, const BoxEnv& boxes,
                              const Functional& f, const BoxSet& a,
                              std::int64_t n_samples, SeedSpec seed,
                              int workers, double sigmas) {
    double lambda = expected_count(model, a);
    auto moments = run_mc(
        2, n_samples, seed, workers,
        [&](std::int64_t, Rng& rng, std::span<double> out) {
            JumpPath path = sample_path(model, rng, seed);
            double y = evaluate(f, model, boxes, path);
            out[0] = y * y;
            out[1] = y * y * count_in(path, a);
        });

    SandwichReport report;
    report.sigmas = sigmas;
    double m_ysq = moments.mean(0);
    double m_ysqn = moments.mean(1);
    report.a = moments.sqrt_component(1, sigmas, seed);
    Estimate ynorm = moments.sqrt_component(0, sigmas, seed);
    report.b = make_estimate(ynorm.mean * std::sqrt(lambda),
                             ynorm.std_error * std::sqrt(lambda), n_samples,
                             sigmas, seed);

    SeedSpec d_seed{seed.master, seed.stream + kSubStream};
    Estimate dsq = derivative_norm_sq(model, boxes, f, a, n_samples, d_seed,
                                      workers, sigmas);
    double d = std::sqrt(std::max(0.0, dsq.mean));
    double d_se = d > 0.0 ? dsq.std_error / (2.0 * d) : dsq.std_error;
    report.d = make_estimate(d, d_se, n_samples, sigmas, d_seed);

    // covariance-aware se of a -+ b (a and b share the sample set)
    auto ab_variance = [&](double sign_b) {
        double ga = m_ysqn > 0.0 ? 1.0 / (2.0 * std::sqrt(m_ysqn)) : 0.0;
        double gb =
            m_ysq > 0.0 ? sign_b * std::sqrt(lambda) / (2.0 * std::sqrt(m_ysq))
                        : 0.0;
        double grad[2] = {gb, ga};
        return moments.gradient_variance(std::span<const double>(grad, 2));
    };
    double se_gap = std::sqrt(ab_variance(-1.0) + d_se * d_se);
    double se_sum = std::sqrt(ab_variance(+1.0) + d_se * d_se);

    report.gap = std::abs(report.a.mean - report.b.mean);
    report.gap_tolerance = sigmas * se_gap;
    report.sum_tolerance = sigmas * se_sum;
    report.inequality1 = report.gap <= report.d.mean + report.gap_tolerance;
    report.inequality2 =
        report.d.mean <= report.a.mean + report.b.mean + report.sum_tolerance;
    return report;
}

EquivalenceReport equivalence_ratio(const JumpModel& model,
                                    const BoxEnv& boxes, const Functional& f,
                                    const BoxSet& a, std::int64_t n_samples,
                                    SeedSpec seed, int workers,
                                    double sigmas) {
    auto cert = measurability(f, model, boxes, a);
    if (!cert.certified) {
        std::string what =
            "equivalence_ratio requires an F_A-measurability certificate; "
            "offending reads:";
        for (const auto& name : cert.offending) what += " " + name;
        throw Error(what);
    }
    double lambda = expected_count(model, a);
    auto moments = run_mc(
        2, n_samples, seed, workers,
        [&](std::int64_t, Rng& rng, std::span<double> out) {
            JumpPath path = sample_path(model, rng, seed);
            double y = evaluate(f, model, boxes, path);
            out[0] = y * y;
            out[1] = y * y * (count_in(path, a) + 1.0);
        });

    SeedSpec d_seed{seed.master, seed.stream + kSubStream};
    Estimate dsq = derivative_norm_sq(model, boxes, f, a, n_samples, d_seed,
                                      workers, sigmas);

    double m_ysq = moments.mean(0);
    double m_w = moments.mean(1);
    double proxy_sq = m_ysq + std::max(0.0, dsq.mean);
    double proxy = std::sqrt(std::max(0.0, proxy_sq));
    double w = std::sqrt(std::max(0.0, m_w));

    EquivalenceReport report;
    report.sigmas = sigmas;
    report.proxy = make_estimate(
        proxy,
        proxy > 0.0 ? std::sqrt(moments.mean_cov(0, 0) +
                                dsq.std_error * dsq.std_error) /
                          (2.0 * proxy)
                    : 0.0,
        n_samples, sigmas, seed);
    report.weighted = moments.sqrt_component(1, sigmas, seed);

    if (!(w > 0.0) || !(proxy > 0.0))
        throw Error("equivalence_ratio: norms vanish; ratio undefined");
    double ratio = proxy / w;
    // delta method on (m_ysq, m_w) plus the independent derivative estimate
    double g0 = ratio / (2.0 * proxy_sq);
    double g1 = -ratio / (2.0 * m_w);
    double grad[2] = {g0, g1};
    double var = moments.gradient_variance(std::span<const double>(grad, 2)) +
                 g0 * g0 * dsq.std_error * dsq.std_error;

    report.ratio = ratio;
    report.std_error = std::sqrt(var);
    double c = std::numbers::sqrt2 * (std::sqrt(lambda) + 1.0);
    report.band_low = 1.0 / c;
    report.band_high = c;
    report.pass = ratio >= report.band_low - sigmas * report.std_error &&
                  ratio <= report.band_high + sigmas * report.std_error;
    return report;
}

// ---------------------------------------------------------------------------
// K-functional surrogate and upper bound
// ---------------------------------------------------------------------------

Estimate k_surrogate(const JumpModel& model, const BoxEnv& boxes,
                     const Functional& f, const BoxSet& a, double s,
                     std::int64_t n_samples, SeedSpec seed, int workers,
                     double sigmas) {
    if (!(s > 0.0)) throw Error("surrogate scale s must be > 0");
    auto moments = run_mc(
        1, n_samples, seed, workers,
        [&](std::int64_t, Rng& rng, std::span<double> out) {
            JumpPath path = sample_path(model, rng, seed);
            double y = evaluate(f, model, boxes, path);
            double w = std::min(1.0, s * s * (count_in(path, a) + 1.0));
            out[0] = y * y * w;
        });
    return moments.sqrt_component(0, sigmas, seed);
}

Estimate k_upper(const JumpModel& model, const BoxEnv& boxes,
                 const Functional& f, const BoxSet& a, double s,
                 std::int64_t n_samples, SeedSpec seed, int workers,
                 double sigmas) {
    if (!(s > 0.0)) throw Error("scale s must be > 0");
    auto cert = measurability(f, model, boxes, a);
    if (!cert.certified)
        throw Error("k_upper requires an F_A-measurability certificate "
                    "(the split proxy equals the D_{1,2} norm only then)");
    // split Y_0 = Y 1{N >= 1/s^2 - 1}; N is an integer, so a half-offset
    // threshold makes the comparison exact
    double threshold = std::ceil(1.0 / (s * s) - 1.0) - 0.5;
    PathFunctional y1_fn = [&](const JumpPath& path) {
        double y = evaluate(f, model, boxes, path);
        return count_in(path, a) > threshold ? 0.0 : y;
    };

    auto moments = run_mc(
        2, n_samples, seed, workers,
        [&](std::int64_t, Rng& rng, std::span<double> out) {
            JumpPath path = sample_path(model, rng, seed);
            double y = evaluate(f, model, boxes, path);
            bool above = count_in(path, a) > threshold;
            double v0 = above ? y : 0.0;
            double v1 = above ? 0.0 : y;
            out[0] = v0 * v0;
            out[1] = v1 * v1;
        });
    Estimate norm0 = moments.sqrt_component(0, sigmas, seed);

    SeedSpec d_seed{seed.master, seed.stream + kSubStream};
    Estimate dsq = derivative_norm_sq(model, y1_fn, a, n_samples, d_seed,
                                      workers, sigmas);
    double proxy_sq = moments.mean(1) + std::max(0.0, dsq.mean);
    double proxy = std::sqrt(std::max(0.0, proxy_sq));
    double proxy_se =
        proxy > 0.0
            ? std::sqrt(moments.mean_cov(1, 1) +
                        dsq.std_error * dsq.std_error) / (2.0 * proxy)
            : 0.0;

    double value = norm0.mean + s * proxy;
    double se = norm0.std_error + s * proxy_se;  // conservative
    return make_estimate(value, se, n_samples, sigmas, seed);
}

// ---------------------------------------------------------------------------
// theta-integral quadrature
// ---------------------------------------------------------------------------

double closed_form_theta_integral(double c, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw Error("theta must lie in (0, 1)");
    if (!(c > 0.0)) throw Error("c must be > 0");
    return std::pow(c, 2.0 * theta) / (2.0 * theta * (1.0 - theta));
}

namespace {

// composite Simpson over [a, b] in the log variable, n even intervals
template <typename F>
double simpson(F&& f, double a, double b, int n) {
    if (!(b > a)) return 0.0;
    if (n < 2) n = 2;
    if (n % 2) ++n;
    double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

struct MinIntegral {
    double value = 0.0;
    bool tail_warning = false;
};

// integral of s^(-2 theta) min{1, s^2 c^2} ds/s over (0, inf): exact
// power-law tails outside [s_min, s_max], log-Simpson inside, with the kink
// at s = 1/c split out so both pieces are smooth.
MinIntegral min_weight_integral(double c, double theta,
                                const QuadratureGrid& grid, int points) {
    MinIntegral out;
    double kink = 1.0 / c;
    out.tail_warning = kink < grid.s_min || grid.s_max < kink;

    // [0, s_min): rising branch s^(1-2 theta) c^2, switching to the flat
    // branch early when the kink sits below the grid
    double lo_tail;
    if (kink >= grid.s_min) {
        lo_tail = c * c * std::pow(grid.s_min, 2.0 - 2.0 * theta) /
                  (2.0 - 2.0 * theta);
    } else {
        lo_tail = c * c * std::pow(kink, 2.0 - 2.0 * theta) /
                      (2.0 - 2.0 * theta) +
                  (std::pow(kink, -2.0 * theta) -
                   std::pow(grid.s_min, -2.0 * theta)) / (2.0 * theta);
    }
    // [s_max, inf): integrand is s^(-1-2 theta) when the kink is below s_max
    double hi_tail = kink <= grid.s_max
                         ? std::pow(grid.s_max, -2.0 * theta) / (2.0 * theta)
                         : c * c *
                                   (std::pow(kink, 2.0 - 2.0 * theta) -
                                    std::pow(grid.s_max, 2.0 - 2.0 * theta)) /
                                   (2.0 - 2.0 * theta) +
                               std::pow(kink, -2.0 * theta) / (2.0 * theta);

    auto integrand = [c, theta](double u) {
        double s = std::exp(u);
        return std::pow(s, -2.0 * theta) *
               std::min(1.0, s * s * c * c);
    };
    double u_min = std::log(grid.s_min);
    double u_max = std::log(grid.s_max);
    double u_kink = std::log(kink);
    double middle = 0.0;
    if (u_kink <= u_min || u_kink >= u_max) {
        middle = simpson(integrand, u_min, u_max, points);
    } else {
        double frac = (u_kink - u_min) / (u_max - u_min);
        int n_lo = std::max(2, static_cast<int>(points * frac));
        int n_hi = std::max(2, points - n_lo);
        middle = simpson(integrand, u_min, u_kink, n_lo) +
                 simpson(integrand, u_kink, u_max, n_hi);
    }
    out.value = lo_tail + middle + hi_tail;
    return out;
}

}  // namespace

double theta_integral_quadrature(double c, double theta,
                                 const QuadratureGrid& grid) {
    if (!(theta > 0.0 && theta < 1.0))
        throw Error("theta must lie in (0, 1)");
    if (!(c > 0.0)) throw Error("c must be > 0");
    return min_weight_integral(c, theta, grid, grid.points).value;
}

// ---------------------------------------------------------------------------
// Interpolation norm
// ---------------------------------------------------------------------------

InterpolationResult interpolation_norm(const JumpModel& model,
                                       const BoxEnv& boxes,
                                       const Functional& f, const BoxSet& a,
                                       double theta, std::int64_t n_samples,
                                       SeedSpec seed,
                                       const QuadratureGrid& grid,
                                       int workers, double sigmas,
                                       bool with_profile) {
    if (!(theta > 0.0 && theta < 1.0))
        throw Error("theta must lie in (0, 1)");
    if (!(grid.s_min <= 1e-3 && grid.s_max >= 1e3))
        throw Error("s grid must span at least [1e-3, 1e3]");

    // per-count quadrature weights, cached: the integrand depends on the
    // path only through N
    constexpr std::int64_t kCacheCap = 1024;
    std::vector<double> fine(kCacheCap), coarse(kCacheCap), exact(kCacheCap);
    bool warn = false;
    for (std::int64_t n = 0; n < kCacheCap; ++n) {
        double c = std::sqrt(static_cast<double>(n) + 1.0);
        auto fi = min_weight_integral(c, theta, grid, grid.points);
        auto co = min_weight_integral(c, theta, grid, grid.points / 2);
        fine[static_cast<std::size_t>(n)] = fi.value;
        coarse[static_cast<std::size_t>(n)] = co.value;
        exact[static_cast<std::size_t>(n)] =
            closed_form_theta_integral(c, theta);
        warn = warn || fi.tail_warning;
    }

    auto moments = run_mc(
        5, n_samples, seed, workers,
        [&](std::int64_t, Rng& rng, std::span<double> out) {
            JumpPath path = sample_path(model, rng, seed);
            double y = evaluate(f, model, boxes, path);
            std::int64_t n = count_in(path, a);
            if (n >= kCacheCap)
                throw Error("interpolation_norm: count exceeded cache");
            double ysq = y * y;
            out[0] = ysq;
            out[1] = ysq * fine[static_cast<std::size_t>(n)];
            out[2] = ysq * coarse[static_cast<std::size_t>(n)];
            out[3] = ysq * exact[static_cast<std::size_t>(n)];
            out[4] = ysq * (fine[static_cast<std::size_t>(n)] -
                            exact[static_cast<std::size_t>(n)]);
        });

    InterpolationResult result;
    result.norm = moments.sqrt_component(1, sigmas, seed);
    result.quad_error = std::abs(moments.mean(1) - moments.mean(2));
    result.tail_warning = warn;
    result.fubini_reference = moments.component(3, sigmas, seed);
    result.defect = moments.mean(4);
    result.defect_se = moments.std_error(4);

    if (with_profile) {
        // per-count Y^2 totals make the whole s-profile one sequential pass
        std::map<std::int64_t, double> ysq_by_count;
        for (std::int64_t i = 0; i < n_samples; ++i) {
            Rng rng(seed.master, seed.stream + static_cast<std::uint64_t>(i));
            JumpPath path = sample_path(model, rng, seed);
            double y = evaluate(f, model, boxes, path);
            ysq_by_count[count_in(path, a)] += y * y;
        }
        result.profile.reserve(static_cast<std::size_t>(grid.points) + 1);
        for (int i = 0; i <= grid.points; ++i) {
            double s = grid.s_min *
                       std::pow(grid.s_max / grid.s_min,
                                static_cast<double>(i) / grid.points);
            double acc = 0.0;
            for (const auto& [n, ysq] : ysq_by_count)
                acc += ysq *
                       std::min(1.0, s * s * (static_cast<double>(n) + 1.0));
            result.profile.emplace_back(
                s, std::sqrt(acc / static_cast<double>(n_samples)));
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

namespace {

Verdict verdict_from_scan(SeriesScan scan) {
    Verdict v;
    v.exact_mode = true;
    v.status = scan.status;
    v.weighted_moment = scan.partial;
    v.weighted_norm = std::sqrt(std::max(0.0, scan.partial));
    v.scan = std::move(scan);
    return v;
}

}  // namespace

Verdict classify_series(
    double lambda, double theta, std::int64_t truncation,
    const std::function<double(std::int64_t, double)>& log_phi_sq) {
    return verdict_from_scan(
        scan_series(truncation, [&](std::int64_t n, double lnfact) {
            double lp = log_phi_sq(n, lnfact);
            if (std::isnan(lp)) return lp;
            if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
            double weight =
                n == 0 ? (theta == 0.0 ? 0.0
                                       : -std::numeric_limits<double>::infinity())
                       : theta * std::log(static_cast<double>(n));
            if (weight == -std::numeric_limits<double>::infinity())
                return 0.0;  // n^theta = 0 at n = 0
            return std::exp(lp + weight + log_poisson_pmf(n, lambda, lnfact));
        }));
}

Verdict classify(const JumpModel& model, const BoxEnv& boxes,
                 const Functional& f, const std::string& box_name,
                 double theta, std::int64_t n_samples, SeedSpec seed,
                 std::int64_t truncation, int workers, double sigmas) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw Error("classify: theta must lie in (0, 1]");
    auto it = boxes.find(box_name);
    if (it == boxes.end()) throw Error("unbound box name '" + box_name + "'");
    const BoxSet& a = it->second;
    auto cert = measurability(f, model, boxes, a);
    if (!cert.certified) {
        std::string what =
            "classify requires an F_A-measurability certificate; offending "
            "reads:";
        for (const auto& name : cert.offending) what += " " + name;
        throw Error(what);
    }

    if (auto phi = as_count_function(f, box_name)) {
        double lambda = expected_count(model, a);
        Verdict v = classify_series(
            lambda, theta, truncation,
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
        v.note = "exact series over count(" + box_name + ")";
        return v;
    }

    // MC mode: one deterministic sequential pass; keep (Y^2 N^theta, N)
    (void)workers;  // the pass is cheap and sequential keeps it bit-stable
    Verdict v;
    v.exact_mode = false;
    std::vector<double> z(static_cast<std::size_t>(n_samples));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(n_samples));
    for (std::int64_t i = 0; i < n_samples; ++i) {
        Rng rng(seed.master, seed.stream + static_cast<std::uint64_t>(i));
        JumpPath path = sample_path(model, rng, seed);
        double y = evaluate(f, model, boxes, path);
        std::int64_t n = count_in(path, a);
        z[static_cast<std::size_t>(i)] =
            y * y * std::pow(static_cast<double>(n), theta);
        counts[static_cast<std::size_t>(i)] = n;
    }
    double mean = 0.0;
    for (double v_i : z) mean += v_i;
    mean /= static_cast<double>(n_samples);
    double var = 0.0;
    for (double v_i : z) var += (v_i - mean) * (v_i - mean);
    var /= std::max<std::int64_t>(1, n_samples - 1);
    double se = std::sqrt(var / static_cast<double>(n_samples));
    v.estimate = make_estimate(mean, se, n_samples, sigmas, seed);
    v.weighted_moment = mean;
    v.weighted_norm = std::sqrt(std::max(0.0, mean));

    // truncated moments E[Y^2 N^theta 1{N <= m}] on dyadic m: still growing
    // at the top end means the tail is not under control
    std::int64_t max_count = 0;
    for (std::int64_t c : counts) max_count = std::max(max_count, c);
    double prev = 0.0, last_window = 0.0;
    for (std::int64_t m = 1;; m *= 2) {
        double truncated = 0.0;
        for (std::int64_t i = 0; i < n_samples; ++i)
            if (counts[static_cast<std::size_t>(i)] <= m)
                truncated += z[static_cast<std::size_t>(i)];
        truncated /= static_cast<double>(n_samples);
        last_window = truncated - prev;
        prev = truncated;
        if (m >= max_count) break;
    }
    double tolerance = std::max(sigmas * se, 0.01 * std::abs(mean));
    v.status = last_window <= tolerance ? SeriesStatus::Finite
                                        : SeriesStatus::Inconclusive;
    v.note = "Monte Carlo mode; divergence not decidable from samples";
    return v;
}

}  // namespace levylab
