// SPDX-License-Identifier: Apache-2.0
#include "levylab/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "levylab/errors.hpp"

namespace levylab {

namespace {
constexpr std::int64_t kBlockSize = 4096;
}

Estimate make_estimate(double mean, double std_error, std::int64_t samples,
                       double sigmas, SeedSpec seed) {
    Estimate e;
    e.mean = mean;
    e.std_error = std_error;
    e.samples = samples;
    e.sigmas = sigmas;
    e.ci_low = mean - sigmas * std_error;
    e.ci_high = mean + sigmas * std_error;
    e.seed = seed;
    return e;
}

VectorMoments::VectorMoments(std::size_t dim, std::int64_t n,
                             std::vector<double> sum,
                             std::vector<double> cross)
    : dim_(dim), n_(n), sum_(std::move(sum)), cross_(std::move(cross)) {}

double VectorMoments::mean_cov(std::size_t i, std::size_t j) const {
    if (n_ < 2) return 0.0;
    double n = double(n_);
    double cov = (cross_[i * dim_ + j] - sum_[i] * sum_[j] / n) / (n - 1.0);
    return cov / n;
}

double VectorMoments::std_error(std::size_t i) const {
    return std::sqrt(std::max(0.0, mean_cov(i, i)));
}

Estimate VectorMoments::component(std::size_t i, double sigmas,
                                  SeedSpec seed) const {
    return make_estimate(mean(i), std_error(i), n_, sigmas, seed);
}

Estimate VectorMoments::sqrt_component(std::size_t i, double sigmas,
                                       SeedSpec seed) const {
    double m = mean(i);
    double se = std_error(i);
    if (m <= 0.0) {
        // degenerate at the boundary; the se of sqrt is not defined there
        return make_estimate(std::sqrt(std::max(0.0, m)), se, n_, sigmas,
                             seed);
    }
    double root = std::sqrt(m);
    return make_estimate(root, se / (2.0 * root), n_, sigmas, seed);
}

double VectorMoments::gradient_variance(std::span<const double> grad) const {
    double var = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j)
            var += grad[i] * grad[j] * mean_cov(i, j);
    return std::max(0.0, var);
}

VectorMoments run_mc(std::size_t dim, std::int64_t n_samples, SeedSpec base,
                     int workers, const SampleFn& f) {
    if (n_samples <= 0) throw Error("sample budget must be > 0");
    if (workers < 1) workers = 1;

    const std::int64_t n_blocks = (n_samples + kBlockSize - 1) / kBlockSize;
    // per-block partials, reduced in block order after the fan-out
    std::vector<std::vector<double>> block_sum(
        static_cast<std::size_t>(n_blocks), std::vector<double>(dim, 0.0));
    std::vector<std::vector<double>> block_cross(
        static_cast<std::size_t>(n_blocks),
        std::vector<double>(dim * dim, 0.0));

    std::atomic<std::int64_t> next_block{0};
    auto work = [&]() {
        std::vector<double> out(dim);
        for (;;) {
            std::int64_t b = next_block.fetch_add(1);
            if (b >= n_blocks) break;
            std::int64_t lo = b * kBlockSize;
            std::int64_t hi = std::min(n_samples, lo + kBlockSize);
            auto& sum = block_sum[static_cast<std::size_t>(b)];
            auto& cross = block_cross[static_cast<std::size_t>(b)];
            for (std::int64_t i = lo; i < hi; ++i) {
                Rng rng(base.master, base.stream + static_cast<std::uint64_t>(i));
                f(i, rng, out);
                for (std::size_t p = 0; p < dim; ++p) {
                    sum[p] += out[p];
                    for (std::size_t q = 0; q < dim; ++q)
                        cross[p * dim + q] += out[p] * out[q];
                }
            }
        }
    };

    if (workers == 1 || n_blocks == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        int spawn = std::min<std::int64_t>(workers, n_blocks);
        pool.reserve(static_cast<std::size_t>(spawn));
        for (int w = 0; w < spawn; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    std::vector<double> sum(dim, 0.0);
    std::vector<double> cross(dim * dim, 0.0);
    for (std::int64_t b = 0; b < n_blocks; ++b) {
        for (std::size_t p = 0; p < dim; ++p)
            sum[p] += block_sum[static_cast<std::size_t>(b)][p];
        for (std::size_t pq = 0; pq < dim * dim; ++pq)
            cross[pq] += block_cross[static_cast<std::size_t>(b)][pq];
    }
    return VectorMoments(dim, n_samples, std::move(sum), std::move(cross));
}

Estimate estimate_mean(std::int64_t n_samples, SeedSpec base, int workers,
                       double sigmas,
                       const std::function<double(std::int64_t, Rng&)>& f) {
    auto moments = run_mc(
        1, n_samples, base, workers,
        [&f](std::int64_t i, Rng& rng, std::span<double> out) {
            out[0] = f(i, rng);
        });
    return moments.component(0, sigmas, base);
}

}  // namespace levylab
