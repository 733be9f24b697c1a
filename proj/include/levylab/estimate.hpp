// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo plumbing. Sample i of an estimator always draws from stream
// (base.stream + i), and per-sample values are folded into fixed 4096-sample
// blocks whose partial sums are combined in block order. The float result is
// therefore identical for any worker count, which the reports rely on.
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "levylab/rng.hpp"

namespace levylab {

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t samples = 0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double sigmas = 3.0;
    SeedSpec seed{};
};

Estimate make_estimate(double mean, double std_error, std::int64_t samples,
                       double sigmas, SeedSpec seed);

// First and second joint moments of a vector-valued sample mean.
class VectorMoments {
  public:
    VectorMoments(std::size_t dim, std::int64_t n, std::vector<double> sum,
                  std::vector<double> cross);

    std::size_t dim() const { return dim_; }
    std::int64_t samples() const { return n_; }
    double mean(std::size_t i) const { return sum_[i] / double(n_); }
    // covariance of the MEAN vector (sample covariance / n)
    double mean_cov(std::size_t i, std::size_t j) const;
    double std_error(std::size_t i) const;

    Estimate component(std::size_t i, double sigmas, SeedSpec seed) const;
    // sqrt(mean_i) with a delta-method standard error
    Estimate sqrt_component(std::size_t i, double sigmas, SeedSpec seed) const;
    // variance of a linear functional grad . mean
    double gradient_variance(std::span<const double> grad) const;

  private:
    std::size_t dim_;
    std::int64_t n_;
    std::vector<double> sum_;    // per-component sums
    std::vector<double> cross_;  // dim x dim sums of products, row-major
};

// f fills out[0..dim) for sample i using the sample's own stream.
using SampleFn =
    std::function<void(std::int64_t i, Rng& rng, std::span<double> out)>;

VectorMoments run_mc(std::size_t dim, std::int64_t n_samples, SeedSpec base,
                     int workers, const SampleFn& f);

// Scalar convenience wrapper.
Estimate estimate_mean(std::int64_t n_samples, SeedSpec base, int workers,
                       double sigmas,
                       const std::function<double(std::int64_t, Rng&)>& f);

}  // namespace levylab
