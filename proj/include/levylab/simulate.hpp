// SPDX-License-Identifier: Apache-2.0
//
// Realizations of the Poisson random measure N on [0,T) x R0 for a finite
// jump measure: total count ~ Poisson(nu(R) T), times i.i.d. uniform on
// [0,T), sizes i.i.d. from the component mixture nu / nu(R). This matches
// the product structure of dt (x) nu directly, rather than simulating
// exponential inter-arrival times.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "levylab/model.hpp"
#include "levylab/rng.hpp"

namespace levylab {

struct Jump {
    double t = 0.0;
    double x = 0.0;
};

// One realization of N: a finite, time-sorted list of jump points.
// Immutable after construction; perturbations return a new path.
class JumpPath {
  public:
    JumpPath() = default;
    JumpPath(std::vector<Jump> jumps, SeedSpec origin);

    const std::vector<Jump>& jumps() const { return jumps_; }
    SeedSpec origin() const { return origin_; }
    std::size_t size() const { return jumps_.size(); }

  private:
    std::vector<Jump> jumps_;
    SeedSpec origin_{};
};

// Draw one jump size from nu / nu(R).
double sample_jump_size(const JumpModel& model, Rng& rng);

JumpPath sample_path(const JumpModel& model, SeedSpec seed);
// Variant drawing from an already-positioned stream (keeps one stream per
// Monte Carlo sample even when a sample needs several sub-draws).
JumpPath sample_path(const JumpModel& model, Rng& rng, SeedSpec origin);

// Number of jump points of the path lying in A.
int count_in(const JumpPath& path, const BoxSet& a);

// New path with one extra jump (t, x) in sorted position; x must be nonzero.
JumpPath add_jump(const JumpPath& path, double t, double x);

// X_T = beta T + sum of all jump sizes.
double terminal_value(const JumpModel& model, const JumpPath& path);

// Path dump: one record per jump, fields (stream, t, x), delimiter-separated.
void write_path_records(std::ostream& os, const JumpModel& model,
                        std::uint64_t master_seed, std::uint64_t streams,
                        char delim = '\t');

}  // namespace levylab
