// SPDX-License-Identifier: Apache-2.0
//
// Counter-based random number generation (Philox4x32-10, Salmon et al.,
// SC 2011). A stream is addressed by (master seed, stream index); the draw
// counter advances within the stream. Any (seed, stream, draw) triple maps to
// the same bits on every platform and worker count, which is what makes the
// Monte Carlo estimators reproducible under parallel fan-out.
#pragma once

#include <array>
#include <cstdint>

namespace levylab {

struct SeedSpec {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

// One Philox4x32-10 block: 4x32 bits out per (counter, key) pair.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

class Rng {
  public:
    explicit Rng(SeedSpec spec) : Rng(spec.master, spec.stream) {}
    Rng(std::uint64_t master, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(master),
               static_cast<std::uint32_t>(master >> 32)},
          stream_(stream) {}

    std::uint64_t next_u64();

    // uniform on [0, 1), 53 significant bits
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // standard exponential; uniform01 < 1 keeps the log argument positive
    double exponential();

  private:
    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t draw_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int buffered_ = 0;
};

// Exact Poisson sample by counting unit-rate arrivals up to lambda.
// Cost is O(lambda) draws; fine at desk scale, guarded against abuse.
std::int64_t sample_poisson(Rng& rng, double lambda);

}  // namespace levylab
