// SPDX-License-Identifier: Apache-2.0
#include "levylab/rng.hpp"

#include <cmath>

#include "levylab/errors.hpp"

namespace levylab {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                      std::uint32_t& hi) {
    std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         std::array<std::uint32_t, 2>& key) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mul_hi_lo(kPhiloxM4x32A, ctr[0], lo0, hi0);
    mul_hi_lo(kPhiloxM4x32B, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW32A;
    key[1] += kPhiloxW32B;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) philox_round(counter, key);
    return counter;
}

std::uint64_t Rng::next_u64() {
    if (buffered_ == 0) {
        std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(draw_),
            static_cast<std::uint32_t>(draw_ >> 32),
            static_cast<std::uint32_t>(stream_),
            static_cast<std::uint32_t>(stream_ >> 32)};
        auto out = philox4x32(ctr, key_);
        buffer_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        buffer_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        buffered_ = 2;
        ++draw_;
    }
    return buffer_[--buffered_];
}

double Rng::exponential() {
    return -std::log1p(-uniform01());
}

std::int64_t sample_poisson(Rng& rng, double lambda) {
    if (lambda < 0.0 || !std::isfinite(lambda))
        throw Error("poisson rate must be finite and >= 0");
    if (lambda > 1e7)
        throw Error("poisson rate too large for desk-scale sampling");
    std::int64_t n = 0;
    double sum = rng.exponential();
    while (sum < lambda) {
        ++n;
        sum += rng.exponential();
    }
    return n;
}

}  // namespace levylab
