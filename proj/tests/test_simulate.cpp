// SPDX-License-Identifier: Apache-2.0
#include "levylab/simulate.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "levylab/estimate.hpp"

using namespace levylab;

namespace {

JumpModel atom_model(double mass = 2.0) {
    return JumpModel(0.0, 1.0, 0.0, {NuComponent::atom(1.0, mass)});
}

JumpModel mixed_model() {
    return JumpModel(0.5, 2.0, 0.0,
                     {NuComponent::atom(1.0, 1.0),
                      NuComponent::uniform(-3.0, -1.0, 0.5)});
}

}  // namespace

TEST_CASE("philox4x32-10 matches the published test vectors") {
    // Random123 known-answer vectors (Salmon et al.)
    auto zero = philox4x32({0u, 0u, 0u, 0u}, {0u, 0u});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu,
                            0xffffffffu},
                           {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);

    auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                         {0xa4093822u, 0x299f31d0u});
    CHECK(pi[0] == 0xd16cfe09u);
    CHECK(pi[1] == 0x94fdccebu);
    CHECK(pi[2] == 0x5001e420u);
    CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("philox streams are deterministic and distinct") {
    Rng a(42, 0), b(42, 0), c(42, 1), d(43, 0);
    bool same = true, stream_differs = false, seed_differs = false;
    for (int i = 0; i < 64; ++i) {
        auto va = a.next_u64();
        same = same && va == b.next_u64();
        stream_differs = stream_differs || va != c.next_u64();
        seed_differs = seed_differs || va != d.next_u64();
    }
    CHECK(same);
    CHECK(stream_differs);
    CHECK(seed_differs);
}

TEST_CASE("uniform01 stays in [0,1) and is roughly uniform") {
    Rng rng(1, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("same seed gives the identical path") {
    JumpModel model = mixed_model();
    JumpPath p1 = sample_path(model, SeedSpec{9, 7});
    JumpPath p2 = sample_path(model, SeedSpec{9, 7});
    REQUIRE(p1.size() == p2.size());
    for (std::size_t i = 0; i < p1.size(); ++i) {
        CHECK(p1.jumps()[i].t == p2.jumps()[i].t);
        CHECK(p1.jumps()[i].x == p2.jumps()[i].x);
    }
}

TEST_CASE("jump count matches the Poisson mean and variance") {
    JumpModel model = atom_model();  // nu(R) T = 2
    const std::int64_t n = 100000;
    auto moments = run_mc(2, n, SeedSpec{2024, 0}, 1,
                          [&](std::int64_t, Rng& rng, std::span<double> out) {
                              JumpPath p = sample_path(model, rng, {});
                              double k = double(p.size());
                              out[0] = k;
                              out[1] = k * k;
                          });
    double mean = moments.mean(0);
    double var = moments.mean(1) - mean * mean;
    CHECK(std::abs(mean - 2.0) <= 3.0 * moments.std_error(0));
    // se of the empirical variance of a Poisson(2) is close to
    // sqrt((mu4 - var^2)/n); mu4 = 3 lambda^2 + lambda -> se ~ sqrt(14-4)/316
    CHECK(std::abs(var - 2.0) <= 3.0 * 0.011);
}

TEST_CASE("count_in counts literally") {
    JumpPath path({Jump{0.5, 1.0}, Jump{0.7, 1.0}}, {});
    CHECK(count_in(path, BoxSet::box(0, 1, 0.5, 1.5)) == 2);
    CHECK(count_in(path, BoxSet()) == 0);
}

TEST_CASE("empirical count matches expected_count") {
    JumpModel model = mixed_model();
    BoxSet a = BoxSet::box(0.0, 1.5, -2.0, 2.0);
    double exact = expected_count(model, a);
    Estimate est = estimate_mean(
        100000, SeedSpec{11, 0}, 1, 3.0, [&](std::int64_t, Rng& rng) {
            return double(count_in(sample_path(model, rng, {}), a));
        });
    CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error);
}

TEST_CASE("add_jump inserts sorted and leaves the input untouched") {
    JumpPath empty;
    JumpPath one = add_jump(empty, 0.3, 2.0);
    REQUIRE(one.size() == 1);
    CHECK(one.jumps()[0].t == 0.3);
    CHECK(one.jumps()[0].x == 2.0);
    CHECK(empty.size() == 0);

    JumpModel model = atom_model();
    JumpPath path({Jump{0.5, 1.0}, Jump{0.7, 1.0}}, {});
    BoxSet a = BoxSet::box(0, 1, 0.5, 1.5);
    JumpPath more = add_jump(path, 0.6, 1.0);
    CHECK(count_in(more, a) == count_in(path, a) + 1);
    CHECK(more.jumps()[1].t == 0.6);  // sorted position
    CHECK(terminal_value(model, more) ==
          doctest::Approx(terminal_value(model, path) + 1.0));
    CHECK_THROWS_AS(add_jump(path, 0.2, 0.0), Error);
}

TEST_CASE("independent scattering: disjoint boxes decorrelate") {
    JumpModel model = atom_model();
    BoxSet a = BoxSet::box(0.0, 0.5, 0.5, 1.5);
    BoxSet b = BoxSet::box(0.5, 1.0, 0.5, 1.5);
    const std::int64_t n = 100000;
    auto moments = run_mc(5, n, SeedSpec{5, 0}, 1,
                          [&](std::int64_t, Rng& rng, std::span<double> out) {
                              JumpPath p = sample_path(model, rng, {});
                              double na = count_in(p, a), nb = count_in(p, b);
                              out[0] = na;
                              out[1] = nb;
                              out[2] = na * nb;
                              out[3] = na * na;
                              out[4] = nb * nb;
                          });
    double cov = moments.mean(2) - moments.mean(0) * moments.mean(1);
    double sda = std::sqrt(moments.mean(3) - moments.mean(0) * moments.mean(0));
    double sdb = std::sqrt(moments.mean(4) - moments.mean(1) * moments.mean(1));
    double corr = cov / (sda * sdb);
    CHECK(std::abs(corr) <= 3.0 / std::sqrt(double(n)));
}

TEST_CASE("thinning: box counts are Poisson with the product-measure mean") {
    JumpModel model = mixed_model();
    BoxSet a = BoxSet::box(0.25, 1.75, -2.5, -1.5);
    double lambda = expected_count(model, a);
    REQUIRE(lambda > 0.0);
    const std::int64_t n = 100000;
    auto moments = run_mc(2, n, SeedSpec{6, 0}, 1,
                          [&](std::int64_t, Rng& rng, std::span<double> out) {
                              JumpPath p = sample_path(model, rng, {});
                              double k = count_in(p, a);
                              out[0] = k;
                              out[1] = k * k;
                          });
    CHECK(std::abs(moments.mean(0) - lambda) <= 3.0 * moments.std_error(0));
    double var = moments.mean(1) - moments.mean(0) * moments.mean(0);
    double se_var =
        std::sqrt((3 * lambda * lambda + lambda) / double(n));  // crude mu4
    CHECK(std::abs(var - lambda) <= 3.0 * se_var);
}

TEST_CASE("block reduction is identical across worker counts") {
    JumpModel model = mixed_model();
    BoxSet a = BoxSet::box(0.0, 2.0, -3.0, 2.0);
    auto run = [&](int workers) {
        return estimate_mean(
            30000, SeedSpec{77, 0}, workers, 3.0,
            [&](std::int64_t, Rng& rng) {
                return double(count_in(sample_path(model, rng, {}), a));
            });
    };
    Estimate w1 = run(1), w4 = run(4);
    CHECK(w1.mean == w4.mean);  // bitwise
    CHECK(w1.std_error == w4.std_error);
}

TEST_CASE("path records are stable text") {
    JumpModel model = atom_model();
    std::ostringstream first, second;
    write_path_records(first, model, 3, 4);
    write_path_records(second, model, 3, 4);
    CHECK(first.str() == second.str());
    CHECK(first.str().find('\t') != std::string::npos);
}
