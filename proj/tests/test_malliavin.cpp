// SPDX-License-Identifier: Apache-2.0
#include "levylab/malliavin.hpp"

#include <cmath>

#include "doctest.h"

using namespace levylab;

namespace {

JumpModel atom_model(double mass = 2.0) {
    return JumpModel(0.0, 1.0, 0.0, {NuComponent::atom(1.0, mass)});
}

JumpModel mixed_model() {
    return JumpModel(0.0, 1.0, 0.0,
                     {NuComponent::atom(1.0, 1.0),
                      NuComponent::uniform(-3.0, -1.0, 1.0)});
}

BoxEnv env_with_A() {
    BoxEnv env;
    env["A"] = BoxSet::box(0.0, 1.0, 0.5, 1.5);
    env["B"] = BoxSet::box(0.0, 1.0, -3.0, -1.0);
    return env;
}

bool close_rel(double a, double b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("difference quotients of the primitives") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    Functional count = parse_functional("count(A)");
    JumpPath path({Jump{0.3, 1.0}}, {});

    CHECK(derivative_quotient(count, model, env, path, {0.5, 2.0}) ==
          doctest::Approx(0.0));  // size 2 leaves A
    CHECK(derivative_quotient(count, model, env, path, {0.5, 1.0}) ==
          doctest::Approx(1.0));
    CHECK(derivative_quotient(count, model, env, path, {0.5, 0.8}) ==
          doctest::Approx(1.0 / 0.8));

    Functional xt = parse_functional("X_T");
    CHECK(derivative_quotient(xt, model, env, path, {0.9, -1.5}) ==
          doctest::Approx(1.0));
}

TEST_CASE("chaos derivative slice values") {
    JumpModel model = atom_model();
    std::vector<BoxSet> boxes = {BoxSet::box(0.0, 0.5, 0.5, 1.5),
                                 BoxSet::box(0.5, 1.0, 0.5, 1.5)};
    auto cells = std::make_shared<Partition>(boxes, model);
    JumpPath path({Jump{0.1, 1.0}, Jump{0.7, 1.0}}, {});

    SUBCASE("h grid gives 1/x inside A, 0 outside") {
        CoefficientGrid h = h_indicator_grid(model, cells);
        CHECK(derivative_chaos(model, h, path, {0.2, 1.0}) ==
              doctest::Approx(1.0));
        CHECK(derivative_chaos(model, h, path, {0.2, 3.0}) == 0.0);
    }
    SUBCASE("constants have zero derivative") {
        CoefficientGrid grid(cells, 0);
        grid.set_constant(5.0);
        grid.mark_symmetric();
        CHECK(derivative_chaos(model, grid, path, {0.2, 1.0}) == 0.0);
    }
    SUBCASE("order-2 indicator tensor gives the other cell's M") {
        CoefficientGrid grid(cells, 2);
        std::size_t i01[2] = {0, 1};
        grid.set(2, i01, 1.0);
        CoefficientGrid sym = symmetrize(grid);
        double expected = eval_M(model, path, boxes[1]);
        CHECK(derivative_chaos(model, sym, path, {0.2, 1.0}) ==
              doctest::Approx(expected));
        CHECK_THROWS_AS(derivative_chaos(model, grid, path, {0.2, 1.0}),
                        Error);  // unsymmetrized input refused
    }
}

TEST_CASE("chaos derivative equals the quotient of the induced functional") {
    JumpModel model = atom_model();
    std::vector<BoxSet> boxes = {BoxSet::box(0.0, 0.4, 0.5, 1.5),
                                 BoxSet::box(0.4, 0.8, 0.5, 1.5),
                                 BoxSet::box(0.8, 1.0, 0.5, 1.5)};
    auto cells = std::make_shared<Partition>(boxes, model);
    Rng rng(321, 0);
    for (int trial = 0; trial < 40; ++trial) {
        CoefficientGrid grid(cells, 3);
        grid.set_constant(rng.uniform(-1, 1));
        std::vector<std::size_t> idx(3);
        for (int order = 1; order <= 3; ++order)
            for (int entries = 0; entries < 6; ++entries) {
                for (int k = 0; k < order; ++k)
                    idx[std::size_t(k)] = rng.next_u64() % boxes.size();
                grid.set(order,
                         std::span<const std::size_t>(idx.data(),
                                                      std::size_t(order)),
                         rng.uniform(-2, 2));
            }
        CoefficientGrid sym = symmetrize(grid);

        JumpPath path = sample_path(model, SeedSpec{70, std::uint64_t(trial)});
        DerivativePoint p{rng.uniform(0, 1),
                          trial % 3 == 0 ? 3.0 : 1.0};  // inside or outside
        PathFunctional induced = [&](const JumpPath& q) {
            return chaos_eval(model, q, sym);
        };
        double lhs = derivative_chaos(model, sym, path, p);
        double rhs = derivative_quotient(induced, path, p);
        CHECK(close_rel(lhs, rhs));
    }
}

TEST_CASE("derivative norm: count(A) integrates to E N(A)") {
    JumpModel model = mixed_model();
    BoxEnv env;
    env["A"] = BoxSet::box(0.0, 1.0, -3.0, 2.0);
    const BoxSet& a = env.at("A");
    REQUIRE(expected_count(model, a) == doctest::Approx(2.0));

    Functional count = parse_functional("count(A)");
    Estimate est = derivative_norm_sq(model, env, count, a, 100000,
                                      SeedSpec{71, 0});
    CHECK(std::abs(est.mean - 2.0) <= 3.0 * est.std_error);

    SUBCASE("constants have zero derivative norm") {
        Estimate zero = derivative_norm_sq(model, env,
                                           parse_functional("3.5"), a, 2000,
                                           SeedSpec{72, 0});
        CHECK(zero.mean == 0.0);
        CHECK(zero.std_error == 0.0);
    }
    SUBCASE("quadratic homogeneity, same streams") {
        Functional scaled = parse_functional("5 * count(A)");
        Estimate big = derivative_norm_sq(model, env, scaled, a, 20000,
                                          SeedSpec{73, 0});
        Estimate small = derivative_norm_sq(model, env, count, a, 20000,
                                            SeedSpec{73, 0});
        CHECK(big.mean == doctest::Approx(25.0 * small.mean).epsilon(1e-12));
    }
}

TEST_CASE("Mecke identity") {
    JumpModel model = atom_model();  // E N(A) = 2 on A
    BoxEnv env = env_with_A();
    const BoxSet& a = env.at("A");

    SUBCASE("F = count(A): both sides near lambda(lambda+1) = 6") {
        auto pair = mecke_check(model, env, parse_functional("count(A)"), a,
                                100000, SeedSpec{80, 0});
        CHECK(std::abs(pair.lhs.mean - 6.0) <= 3.0 * pair.lhs.std_error);
        CHECK(std::abs(pair.rhs.mean - 6.0) <= 3.0 * pair.rhs.std_error);
        CHECK(!pair.negativity_warning);
    }
    SUBCASE("F constant 1: lhs is exactly lambda") {
        auto pair = mecke_check(model, env, parse_functional("1"), a, 20000,
                                SeedSpec{81, 0});
        CHECK(pair.lhs.mean == doctest::Approx(2.0));
        CHECK(pair.lhs.std_error == 0.0);
        CHECK(std::abs(pair.rhs.mean - 2.0) <= 3.0 * pair.rhs.std_error);
    }
    SUBCASE("disjoint F: independence factorizes") {
        JumpModel mixed = mixed_model();
        BoxEnv env2;
        env2["A"] = BoxSet::box(0.0, 1.0, 0.5, 1.5);    // lambda 1
        env2["B"] = BoxSet::box(0.0, 1.0, -3.0, -1.0);  // lambda 1
        auto pair = mecke_check(mixed, env2, parse_functional("count(B)"),
                                env2.at("A"), 100000, SeedSpec{82, 0});
        CHECK(std::abs(pair.lhs.mean - 1.0) <= 3.0 * pair.lhs.std_error);
        CHECK(std::abs(pair.rhs.mean - 1.0) <= 3.0 * pair.rhs.std_error);
    }
    SUBCASE("negative functionals are flagged") {
        auto pair = mecke_check(model, env, parse_functional("count(A) - 1"),
                                a, 5000, SeedSpec{83, 0});
        CHECK(pair.negativity_warning);
    }
}

TEST_CASE("product rule is exact pathwise") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    Functional f = parse_functional("count(A)");
    JumpPath path({Jump{0.2, 1.0}, Jump{0.6, 1.0}}, {});
    DerivativePoint p{0.5, 1.0};

    auto pair = product_rule_check(model, env, f, f, path, p);
    // (2N+1)/x at N = 2
    CHECK(pair.lhs == doctest::Approx(5.0));
    CHECK(pair.rhs == doctest::Approx(5.0));

    auto with_const =
        product_rule_check(model, env, f, parse_functional("3"), path, p);
    CHECK(with_const.lhs == doctest::Approx(3.0));
    CHECK(with_const.rhs == doctest::Approx(with_const.lhs));

    auto outside = product_rule_check(model, env, f, f, path, {0.5, 7.0});
    CHECK(outside.lhs == 0.0);
    CHECK(outside.rhs == 0.0);
}

TEST_CASE("chain rule is exact pathwise") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    Functional f = parse_functional("count(A)");
    JumpPath path({Jump{0.2, 1.0}, Jump{0.6, 1.0}}, {});

    SUBCASE("identity region") {
        auto g = LipschitzFn::clamp(-10.0, 10.0);
        auto pair = chain_rule_check(model, env, g, f, path, {0.5, 1.0});
        CHECK(pair.lhs == doctest::Approx(1.0));
        CHECK(pair.rhs == doctest::Approx(1.0));
    }
    SUBCASE("flat region") {
        auto g = LipschitzFn::clamp(-1.0, 1.0);
        auto pair = chain_rule_check(model, env, g, f, path, {0.5, 1.0});
        CHECK(pair.lhs == 0.0);
        CHECK(pair.rhs == 0.0);
    }
    SUBCASE("straddling the clamp edge") {
        auto g = LipschitzFn::clamp(0.0, 2.5);
        auto pair = chain_rule_check(model, env, g, f, path, {0.5, 1.0});
        CHECK(pair.lhs == doctest::Approx(0.5));
        CHECK(close_rel(pair.lhs, pair.rhs));
    }
}

TEST_CASE("randomized product and chain rules agree to 1e-12 relative") {
    JumpModel model = mixed_model();
    BoxEnv env;
    env["A"] = BoxSet::box(0.0, 1.0, -3.0, 2.0);
    env["B"] = BoxSet::box(0.0, 0.5, 0.5, 1.5);
    const Functional corpus[] = {
        parse_functional("count(A)"),
        parse_functional("sumjumps(A, x2) + 1"),
        parse_functional("clamp(count(B), 0, 3) * sumjumps(A, absx)"),
        parse_functional("min(count(A), 4) - 0.25 * X_T"),
    };
    Rng rng(777, 0);
    for (int trial = 0; trial < 1000; ++trial) {
        JumpPath path = sample_path(model, SeedSpec{90, std::uint64_t(trial)});
        DerivativePoint p{rng.uniform(0.0, 1.0), 0.0};
        p.x = sample_jump_size(model, rng);
        const Functional& f = corpus[rng.next_u64() % 4];
        const Functional& g = corpus[rng.next_u64() % 4];
        auto prod = product_rule_check(model, env, f, g, path, p);
        CHECK(close_rel(prod.lhs, prod.rhs));

        LipschitzFn lip =
            trial % 3 == 0
                ? LipschitzFn::abs()
                : (trial % 3 == 1 ? LipschitzFn::clamp(-1.5, 2.0)
                                  : LipschitzFn::min_const(1.0));
        auto chain = chain_rule_check(model, env, lip, f, path, p);
        CHECK(close_rel(chain.lhs, chain.rhs));
    }
}

TEST_CASE("conditional projection zeroes outside tensors") {
    JumpModel model = atom_model();
    std::vector<BoxSet> boxes = {BoxSet::box(0.0, 0.5, 0.5, 1.5),
                                 BoxSet::box(0.5, 1.0, 0.5, 1.5)};
    auto cells = std::make_shared<Partition>(boxes, model);
    CoefficientGrid grid(cells, 2);
    grid.set_constant(1.0);
    std::size_t i0[1] = {0}, i1[1] = {1}, i01[2] = {0, 1};
    grid.set(1, i0, 2.0);
    grid.set(1, i1, 3.0);
    grid.set(2, i01, 4.0);

    SUBCASE("all cells inside leaves the grid unchanged") {
        BoxSet a = BoxSet::box(0.0, 1.0, 0.5, 1.5);
        CoefficientGrid projected = conditional_projection(grid, a);
        CHECK(projected.get(1, i0) == 2.0);
        CHECK(projected.get(2, i01) == 4.0);
    }
    SUBCASE("support outside A leaves only the constant") {
        BoxSet a = BoxSet::box(0.0, 0.5, 0.5, 1.5);
        CoefficientGrid projected = conditional_projection(grid, a);
        CHECK(projected.constant() == 1.0);
        CHECK(projected.get(1, i0) == 2.0);
        CHECK(projected.get(1, i1) == 0.0);
        CHECK(projected.get(2, i01) == 0.0);
        // idempotence
        CoefficientGrid again = conditional_projection(projected, a);
        CHECK(again.get(1, i1) == 0.0);
        CHECK(again.get(1, i0) == 2.0);
    }
    SUBCASE("straddling cells are an error") {
        BoxSet a = BoxSet::box(0.0, 0.25, 0.5, 1.5);
        CHECK_THROWS_AS(conditional_projection(grid, a), Error);
    }
}

TEST_CASE("grid projection agrees with Monte Carlo conditioning") {
    // E[Y|F_A] two ways for a chaos functional: zero the outside tensor
    // entries, or resample the complement and average
    JumpModel model = atom_model();
    std::vector<BoxSet> boxes = {BoxSet::box(0.0, 0.5, 0.5, 1.5),
                                 BoxSet::box(0.5, 1.0, 0.5, 1.5)};
    auto cells = std::make_shared<Partition>(boxes, model);
    BoxSet a = boxes[0];  // condition on the first cell only

    CoefficientGrid grid(cells, 2);
    grid.set_constant(0.5);
    std::size_t i0[1] = {0}, i1[1] = {1}, i01[2] = {0, 1}, i10[2] = {1, 0};
    grid.set(1, i0, 1.5);
    grid.set(1, i1, -1.0);
    grid.set(2, i01, 0.75);
    grid.set(2, i10, 0.75);
    CoefficientGrid projected = conditional_projection(grid, a);

    PathFunctional induced = [&](const JumpPath& q) {
        return chaos_eval(model, q, grid);
    };
    for (int trial = 0; trial < 5; ++trial) {
        JumpPath path =
            sample_path(model, SeedSpec{150, std::uint64_t(trial)});
        double via_grid = chaos_eval(model, path, projected);
        double via_mc = conditional_mc(model, induced, a, path, 40000,
                                       SeedSpec{151, std::uint64_t(trial) << 32});
        // inner-average standard error is at most sd(Y)/sqrt(R); 0.05 is
        // generous for this grid
        CHECK(via_mc == doctest::Approx(via_grid).epsilon(0.06).scale(1.0));
    }
}

TEST_CASE("conditional Monte Carlo") {
    JumpModel model = mixed_model();
    BoxEnv env;
    env["A"] = BoxSet::box(0.0, 1.0, 0.5, 1.5);
    env["Ac"] = BoxSet::box(0.0, 1.0, -3.0, -1.0);
    const BoxSet& a = env.at("A");
    JumpPath path = sample_path(model, SeedSpec{100, 0});

    SUBCASE("certified functionals come back exactly") {
        Functional f = parse_functional("count(A) * 2 + 1");
        double direct = evaluate(f, model, env, path);
        CHECK(conditional_mc(model, env, f, a, path, 64, SeedSpec{101, 0}) ==
              direct);
    }
    SUBCASE("complement counts average to their mean") {
        Functional f = parse_functional("count(Ac)");
        double value =
            conditional_mc(model, env, f, a, path, 20000, SeedSpec{102, 0});
        CHECK(value == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("linearity: A part exact plus complement mean") {
        Functional f = parse_functional("count(A) + count(Ac)");
        double value =
            conditional_mc(model, env, f, a, path, 20000, SeedSpec{103, 0});
        CHECK(value == doctest::Approx(count_in(path, a) + 1.0).epsilon(0.05));
    }
    SUBCASE("tower property and conditional contraction") {
        Functional f = parse_functional("count(A) + count(Ac) * count(Ac)");
        auto outer = run_mc(
            2, 4000, SeedSpec{104, 0}, 1,
            [&](std::int64_t i, Rng& rng, std::span<double> out) {
                JumpPath p = sample_path(model, rng, {});
                double cond = conditional_mc(
                    model, env, f, a, p, 64,
                    SeedSpec{105, std::uint64_t(i) << 16});
                double direct = evaluate(f, model, env, p);
                out[0] = cond - direct;
                out[1] = cond * cond - direct * direct;
            });
        // tower: E[E[Y|F_A]] = E[Y]
        CHECK(std::abs(outer.mean(0)) <= 3.0 * outer.std_error(0));
        // contraction: ||E[Y|F_A]|| <= ||Y|| (law of total variance slack)
        CHECK(outer.mean(1) <= 3.0 * outer.std_error(1));
    }
}
