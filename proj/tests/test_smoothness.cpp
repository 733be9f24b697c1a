// SPDX-License-Identifier: Apache-2.0
#include "levylab/smoothness.hpp"

#include <cmath>

#include "doctest.h"

using namespace levylab;

namespace {

JumpModel atom_model(double mass = 2.0) {
    return JumpModel(0.0, 1.0, 0.0, {NuComponent::atom(1.0, mass)});
}

BoxEnv env_with_A() {
    BoxEnv env;
    env["A"] = BoxSet::box(0.0, 1.0, 0.5, 1.5);
    return env;
}

// Poisson(lambda) expectation of w(n) by direct summation
double poisson_expectation(double lambda, int terms,
                           const std::function<double(int)>& w) {
    double sum = 0.0, log_pmf_base = -lambda, lnfact = 0.0;
    for (int n = 0; n < terms; ++n) {
        if (n >= 2) lnfact += std::log(double(n));
        sum += w(n) * std::exp(log_pmf_base + n * std::log(lambda) - lnfact);
    }
    return sum;
}

}  // namespace

TEST_CASE("weighted norm basics") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    const BoxSet& a = env.at("A");
    Functional one = parse_functional("1");

    SUBCASE("Y = 1, theta = 1: sqrt(lambda + 1)") {
        Estimate est =
            weighted_norm(model, env, one, a, 1.0, 100000, SeedSpec{200, 0});
        CHECK(std::abs(est.mean - std::sqrt(3.0)) <= 3.0 * est.std_error);
    }
    SUBCASE("theta = 0 is the plain L2 norm") {
        Estimate est =
            weighted_norm(model, env, one, a, 0.0, 1000, SeedSpec{201, 0});
        CHECK(est.mean == doctest::Approx(1.0));
        CHECK(est.std_error == 0.0);
    }
    SUBCASE("pathwise monotone in theta on common random numbers") {
        Functional f = parse_functional("count(A) + 1");
        Estimate lo =
            weighted_norm(model, env, f, a, 0.3, 20000, SeedSpec{202, 0});
        Estimate mid =
            weighted_norm(model, env, f, a, 0.6, 20000, SeedSpec{202, 0});
        Estimate hi =
            weighted_norm(model, env, f, a, 0.9, 20000, SeedSpec{202, 0});
        CHECK(lo.mean <= mid.mean);
        CHECK(mid.mean <= hi.mean);
    }
}

TEST_CASE("exact series norm") {
    JumpModel model = atom_model();  // lambda = 2 on A
    BoxEnv env = env_with_A();
    const BoxSet& a = env.at("A");

    SUBCASE("phi = 1, theta = 1: E[N+1] = 3 to 12 digits at m = 200") {
        SeriesScan scan = exact_series_norm(model, parse_functional("1"), "A",
                                            a, 1.0, 200);
        CHECK(scan.partial == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(scan.status == SeriesStatus::Finite);
    }
    SUBCASE("phi = 1{n = 0} picks the single term") {
        // indicator(count <= 0) == 1 - indicator(count > 0)
        Functional f = parse_functional("1 - indicator(count(A) > 0)");
        SeriesScan scan = exact_series_norm(model, f, "A", a, 0.7, 64);
        CHECK(scan.partial == doctest::Approx(std::exp(-2.0)));
    }
    SUBCASE("non-count functionals are rejected") {
        CHECK_THROWS_AS(exact_series_norm(model,
                                          parse_functional("sumjumps(A, x)"),
                                          "A", a, 1.0, 64),
                        Error);
    }
}

TEST_CASE("sandwich check reproduces the exact triple for Y = N(A)") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    const BoxSet& a = env.at("A");
    SandwichReport report = sandwich_check(
        model, env, parse_functional("count(A)"), a, 100000, SeedSpec{210, 0});
    CHECK(std::abs(report.a.mean - std::sqrt(22.0)) <=
          3.0 * report.a.std_error);
    CHECK(std::abs(report.b.mean - std::sqrt(12.0)) <=
          3.0 * report.b.std_error);
    CHECK(std::abs(report.d.mean - std::sqrt(2.0)) <=
          3.0 * report.d.std_error);
    CHECK(report.inequality1);
    CHECK(report.inequality2);
}

TEST_CASE("sandwich equality edge for constants") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    SandwichReport report =
        sandwich_check(model, env, parse_functional("3"), env.at("A"), 20000,
                       SeedSpec{211, 0});
    CHECK(report.gap <= report.gap_tolerance);  // a = b up to MC noise
    CHECK(report.d.mean == 0.0);
    CHECK(report.inequality1);
    CHECK(report.inequality2);
}

TEST_CASE("sandwich for the clamped count against exact Poisson sums") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    SandwichReport report =
        sandwich_check(model, env, parse_functional("clamp(count(A), 0, 1)"),
                       env.at("A"), 100000, SeedSpec{212, 0});
    double lambda = 2.0;
    // Y = 1{N >= 1}: E Y^2 N = lambda, E Y^2 = 1 - e^-lambda
    double a_exact = std::sqrt(lambda);
    double b_exact = std::sqrt((1.0 - std::exp(-lambda)) * lambda);
    CHECK(std::abs(report.a.mean - a_exact) <= 3.0 * report.a.std_error);
    CHECK(std::abs(report.b.mean - b_exact) <= 3.0 * report.b.std_error);
    // D 1{N >= 1} = 1{N = 0}/x; norm^2 = lambda e^-lambda
    double d_exact = std::sqrt(lambda * std::exp(-lambda));
    CHECK(std::abs(report.d.mean - d_exact) <= 3.0 * report.d.std_error);
    CHECK(report.inequality1);
    CHECK(report.inequality2);
}

TEST_CASE("equivalence ratio sits inside the corollary band") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    const BoxSet& a = env.at("A");
    double c = std::sqrt(2.0) * (std::sqrt(2.0) + 1.0);

    SUBCASE("Y = N(A)") {
        EquivalenceReport report =
            equivalence_ratio(model, env, parse_functional("count(A)"), a,
                              100000, SeedSpec{220, 0});
        CHECK(report.band_high == doctest::Approx(c));
        CHECK(report.pass);
        // exact ratio sqrt(8/28)
        CHECK(std::abs(report.ratio - std::sqrt(8.0 / 28.0)) <=
              3.0 * report.std_error);
    }
    SUBCASE("Y = 1 gives 1/sqrt(3)") {
        EquivalenceReport report = equivalence_ratio(
            model, env, parse_functional("1"), a, 50000, SeedSpec{221, 0});
        CHECK(std::abs(report.ratio - 1.0 / std::sqrt(3.0)) <=
              3.0 * report.std_error);
        CHECK(report.pass);
    }
    SUBCASE("scaling leaves the ratio unchanged") {
        EquivalenceReport one =
            equivalence_ratio(model, env, parse_functional("count(A)"), a,
                              20000, SeedSpec{222, 0});
        EquivalenceReport five =
            equivalence_ratio(model, env, parse_functional("5 * count(A)"),
                              a, 20000, SeedSpec{222, 0});
        CHECK(one.ratio == doctest::Approx(five.ratio).epsilon(1e-12));
    }
    SUBCASE("uncertified functionals are refused") {
        BoxEnv env2 = env;
        env2["Z"] = BoxSet::box(0.0, 1.0, -2.0, -0.5);
        CHECK_THROWS_WITH_AS(
            equivalence_ratio(model, env2, parse_functional("count(Z)"), a,
                              1000, SeedSpec{223, 0}),
            doctest::Contains("Z"), Error);
    }
}

TEST_CASE("K surrogate saturation and small-s linearity") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    const BoxSet& a = env.at("A");
    Functional f = parse_functional("count(A) + 1");

    Estimate plain = weighted_norm(model, env, f, a, 0.0, 20000,
                                   SeedSpec{230, 0});
    Estimate saturated = k_surrogate(model, env, f, a, 1e3, 20000,
                                     SeedSpec{230, 0});
    CHECK(saturated.mean == doctest::Approx(plain.mean).epsilon(1e-12));

    Estimate weighted = weighted_norm(model, env, f, a, 1.0, 20000,
                                      SeedSpec{230, 0});
    Estimate small = k_surrogate(model, env, f, a, 1e-3, 20000,
                                 SeedSpec{230, 0});
    CHECK(small.mean == doctest::Approx(1e-3 * weighted.mean).epsilon(1e-9));

    Estimate unit = k_surrogate(model, env, parse_functional("1"), a, 1.0,
                                5000, SeedSpec{231, 0});
    CHECK(unit.mean == doctest::Approx(1.0));
}

TEST_CASE("K upper bound behavior") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    const BoxSet& a = env.at("A");
    Functional f = parse_functional("count(A)");

    SUBCASE("s >= 1 collapses to ||Y||") {
        Estimate upper = k_upper(model, env, f, a, 1.0, 50000,
                                 SeedSpec{240, 0});
        Estimate plain = weighted_norm(model, env, f, a, 0.0, 50000,
                                       SeedSpec{240, 0});
        CHECK(upper.mean == doctest::Approx(plain.mean).epsilon(1e-12));
    }
    SUBCASE("zero functional gives zero") {
        Estimate upper = k_upper(model, env, parse_functional("0"), a, 0.25,
                                 2000, SeedSpec{241, 0});
        CHECK(upper.mean == 0.0);
    }
    SUBCASE("uncertified functionals are refused") {
        BoxEnv env2 = env;
        env2["Z"] = BoxSet::box(0.0, 1.0, 2.0, 3.0);
        CHECK_THROWS_AS(k_upper(model, env2, parse_functional("count(Z)"), a,
                                0.5, 1000, SeedSpec{244, 0}),
                        Error);
    }
    SUBCASE("surrogate lower bound vs upper competitor across scales") {
        double lambda = 2.0;
        double c = std::sqrt(2.0) * (std::sqrt(lambda) + 1.0);
        for (double s : {1e-3, 1e-2, 0.1, 0.5, 1.0, 4.0, 100.0}) {
            Estimate surrogate = k_surrogate(model, env, f, a, s, 30000,
                                             SeedSpec{242, 0});
            Estimate upper = k_upper(model, env, f, a, s, 30000,
                                     SeedSpec{243, 0});
            double margin =
                3.0 * (surrogate.std_error + c * upper.std_error);
            CHECK(surrogate.mean / (2.0 * (std::sqrt(lambda) + 1.0)) <=
                  c * upper.mean + margin);
        }
    }
}

TEST_CASE("theta integral: closed form vs quadrature") {
    CHECK(closed_form_theta_integral(1.0, 0.5) == doctest::Approx(2.0));
    CHECK(closed_form_theta_integral(2.0, 0.5) == doctest::Approx(4.0));
    for (double theta : {0.25, 0.5, 0.75})
        for (double c : {0.5, 1.0, 2.0}) {
            double exact = closed_form_theta_integral(c, theta);
            double quad = theta_integral_quadrature(c, theta);
            CHECK(std::abs(quad - exact) <= 1e-6 * exact);
        }
    CHECK_THROWS_AS(closed_form_theta_integral(1.0, 0.0), Error);
    CHECK_THROWS_AS(closed_form_theta_integral(1.0, 1.0), Error);

    // kink outside the grid exercises the analytic tail branches
    for (double theta : {0.25, 0.6}) {
        double above = theta_integral_quadrature(0.1, theta,
                                                 {1e-3, 5.0, 4000});
        CHECK(std::abs(above - closed_form_theta_integral(0.1, theta)) <=
              1e-6 * above);
        double below = theta_integral_quadrature(10.0, theta,
                                                 {0.5, 1e3, 4000});
        CHECK(std::abs(below - closed_form_theta_integral(10.0, theta)) <=
              1e-6 * below);
    }
}

TEST_CASE("interpolation norm against the exact series reference") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    const BoxSet& a = env.at("A");
    double theta = 0.5, lambda = 2.0;

    SUBCASE("Y = 1: Fubini value from the Poisson series") {
        auto result = interpolation_norm(model, env, parse_functional("1"), a,
                                         theta, 100000, SeedSpec{250, 0});
        double moment = poisson_expectation(
            lambda, 200, [&](int n) { return std::sqrt(n + 1.0); });
        double exact = std::sqrt(moment / (2.0 * theta * (1.0 - theta)));
        double tol = 3.0 * result.norm.std_error + result.quad_error;
        CHECK(std::abs(result.norm.mean - exact) <= tol + 1e-9);
        CHECK(!result.tail_warning);
    }
    SUBCASE("zero functional") {
        auto result = interpolation_norm(model, env, parse_functional("0"), a,
                                         theta, 2000, SeedSpec{251, 0});
        CHECK(result.norm.mean == 0.0);
    }
    SUBCASE("band against the weighted norm and the Fubini identity") {
        Functional f = parse_functional("count(A)");
        for (double th : {0.25, 0.5, 0.75}) {
            auto result = interpolation_norm(model, env, f, a, th, 50000,
                                             SeedSpec{252, 0});
            Estimate wn = weighted_norm(model, env, f, a, th, 50000,
                                        SeedSpec{252, 0});
            double big_c = std::sqrt(2.0) * (std::sqrt(lambda) + 1.0) /
                           std::sqrt(th * (1.0 - th));
            double ratio = result.norm.mean / wn.mean;
            CHECK(ratio >= 1.0 / big_c);
            CHECK(ratio <= big_c);
            // Fubini: the defect per path is pure quadrature error
            CHECK(std::abs(result.defect) <=
                  result.quad_error + 3.0 * result.defect_se + 1e-12);
        }
    }
    SUBCASE("profile is monotone in s and ends at ||Y||") {
        auto result =
            interpolation_norm(model, env, parse_functional("count(A)"), a,
                               0.5, 20000, SeedSpec{253, 0}, {}, 1, 3.0,
                               /*with_profile=*/true);
        REQUIRE(!result.profile.empty());
        for (std::size_t i = 1; i < result.profile.size(); ++i)
            CHECK(result.profile[i].second >=
                  result.profile[i - 1].second - 1e-12);
        Estimate plain = weighted_norm(
            model, env, parse_functional("count(A)"), a, 0.0, 20000,
            SeedSpec{253, 0});
        CHECK(result.profile.back().second ==
              doctest::Approx(plain.mean).epsilon(1e-9));
    }
}

TEST_CASE("surrogate is dominated by both saturation branches") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    const BoxSet& a = env.at("A");
    Functional f = parse_functional("count(A) + 1");
    Estimate plain =
        weighted_norm(model, env, f, a, 0.0, 20000, SeedSpec{254, 0});
    Estimate weighted =
        weighted_norm(model, env, f, a, 1.0, 20000, SeedSpec{254, 0});
    for (double s : {0.01, 0.1, 1.0, 10.0}) {
        Estimate sur = k_surrogate(model, env, f, a, s, 20000,
                                   SeedSpec{254, 0});
        CHECK(sur.mean <= plain.mean + 1e-12);
        CHECK(sur.mean <= s * weighted.mean + 1e-12);
    }
}

TEST_CASE("classification") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();

    SUBCASE("N(A) at theta = 1 is finite (exact series)") {
        Verdict v = classify(model, env, parse_functional("count(A)"), "A",
                             1.0, 0, SeedSpec{260, 0}, 4000);
        CHECK(v.exact_mode);
        CHECK(v.status == SeriesStatus::Finite);
        // E[Y^2 N] with Y = N at lambda = 2 is E[N^3] = 22
        CHECK(v.weighted_moment == doctest::Approx(22.0).epsilon(1e-9));
    }
    SUBCASE("growing phi = sqrt(n!/lambda^n) diverges") {
        Verdict v = classify_series(
            2.0, 1.0, 1 << 16, [](std::int64_t n, double lnfact) {
                return lnfact - double(n) * std::log(2.0);
            });
        CHECK(v.status == SeriesStatus::Divergent);
        CHECK(v.scan.growth_exponent > 0.0);
    }
    SUBCASE("MC mode reports finite for a bounded mixed functional") {
        Verdict v = classify(model, env,
                             parse_functional("clamp(sumjumps(A, x), 0, 5)"),
                             "A", 0.5, 20000, SeedSpec{261, 0}, 64);
        CHECK(!v.exact_mode);
        CHECK(v.status == SeriesStatus::Finite);
        CHECK(v.estimate.samples == 20000);
    }
    SUBCASE("uncertified functionals are refused") {
        BoxEnv env2 = env;
        env2["Z"] = BoxSet::box(0.0, 1.0, 2.0, 3.0);
        CHECK_THROWS_AS(classify(model, env2, parse_functional("count(Z)"),
                                 "A", 1.0, 1000, SeedSpec{262, 0}, 64),
                        Error);
    }
    SUBCASE("phi overflow beyond the decided range still resolves") {
        // exp(count) overflows the evaluator near n = 710, long after the
        // Poisson tail has crushed the terms; the scan stops there and the
        // settled increments decide finiteness
        Verdict v = classify(model, env, parse_functional("exp(count(A))"),
                             "A", 1.0, 0, SeedSpec{263, 0}, 4096);
        CHECK(v.exact_mode);
        CHECK(v.status == SeriesStatus::Finite);
        // E[e^{2N} N] at lambda = 2: d/dt E[e^{tN}]|_{t=2} via the pgf
        double expected = 2.0 * std::exp(2.0) *
                          std::exp(2.0 * (std::exp(2.0) - 1.0));
        CHECK(v.weighted_moment == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("weight domination across theta (embedding shadow)") {
    JumpModel model = atom_model();
    BoxEnv env = env_with_A();
    const BoxSet& a = env.at("A");
    Functional f = parse_functional("sumjumps(A, absx)");
    Estimate lo = weighted_norm(model, env, f, a, 0.25, 30000,
                                SeedSpec{270, 0});
    Estimate hi = weighted_norm(model, env, f, a, 0.75, 30000,
                                SeedSpec{270, 0});
    CHECK(lo.mean <= hi.mean + 1e-12);
}
