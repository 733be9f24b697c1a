// SPDX-License-Identifier: Apache-2.0
#include "levylab/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <thread>

#include "levylab/chaos.hpp"
#include "levylab/errors.hpp"
#include "levylab/orlicz.hpp"
#include "levylab/simulate.hpp"
#include "levylab/smoothness.hpp"
#include "levylab/version.hpp"

namespace levylab {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// canonical declaration string for the per-check input digest
struct ParamPrinter {
    std::string out;

    void field(const char* key, const std::string& v) {
        out += std::string(key) + "=" + v + ";";
    }
    void field(const char* key, double v) { field(key, fmt(v)); }
    void field(const char* key, std::int64_t v) {
        field(key, std::to_string(v));
    }
    void field(const char* key, int v) { field(key, std::to_string(v)); }
    void field(const char* key, const std::optional<double>& v) {
        if (v) field(key, *v);
    }

    void operator()(const MeckeParams& p) {
        field("functional", p.functional);
        field("box", p.box);
        field("expect", p.expect);
    }
    void operator()(const CovarianceParams& p) {
        field("box1", p.box1);
        field("box2", p.box2);
    }
    void operator()(const IsometryParams& p) {
        field("box", p.box);
        field("splits", p.splits);
    }
    void operator()(const OrthogonalityParams& p) {
        field("box", p.box);
        field("splits", p.splits);
    }
    void operator()(const SandwichParams& p) {
        field("functional", p.functional);
        field("box", p.box);
        field("expect_a", p.expect_a);
        field("expect_b", p.expect_b);
        field("expect_d", p.expect_d);
    }
    void operator()(const EquivalenceParams& p) {
        field("functional", p.functional);
        field("box", p.box);
    }
    void operator()(const WeightedNormParams& p) {
        field("functional", p.functional);
        field("box", p.box);
        field("theta", p.theta);
        field("expect", p.expect);
    }
    void operator()(const KSurrogateParams& p) {
        field("functional", p.functional);
        field("box", p.box);
        field("s", p.s);
        field("expect", p.expect);
    }
    void operator()(const InterpolationBandParams& p) {
        field("functional", p.functional);
        field("box", p.box);
        field("theta", p.theta);
    }
    void operator()(const FubiniParams& p) {
        field("functional", p.functional);
        field("box", p.box);
        field("theta", p.theta);
    }
    void operator()(const ThetaIntegralParams& p) {
        field("theta", p.theta);
        field("c", p.c);
        field("rel_tol", p.rel_tol);
    }
    void operator()(const ClassifyParams& p) {
        field("functional", p.functional);
        field("box", p.box);
        field("theta", p.theta);
        field("truncation", p.truncation);
        field("expect", p.expect);
    }
    void operator()(const CounterexampleParams& p) {
        field("lambda", p.lambda);
        field("a", p.a);
        field("truncation", p.truncation);
    }
    void operator()(const PhiStarParams& p) {
        field("lambda", p.lambda);
        field("expect", p.expect);
        field("tol", p.tol);
    }
    void operator()(const YoungParams& p) {
        field("points", p.points);
        field("range", p.range);
    }
    void operator()(const ProductRuleParams& p) {
        field("f", p.f);
        field("g", p.g);
        field("trials", p.trials);
        field("rel_tol", p.rel_tol);
    }
    void operator()(const ChainRuleParams& p) {
        field("functional", p.functional);
        field("g", p.g);
        field("lo", p.lo);
        field("hi", p.hi);
        field("c", p.c);
        field("trials", p.trials);
        field("rel_tol", p.rel_tol);
    }
    void operator()(const DerivativeNormParams& p) {
        field("functional", p.functional);
        field("box", p.box);
        field("expect", p.expect);
    }
    void operator()(const L2LogParams& p) {
        field("functional", p.functional);
        field("expect", p.expect);
    }
};

struct CheckContext {
    const ExperimentConfig& config;
    const CheckSpec& spec;
    const RunOptions& options;
    CheckRecord record;
    std::vector<std::pair<std::string, std::string>> artifacts;

    const JumpModel& model() const { return *config.model; }
    const BoxSet& box(const std::string& name) const {
        return config.boxes.at(name);
    }
    const Functional& functional(const std::string& name) const {
        return config.functionals.at(name);
    }
    SeedSpec seed() const { return SeedSpec{spec.seed, 0}; }
    int workers() const { return options.workers; }

    void value(const std::string& key, double v) {
        record.values.emplace_back(key, v);
    }
    void estimate(const std::string& key, const Estimate& e) {
        value(key, e.mean);
        value(key + "_se", e.std_error);
    }
    bool within(double got, double expect, double se) const {
        return std::abs(got - expect) <= spec.sigmas * se;
    }
    bool meets(const std::optional<double>& expect, const Estimate& e) const {
        return !expect || within(e.mean, *expect, e.std_error);
    }
};

PartitionPtr split_partition(const JumpModel& model, const BoxSet& box,
                             int splits) {
    Partition one({box}, model);
    return refine_time(one, model, splits);
}

void run_mecke(CheckContext& ctx, const MeckeParams& p) {
    auto pair = mecke_check(ctx.model(), ctx.config.boxes,
                            ctx.functional(p.functional), ctx.box(p.box),
                            ctx.spec.samples, ctx.seed(), ctx.workers(),
                            ctx.spec.sigmas);
    double tol = ctx.spec.sigmas *
                 std::hypot(pair.lhs.std_error, pair.rhs.std_error);
    ctx.estimate("lhs", pair.lhs);
    ctx.estimate("rhs", pair.rhs);
    ctx.value("diff", pair.lhs.mean - pair.rhs.mean);
    ctx.value("tolerance", tol);
    ctx.record.pass = std::abs(pair.lhs.mean - pair.rhs.mean) <= tol &&
                      ctx.meets(p.expect, pair.lhs) &&
                      ctx.meets(p.expect, pair.rhs);
    if (pair.negativity_warning) {
        ctx.record.notes.push_back("functional took negative values; the "
                                   "Mecke identity assumes F >= 0");
        ctx.record.pass = false;
    }
}

void run_covariance(CheckContext& ctx, const CovarianceParams& p) {
    const BoxSet& b1 = ctx.box(p.box1);
    const BoxSet& b2 = ctx.box(p.box2);
    double exact = m_measure(ctx.model(), BoxSet::intersect(b1, b2));
    SeedSpec seed = ctx.seed();
    Estimate est = estimate_mean(
        ctx.spec.samples, seed, ctx.workers(), ctx.spec.sigmas,
        [&](std::int64_t, Rng& rng) {
            JumpPath path = sample_path(ctx.model(), rng, seed);
            return eval_M(ctx.model(), path, b1) *
                   eval_M(ctx.model(), path, b2);
        });
    ctx.estimate("value", est);
    ctx.value("exact", exact);
    ctx.record.pass = ctx.within(est.mean, exact, est.std_error);
}

void run_isometry(CheckContext& ctx, const IsometryParams& p) {
    auto cells = split_partition(ctx.model(), ctx.box(p.box), p.splits);
    CoefficientGrid h = h_indicator_grid(ctx.model(), cells);
    auto iso = isometry_check(ctx.model(), h, ctx.spec.samples, ctx.seed(),
                              ctx.workers(), ctx.spec.sigmas);
    ctx.estimate("mc", iso.mc);
    ctx.value("exact", iso.exact);
    ctx.record.pass = ctx.within(iso.mc.mean, iso.exact, iso.mc.std_error);
}

void run_orthogonality(CheckContext& ctx, const OrthogonalityParams& p) {
    if (p.splits < 2)
        throw Error("orthogonality needs at least 2 partition cells");
    auto cells = split_partition(ctx.model(), ctx.box(p.box), p.splits);
    CoefficientGrid first = h_indicator_grid(ctx.model(), cells);
    CoefficientGrid second(cells, 2);
    std::size_t pair01[2] = {0, 1};
    second.set(2, pair01, 1.0);
    CoefficientGrid sym = symmetrize(second);
    SeedSpec seed = ctx.seed();
    Estimate est = estimate_mean(
        ctx.spec.samples, seed, ctx.workers(), ctx.spec.sigmas,
        [&](std::int64_t, Rng& rng) {
            JumpPath path = sample_path(ctx.model(), rng, seed);
            return chaos_eval(ctx.model(), path, first) *
                   chaos_eval(ctx.model(), path, sym);
        });
    ctx.estimate("value", est);
    ctx.record.pass = ctx.within(est.mean, 0.0, est.std_error);
}

void run_sandwich(CheckContext& ctx, const SandwichParams& p) {
    auto report = sandwich_check(ctx.model(), ctx.config.boxes,
                                 ctx.functional(p.functional), ctx.box(p.box),
                                 ctx.spec.samples, ctx.seed(), ctx.workers(),
                                 ctx.spec.sigmas);
    ctx.estimate("a", report.a);
    ctx.estimate("b", report.b);
    ctx.estimate("d", report.d);
    ctx.value("gap", report.gap);
    ctx.value("gap_tolerance", report.gap_tolerance);
    ctx.record.pass = report.inequality1 && report.inequality2 &&
                      ctx.meets(p.expect_a, report.a) &&
                      ctx.meets(p.expect_b, report.b) &&
                      ctx.meets(p.expect_d, report.d);
    if (!report.inequality1)
        ctx.record.notes.push_back("|a - b| exceeded d + tolerance");
    if (!report.inequality2)
        ctx.record.notes.push_back("d exceeded a + b + tolerance");
}

void run_equivalence(CheckContext& ctx, const EquivalenceParams& p) {
    auto report = equivalence_ratio(
        ctx.model(), ctx.config.boxes, ctx.functional(p.functional),
        ctx.box(p.box), ctx.spec.samples, ctx.seed(), ctx.workers(),
        ctx.spec.sigmas);
    ctx.value("ratio", report.ratio);
    ctx.value("ratio_se", report.std_error);
    ctx.value("band_low", report.band_low);
    ctx.value("band_high", report.band_high);
    ctx.estimate("proxy", report.proxy);
    ctx.estimate("weighted", report.weighted);
    ctx.record.pass = report.pass;
}

void run_weighted_norm(CheckContext& ctx, const WeightedNormParams& p) {
    Estimate est = weighted_norm(ctx.model(), ctx.config.boxes,
                                 ctx.functional(p.functional), ctx.box(p.box),
                                 p.theta, ctx.spec.samples, ctx.seed(),
                                 ctx.workers(), ctx.spec.sigmas);
    ctx.estimate("value", est);
    ctx.record.pass = ctx.meets(p.expect, est);
}

void run_k_surrogate(CheckContext& ctx, const KSurrogateParams& p) {
    Estimate est = k_surrogate(ctx.model(), ctx.config.boxes,
                               ctx.functional(p.functional), ctx.box(p.box),
                               p.s, ctx.spec.samples, ctx.seed(),
                               ctx.workers(), ctx.spec.sigmas);
    ctx.estimate("value", est);
    ctx.record.pass = ctx.meets(p.expect, est);
}

void run_interpolation_band(CheckContext& ctx,
                            const InterpolationBandParams& p) {
    const BoxSet& a = ctx.box(p.box);
    double lambda = expected_count(ctx.model(), a);
    bool want_table = ctx.options.with_tables && !p.table.empty();
    auto result = interpolation_norm(
        ctx.model(), ctx.config.boxes, ctx.functional(p.functional), a,
        p.theta, ctx.spec.samples, ctx.seed(), {}, ctx.workers(),
        ctx.spec.sigmas, want_table);
    // same seed, hence the same path set, for the weighted norm
    Estimate wn = weighted_norm(ctx.model(), ctx.config.boxes,
                                ctx.functional(p.functional), a, p.theta,
                                ctx.spec.samples, ctx.seed(), ctx.workers(),
                                ctx.spec.sigmas);
    double big_c = std::numbers::sqrt2 * (std::sqrt(lambda) + 1.0) /
                   std::sqrt(p.theta * (1.0 - p.theta));
    double ratio = result.norm.mean / wn.mean;
    double ratio_se =
        ratio * std::hypot(result.norm.std_error / result.norm.mean,
                           wn.std_error / wn.mean);
    double slack = ctx.spec.sigmas * ratio_se + result.quad_error;
    ctx.estimate("interpolation", result.norm);
    ctx.estimate("weighted", wn);
    ctx.value("ratio", ratio);
    ctx.value("band", big_c);
    ctx.value("quad_error", result.quad_error);
    ctx.record.pass =
        ratio >= 1.0 / big_c - slack && ratio <= big_c + slack;
    if (result.tail_warning)
        ctx.record.notes.push_back(
            "s grid too narrow: a tail correction saturated");
    if (want_table) {
        std::string table = "s\tsurrogate\n";
        for (const auto& [s, v] : result.profile)
            table += fmt(s) + "\t" + fmt(v) + "\n";
        ctx.artifacts.emplace_back(p.table, table);
    }
}

void run_fubini(CheckContext& ctx, const FubiniParams& p) {
    auto result = interpolation_norm(
        ctx.model(), ctx.config.boxes, ctx.functional(p.functional),
        ctx.box(p.box), p.theta, ctx.spec.samples, ctx.seed(), {},
        ctx.workers(), ctx.spec.sigmas);
    double interp_sq = result.norm.mean * result.norm.mean;
    ctx.value("interp_sq", interp_sq);
    ctx.estimate("reference", result.fubini_reference);
    ctx.value("defect", result.defect);
    ctx.value("defect_se", result.defect_se);
    ctx.value("quad_error", result.quad_error);
    double tol = ctx.spec.sigmas * result.defect_se + result.quad_error +
                 1e-12 * std::max(1.0, interp_sq);
    ctx.record.pass = std::abs(result.defect) <= tol;
}

void run_theta_integral(CheckContext& ctx, const ThetaIntegralParams& p) {
    double exact = closed_form_theta_integral(p.c, p.theta);
    double quad = theta_integral_quadrature(p.c, p.theta);
    double rel_err = std::abs(quad - exact) / exact;
    ctx.value("quadrature", quad);
    ctx.value("closed_form", exact);
    ctx.value("rel_err", rel_err);
    ctx.value("rel_tol", p.rel_tol);
    ctx.record.pass = rel_err <= p.rel_tol;
}

void run_classify(CheckContext& ctx, const ClassifyParams& p) {
    Verdict v = classify(ctx.model(), ctx.config.boxes,
                         ctx.functional(p.functional), p.box, p.theta,
                         ctx.spec.samples, ctx.seed(), p.truncation,
                         ctx.workers(), ctx.spec.sigmas);
    ctx.value("weighted_moment", v.weighted_moment);
    ctx.value("weighted_norm", v.weighted_norm);
    if (v.exact_mode) {
        ctx.value("growth_exponent", v.scan.growth_exponent);
        ctx.value("growth_se", v.scan.growth_se);
    } else {
        ctx.estimate("mc", v.estimate);
    }
    ctx.record.notes.push_back(std::string("status: ") +
                               series_status_name(v.status));
    if (!v.note.empty()) ctx.record.notes.push_back(v.note);
    ctx.record.pass = series_status_name(v.status) == p.expect;
    if (ctx.options.with_tables && !p.table.empty() && v.exact_mode) {
        std::string table = "m\tpartial_sum\n";
        for (const auto& point : v.scan.trace)
            table += std::to_string(point.m) + "\t" + fmt(point.partial) + "\n";
        ctx.artifacts.emplace_back(p.table, table);
    }
}

void run_counterexample(CheckContext& ctx, const CounterexampleParams& p) {
    Verdict d12 = classify_series(
        p.lambda, 1.0, p.truncation,
        [&p](std::int64_t n, double lnfact) {
            return counterexample_log_f_sq(n, p.lambda, p.a, lnfact);
        });
    DivergenceCertificate cert =
        certify_l2log_divergence(p.lambda, p.a, p.truncation);
    ctx.value("d12_moment", d12.weighted_moment);
    ctx.value("d12_growth", d12.scan.growth_exponent);
    ctx.value("l2log_min_ratio", cert.min_ratio);
    ctx.value("l2log_comparison", cert.comparison);
    ctx.record.notes.push_back(std::string("d12 status: ") +
                               series_status_name(d12.status));
    ctx.record.notes.push_back(cert.certified
                                   ? "l2log series certified divergent via "
                                     "the per-term harmonic bound"
                                   : "l2log divergence NOT certified");
    ctx.record.pass =
        d12.status == SeriesStatus::Finite && cert.certified;
    if (ctx.options.with_tables && !p.table.empty()) {
        std::string table = "m\tpartial_sum\n";
        for (const auto& point : d12.scan.trace)
            table += std::to_string(point.m) + "\t" + fmt(point.partial) + "\n";
        ctx.artifacts.emplace_back(p.table, table);
    }
}

void run_phi_star(CheckContext& ctx, const PhiStarParams& p) {
    PhiStarMoment m = phi_star_moment(p.lambda);
    ctx.value("exact", m.exact);
    ctx.value("paper_bound", m.paper_bound);
    ctx.record.pass = m.exact <= m.paper_bound &&
                      (!p.expect || std::abs(m.exact - *p.expect) <= p.tol);
}

void run_young(CheckContext& ctx, const YoungParams& p) {
    Rng rng(ctx.spec.seed, 0);
    double worst = -std::numeric_limits<double>::infinity();
    auto probe = [&](double x, double y) {
        auto [lhs, rhs] = young_check(x, y);
        worst = std::max(worst, lhs - rhs);
    };
    probe(0.0, 0.0);
    probe(std::numbers::e - 1.0, 1.0);  // conjugate equality pair
    for (int i = 0; i < p.points * p.points; ++i)
        probe(rng.uniform(0.0, p.range), rng.uniform(0.0, p.range));
    ctx.value("max_violation", worst);
    ctx.record.pass = worst <= 1e-12 * std::max(1.0, p.range * p.range);
}

DerivativePoint random_point(const JumpModel& model, Rng& rng) {
    return DerivativePoint{rng.uniform(0.0, model.horizon()),
                           sample_jump_size(model, rng)};
}

void run_product_rule(CheckContext& ctx, const ProductRuleParams& p) {
    const Functional& f = ctx.functional(p.f);
    const Functional& g = ctx.functional(p.g);
    double max_rel = 0.0;
    for (std::int64_t trial = 0; trial < p.trials; ++trial) {
        SeedSpec spec{ctx.spec.seed, static_cast<std::uint64_t>(trial)};
        Rng rng(spec);
        JumpPath path = sample_path(ctx.model(), rng, spec);
        DerivativePoint point = random_point(ctx.model(), rng);
        auto pair = product_rule_check(ctx.model(), ctx.config.boxes, f, g,
                                       path, point);
        double scale =
            std::max({1.0, std::abs(pair.lhs), std::abs(pair.rhs)});
        max_rel = std::max(max_rel, std::abs(pair.lhs - pair.rhs) / scale);
    }
    ctx.value("max_rel_error", max_rel);
    ctx.value("trials", double(p.trials));
    ctx.record.pass = max_rel <= p.rel_tol;
}

void run_chain_rule(CheckContext& ctx, const ChainRuleParams& p) {
    const Functional& f = ctx.functional(p.functional);
    LipschitzFn g = p.g == "clamp" ? LipschitzFn::clamp(p.lo, p.hi)
                    : p.g == "min" ? LipschitzFn::min_const(p.c)
                    : p.g == "max" ? LipschitzFn::max_const(p.c)
                                   : LipschitzFn::abs();
    double max_rel = 0.0;
    for (std::int64_t trial = 0; trial < p.trials; ++trial) {
        SeedSpec spec{ctx.spec.seed, static_cast<std::uint64_t>(trial)};
        Rng rng(spec);
        JumpPath path = sample_path(ctx.model(), rng, spec);
        DerivativePoint point = random_point(ctx.model(), rng);
        auto pair = chain_rule_check(ctx.model(), ctx.config.boxes, g, f,
                                     path, point);
        double scale =
            std::max({1.0, std::abs(pair.lhs), std::abs(pair.rhs)});
        max_rel = std::max(max_rel, std::abs(pair.lhs - pair.rhs) / scale);
    }
    ctx.value("max_rel_error", max_rel);
    ctx.value("trials", double(p.trials));
    ctx.record.pass = max_rel <= p.rel_tol;
}

void run_derivative_norm(CheckContext& ctx, const DerivativeNormParams& p) {
    Estimate est = derivative_norm_sq(
        ctx.model(), ctx.config.boxes, ctx.functional(p.functional),
        ctx.box(p.box), ctx.spec.samples, ctx.seed(), ctx.workers(),
        ctx.spec.sigmas);
    ctx.estimate("value", est);
    ctx.record.pass = ctx.meets(p.expect, est);
}

void run_l2log(CheckContext& ctx, const L2LogParams& p) {
    Estimate est = l2log_norm(ctx.model(), ctx.config.boxes,
                              ctx.functional(p.functional), ctx.spec.samples,
                              ctx.seed(), ctx.workers(), ctx.spec.sigmas);
    ctx.estimate("value", est);
    ctx.record.pass = ctx.meets(p.expect, est);
}

CheckContext execute_check(const ExperimentConfig& config,
                           const CheckSpec& spec, const RunOptions& options) {
    CheckContext ctx{config, spec, options, {}, {}};
    ctx.record.name = spec.name;
    ctx.record.kind = spec.kind;
    ParamPrinter printer;
    printer.field("name", spec.name);
    printer.field("kind", spec.kind);
    printer.field("seed", static_cast<std::int64_t>(spec.seed));
    printer.field("samples", spec.samples);
    printer.field("sigmas", spec.sigmas);
    std::visit(printer, spec.params);
    ctx.record.digest = digest_hex(printer.out);

    std::visit(
        [&ctx](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, MeckeParams>)
                run_mecke(ctx, p);
            else if constexpr (std::is_same_v<T, CovarianceParams>)
                run_covariance(ctx, p);
            else if constexpr (std::is_same_v<T, IsometryParams>)
                run_isometry(ctx, p);
            else if constexpr (std::is_same_v<T, OrthogonalityParams>)
                run_orthogonality(ctx, p);
            else if constexpr (std::is_same_v<T, SandwichParams>)
                run_sandwich(ctx, p);
            else if constexpr (std::is_same_v<T, EquivalenceParams>)
                run_equivalence(ctx, p);
            else if constexpr (std::is_same_v<T, WeightedNormParams>)
                run_weighted_norm(ctx, p);
            else if constexpr (std::is_same_v<T, KSurrogateParams>)
                run_k_surrogate(ctx, p);
            else if constexpr (std::is_same_v<T, InterpolationBandParams>)
                run_interpolation_band(ctx, p);
            else if constexpr (std::is_same_v<T, FubiniParams>)
                run_fubini(ctx, p);
            else if constexpr (std::is_same_v<T, ThetaIntegralParams>)
                run_theta_integral(ctx, p);
            else if constexpr (std::is_same_v<T, ClassifyParams>)
                run_classify(ctx, p);
            else if constexpr (std::is_same_v<T, CounterexampleParams>)
                run_counterexample(ctx, p);
            else if constexpr (std::is_same_v<T, PhiStarParams>)
                run_phi_star(ctx, p);
            else if constexpr (std::is_same_v<T, YoungParams>)
                run_young(ctx, p);
            else if constexpr (std::is_same_v<T, ProductRuleParams>)
                run_product_rule(ctx, p);
            else if constexpr (std::is_same_v<T, ChainRuleParams>)
                run_chain_rule(ctx, p);
            else if constexpr (std::is_same_v<T, DerivativeNormParams>)
                run_derivative_norm(ctx, p);
            else if constexpr (std::is_same_v<T, L2LogParams>)
                run_l2log(ctx, p);
        },
        spec.params);
    return ctx;
}

}  // namespace

RunResult run_config(const ExperimentConfig& config,
                     const RunOptions& options) {
    if (!config.model)
        throw Error("run_config: config has no valid model");
    config.model->require_pure_jump("run");

    RunResult result;
    result.report.config_digest = digest_hex(config.raw);
    result.report.version = kVersion;
    result.report.seed = config.seed;

    std::vector<CheckContext> done;
    done.reserve(config.checks.size());
    if (options.parallel_checks && config.checks.size() > 1) {
        std::vector<std::optional<CheckContext>> slots(config.checks.size());
        std::atomic<std::size_t> next{0};
        auto work = [&]() {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= config.checks.size()) break;
                slots[i].emplace(
                    execute_check(config, config.checks[i], options));
            }
        };
        unsigned pool_size = std::min<std::size_t>(
            config.checks.size(),
            std::max(1u, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < pool_size; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
        for (auto& slot : slots) done.push_back(std::move(*slot));
    } else {
        for (const CheckSpec& spec : config.checks)
            done.push_back(execute_check(config, spec, options));
    }

    for (CheckContext& ctx : done) {
        result.report.checks.push_back(std::move(ctx.record));
        for (auto& artifact : ctx.artifacts)
            result.artifacts.push_back(std::move(artifact));
    }

    if (config.path_dump) {
        std::ostringstream os;
        write_path_records(os, *config.model, config.seed,
                           config.path_dump->streams);
        result.artifacts.emplace_back(config.path_dump->file, os.str());
    }
    return result;
}

}  // namespace levylab
