// SPDX-License-Identifier: Apache-2.0
#include "levylab/malliavin.hpp"

#include <atomic>
#include <cmath>

#include "levylab/errors.hpp"

namespace levylab {

// ---------------------------------------------------------------------------
// Difference quotient and chaos shift
// ---------------------------------------------------------------------------

double derivative_quotient(const PathFunctional& f, const JumpPath& path,
                           DerivativePoint p) {
    if (p.x == 0.0) throw Error("derivative point must have x != 0");
    return (f(add_jump(path, p.t, p.x)) - f(path)) / p.x;
}

double derivative_quotient(const Functional& f, const JumpModel& model,
                           const BoxEnv& boxes, const JumpPath& path,
                           DerivativePoint p) {
    return derivative_quotient(
        [&](const JumpPath& q) { return evaluate(f, model, boxes, q); }, path,
        p);
}

double derivative_chaos(const JumpModel& model, const CoefficientGrid& grid,
                        const JumpPath& path, DerivativePoint p) {
    if (p.x == 0.0) throw Error("derivative point must have x != 0");
    if (!grid.symmetric())
        throw Error("derivative_chaos needs a symmetrized grid");
    const Partition& partition = *grid.partition();
    std::size_t hit = partition.locate(p.t, p.x);
    if (hit == Partition::npos) return 0.0;  // f~ vanishes outside the cells

    std::vector<double> m(partition.size());
    for (std::size_t i = 0; i < partition.size(); ++i)
        m[i] = eval_M(model, path, partition.cell(i));

    double total = 0.0;
    std::size_t k = partition.size();
    for (int n = 1; n <= grid.max_order(); ++n) {
        // (n-1)-tuples of distinct cells, all distinct from the hit cell:
        // entries repeating `hit` sit on the original diagonal and carry 0
        double slice_sum = 0.0;
        std::vector<std::size_t> tuple(static_cast<std::size_t>(n), 0);
        tuple.back() = hit;
        if (n == 1) {
            slice_sum = grid.get(1, tuple);
        } else {
            std::vector<std::size_t> idx(static_cast<std::size_t>(n - 1), 0);
            bool done = false;
            while (!done) {
                bool distinct = true;
                for (std::size_t i = 0; i < idx.size() && distinct; ++i) {
                    if (idx[i] == hit) distinct = false;
                    for (std::size_t j = i + 1; j < idx.size(); ++j)
                        if (idx[i] == idx[j]) {
                            distinct = false;
                            break;
                        }
                }
                if (distinct) {
                    for (std::size_t i = 0; i < idx.size(); ++i)
                        tuple[i] = idx[i];
                    double coef = grid.get(n, tuple);
                    if (coef != 0.0) {
                        double prod = coef;
                        for (std::size_t c : idx) prod *= m[c];
                        slice_sum += prod;
                    }
                }
                int pos = n - 2;
                while (pos >= 0) {
                    if (++idx[static_cast<std::size_t>(pos)] < k) break;
                    idx[static_cast<std::size_t>(pos)] = 0;
                    --pos;
                }
                done = pos < 0;
            }
        }
        total += n * slice_sum;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Point samplers over A
// ---------------------------------------------------------------------------

namespace {

struct RectWeight {
    const Rect* rect;
    double weight;
};

double pick_rect(const std::vector<RectWeight>& rects, double total,
                 Rng& rng, const Rect*& out) {
    double u = rng.uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < rects.size(); ++i) {
        acc += rects[i].weight;
        if (u < acc || i + 1 == rects.size()) {
            out = rects[i].rect;
            return rects[i].weight;
        }
    }
    throw Error("unreachable: empty rect list");
}

// inverse-CDF sample from density ~ x^2 on [lo, hi); works on either side
// of the origin because x^3 is monotone
double sample_x2_density(double lo, double hi, Rng& rng) {
    double lo3 = lo * lo * lo;
    double hi3 = hi * hi * hi;
    return std::cbrt(lo3 + rng.uniform01() * (hi3 - lo3));
}

}  // namespace

DerivativePoint sample_point_m(const JumpModel& model, const BoxSet& a,
                               Rng& rng) {
    model.require_pure_jump("sample_point_m");
    std::vector<RectWeight> rects;
    double total = 0.0;
    for (const Rect& r : a.rects()) {
        double w = r.dt() * model.nu_second_moment(r.space());
        if (w > 0.0) {
            rects.push_back({&r, w});
            total += w;
        }
    }
    if (!(total > 0.0)) throw Error("sample_point_m: m_measure(A) must be > 0");
    const Rect* rect = nullptr;
    pick_rect(rects, total, rng, rect);
    double t = rng.uniform(rect->t1, rect->t2);
    // component mixture weighted by second moment on the rect's space side
    Interval side = rect->space();
    double side_total = model.nu_second_moment(side);
    double u = rng.uniform01() * side_total;
    double acc = 0.0;
    const auto& comps = model.components();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        double w = comps[i].second_moment_in(side);
        acc += w;
        if ((w > 0.0 && u < acc) || i + 1 == comps.size()) {
            const NuComponent& c = comps[i];
            if (c.is_atom()) return DerivativePoint{t, c.atom_x()};
            double lo = std::max(side.lo, c.lower());
            double hi = std::min(side.hi, c.upper());
            return DerivativePoint{t, sample_x2_density(lo, hi, rng)};
        }
    }
    throw Error("unreachable: no component mass on rect");
}

DerivativePoint sample_point_dtnu(const JumpModel& model, const BoxSet& a,
                                  Rng& rng) {
    std::vector<RectWeight> rects;
    double total = 0.0;
    for (const Rect& r : a.rects()) {
        double w = r.dt() * model.nu_measure(r.space());
        if (w > 0.0) {
            rects.push_back({&r, w});
            total += w;
        }
    }
    if (!(total > 0.0))
        throw Error("sample_point_dtnu: expected_count(A) must be > 0");
    const Rect* rect = nullptr;
    pick_rect(rects, total, rng, rect);
    double t = rng.uniform(rect->t1, rect->t2);
    Interval side = rect->space();
    double side_total = model.nu_measure(side);
    double u = rng.uniform01() * side_total;
    double acc = 0.0;
    const auto& comps = model.components();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        double w = comps[i].mass_in(side);
        acc += w;
        if ((w > 0.0 && u < acc) || i + 1 == comps.size()) {
            const NuComponent& c = comps[i];
            if (c.is_atom()) return DerivativePoint{t, c.atom_x()};
            double lo = std::max(side.lo, c.lower());
            double hi = std::min(side.hi, c.upper());
            return DerivativePoint{t, rng.uniform(lo, hi)};
        }
    }
    throw Error("unreachable: no component mass on rect");
}

// ---------------------------------------------------------------------------
// Derivative norm and Mecke
// ---------------------------------------------------------------------------

Estimate derivative_norm_sq(const JumpModel& model, const PathFunctional& f,
                            const BoxSet& a, std::int64_t n_samples,
                            SeedSpec seed, int workers, double sigmas) {
    double weight = m_measure(model, a);
    if (!(weight > 0.0))
        throw Error("derivative_norm_sq: m_measure(A) must be > 0");
    return estimate_mean(
        n_samples, seed, workers, sigmas, [&](std::int64_t, Rng& rng) {
            DerivativePoint p = sample_point_m(model, a, rng);
            JumpPath path = sample_path(model, rng, seed);
            double q = derivative_quotient(f, path, p);
            return weight * q * q;
        });
}

Estimate derivative_norm_sq(const JumpModel& model, const BoxEnv& boxes,
                            const Functional& f, const BoxSet& a,
                            std::int64_t n_samples, SeedSpec seed,
                            int workers, double sigmas) {
    return derivative_norm_sq(
        model,
        [&](const JumpPath& q) { return evaluate(f, model, boxes, q); }, a,
        n_samples, seed, workers, sigmas);
}

MeckePair mecke_check(const JumpModel& model, const BoxEnv& boxes,
                      const Functional& f, const BoxSet& a,
                      std::int64_t n_samples, SeedSpec seed, int workers,
                      double sigmas) {
    double lambda = expected_count(model, a);
    std::atomic<bool> negative{false};
    MeckePair pair;
    pair.lhs = estimate_mean(
        n_samples, seed, workers, sigmas, [&](std::int64_t, Rng& rng) {
            DerivativePoint p = sample_point_dtnu(model, a, rng);
            JumpPath path = sample_path(model, rng, seed);
            double v = evaluate(f, model, boxes, add_jump(path, p.t, p.x));
            if (v < 0.0) negative.store(true, std::memory_order_relaxed);
            return lambda * v;
        });
    SeedSpec rhs_seed{seed.master, seed.stream + (std::uint64_t{1} << 32)};
    pair.rhs = estimate_mean(
        n_samples, rhs_seed, workers, sigmas, [&](std::int64_t, Rng& rng) {
            JumpPath path = sample_path(model, rng, rhs_seed);
            double v = evaluate(f, model, boxes, path);
            if (v < 0.0) negative.store(true, std::memory_order_relaxed);
            return count_in(path, a) * v;
        });
    pair.negativity_warning = negative.load();
    return pair;
}

// ---------------------------------------------------------------------------
// Product and chain rules
// ---------------------------------------------------------------------------

PathwisePair product_rule_check(const JumpModel& model, const BoxEnv& boxes,
                                const Functional& f, const Functional& g,
                                const JumpPath& path, DerivativePoint p) {
    Functional product(ast::bin(BinOp::Mul, f.root(), g.root()));
    double y = evaluate(f, model, boxes, path);
    double z = evaluate(g, model, boxes, path);
    double dy = derivative_quotient(f, model, boxes, path, p);
    double dz = derivative_quotient(g, model, boxes, path, p);
    PathwisePair out;
    out.lhs = derivative_quotient(product, model, boxes, path, p);
    out.rhs = y * dz + z * dy + p.x * dy * dz;
    return out;
}

LipschitzFn LipschitzFn::clamp(double lo, double hi) {
    if (lo > hi) throw Error("clamp bounds out of order");
    LipschitzFn g;
    g.kind = Kind::Clamp;
    g.lo = lo;
    g.hi = hi;
    return g;
}

LipschitzFn LipschitzFn::abs() {
    LipschitzFn g;
    g.kind = Kind::Abs;
    return g;
}

LipschitzFn LipschitzFn::min_const(double c) {
    LipschitzFn g;
    g.kind = Kind::MinConst;
    g.c = c;
    return g;
}

LipschitzFn LipschitzFn::max_const(double c) {
    LipschitzFn g;
    g.kind = Kind::MaxConst;
    g.c = c;
    return g;
}

double LipschitzFn::operator()(double y) const {
    switch (kind) {
        case Kind::Clamp: return std::min(std::max(y, lo), hi);
        case Kind::Abs: return std::abs(y);
        case Kind::MinConst: return std::min(y, c);
        case Kind::MaxConst: return std::max(y, c);
    }
    return y;
}

ExprPtr LipschitzFn::compose(const ExprPtr& e) const {
    switch (kind) {
        case Kind::Clamp:
            return ast::clamp(e, ast::constant(lo), ast::constant(hi));
        case Kind::Abs:  // |y| = max(y, -y), staying inside the operator set
            return ast::bin(BinOp::Max, e, ast::neg(e));
        case Kind::MinConst:
            return ast::bin(BinOp::Min, e, ast::constant(c));
        case Kind::MaxConst:
            return ast::bin(BinOp::Max, e, ast::constant(c));
    }
    return e;
}

PathwisePair chain_rule_check(const JumpModel& model, const BoxEnv& boxes,
                              const LipschitzFn& g, const Functional& f,
                              const JumpPath& path, DerivativePoint p) {
    Functional composed(g.compose(f.root()));
    double y = evaluate(f, model, boxes, path);
    double dy = derivative_quotient(f, model, boxes, path, p);
    PathwisePair out;
    out.lhs = derivative_quotient(composed, model, boxes, path, p);
    out.rhs = (g(y + p.x * dy) - g(y)) / p.x;
    return out;
}

// ---------------------------------------------------------------------------
// Conditional projection and conditional Monte Carlo
// ---------------------------------------------------------------------------

CoefficientGrid conditional_projection(const CoefficientGrid& grid,
                                       const BoxSet& a) {
    const Partition& partition = *grid.partition();
    std::vector<bool> inside(partition.size());
    for (std::size_t i = 0; i < partition.size(); ++i) {
        const BoxSet& cell = partition.cell(i);
        if (BoxSet::subset(cell, a)) {
            inside[i] = true;
        } else if (BoxSet::disjoint(cell, a)) {
            inside[i] = false;
        } else {
            throw Error(
                "conditional_projection: partition cell straddles A; refine "
                "the partition so every cell is inside A or disjoint from it");
        }
    }
    CoefficientGrid out = grid;
    std::size_t k = partition.size();
    for (int n = 1; n <= grid.max_order(); ++n) {
        std::vector<std::size_t> tuple(static_cast<std::size_t>(n), 0);
        bool done = k == 0;
        while (!done) {
            bool keep = true;
            for (std::size_t c : tuple)
                if (!inside[c]) {
                    keep = false;
                    break;
                }
            if (!keep) out.set(n, tuple, 0.0);
            int pos = n - 1;
            while (pos >= 0) {
                if (++tuple[static_cast<std::size_t>(pos)] < k) break;
                tuple[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            done = pos < 0;
        }
    }
    if (grid.symmetric()) out.mark_symmetric();
    return out;
}

double conditional_mc(const JumpModel& model, const PathFunctional& f,
                      const BoxSet& a, const JumpPath& path,
                      std::int64_t resamples, SeedSpec seed) {
    if (resamples <= 0) throw Error("resamples must be > 0");
    std::vector<Jump> kept;
    for (const Jump& j : path.jumps())
        if (a.contains(j.t, j.x)) kept.push_back(j);
    double sum = 0.0;
    for (std::int64_t r = 0; r < resamples; ++r) {
        SeedSpec spec{seed.master, seed.stream + static_cast<std::uint64_t>(r)};
        JumpPath fresh = sample_path(model, spec);
        std::vector<Jump> merged = kept;
        for (const Jump& j : fresh.jumps())
            if (!a.contains(j.t, j.x)) merged.push_back(j);
        sum += f(JumpPath(std::move(merged), spec));
    }
    return sum / static_cast<double>(resamples);
}

double conditional_mc(const JumpModel& model, const BoxEnv& boxes,
                      const Functional& f, const BoxSet& a,
                      const JumpPath& path, std::int64_t resamples,
                      SeedSpec seed) {
    return conditional_mc(
        model,
        [&](const JumpPath& q) { return evaluate(f, model, boxes, q); }, a,
        path, resamples, seed);
}

}  // namespace levylab
