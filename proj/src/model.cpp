// SPDX-License-Identifier: Apache-2.0
#include "levylab/model.hpp"

#include <algorithm>
#include <cmath>

namespace levylab {

namespace {

Interval clip(const Interval& iv, double lo, double hi) {
    return Interval{std::max(iv.lo, lo), std::min(iv.hi, hi)};
}

}  // namespace

// ---------------------------------------------------------------------------
// NuComponent
// ---------------------------------------------------------------------------

NuComponent NuComponent::atom(double x0, double mass) {
    if (x0 == 0.0) throw Error("nu atom must not charge {0}");
    if (!(mass > 0.0)) throw Error("nu component mass must be > 0");
    return NuComponent(Kind::Atom, x0, x0, x0, mass);
}

NuComponent NuComponent::uniform(double a, double b, double mass) {
    if (!(a < b)) throw Error("uniform nu component needs a < b");
    if (a <= 0.0 && 0.0 <= b)
        throw Error("uniform nu component support must exclude 0");
    if (!(mass > 0.0)) throw Error("nu component mass must be > 0");
    return NuComponent(Kind::Uniform, 0.0, a, b, mass);
}

double NuComponent::mass_in(const Interval& iv) const {
    if (iv.empty()) return 0.0;
    if (kind_ == Kind::Atom) return iv.contains(x0_) ? mass_ : 0.0;
    Interval ov = clip(iv, a_, b_);
    return ov.empty() ? 0.0 : mass_ * ov.length() / (b_ - a_);
}

double NuComponent::first_moment_in(const Interval& iv) const {
    if (iv.empty()) return 0.0;
    if (kind_ == Kind::Atom) return iv.contains(x0_) ? mass_ * x0_ : 0.0;
    Interval ov = clip(iv, a_, b_);
    if (ov.empty()) return 0.0;
    double density = mass_ / (b_ - a_);
    return density * (ov.hi * ov.hi - ov.lo * ov.lo) / 2.0;
}

double NuComponent::second_moment_in(const Interval& iv) const {
    if (iv.empty()) return 0.0;
    if (kind_ == Kind::Atom) return iv.contains(x0_) ? mass_ * x0_ * x0_ : 0.0;
    Interval ov = clip(iv, a_, b_);
    if (ov.empty()) return 0.0;
    double density = mass_ / (b_ - a_);
    return density * (ov.hi * ov.hi * ov.hi - ov.lo * ov.lo * ov.lo) / 3.0;
}

// ---------------------------------------------------------------------------
// JumpModel
// ---------------------------------------------------------------------------

JumpModel::JumpModel(double drift, double horizon, double sigma,
                     std::vector<NuComponent> components)
    : drift_(drift), horizon_(horizon), sigma_(sigma),
      components_(std::move(components)), total_mass_(0.0) {
    if (!(horizon_ > 0.0)) throw Error("horizon T must be > 0");
    if (!std::isfinite(drift_)) throw Error("drift must be finite");
    for (const auto& c : components_) total_mass_ += c.mass();
    if (!(total_mass_ > 0.0) || !std::isfinite(total_mass_))
        throw Error("nu must have finite total mass > 0");
}

double JumpModel::nu_measure(const Interval& iv) const {
    double total = 0.0;
    for (const auto& c : components_) total += c.mass_in(iv);
    return total;
}

double JumpModel::nu_first_moment(const Interval& iv) const {
    double total = 0.0;
    for (const auto& c : components_) total += c.first_moment_in(iv);
    return total;
}

double JumpModel::nu_second_moment(const Interval& iv) const {
    double total = 0.0;
    for (const auto& c : components_) total += c.second_moment_in(iv);
    return total;
}

void JumpModel::require_pure_jump(const std::string& op) const {
    if (sigma_ != 0.0)
        throw OutOfScopeError(op + ": sigma != 0 is out of scope "
                              "(Brownian component not supported)");
}

// ---------------------------------------------------------------------------
// Rectangles
// ---------------------------------------------------------------------------

bool rects_overlap(const Rect& a, const Rect& b) {
    return !rect_intersection(a, b).empty();
}

Rect rect_intersection(const Rect& a, const Rect& b) {
    return Rect{std::max(a.t1, b.t1), std::min(a.t2, b.t2),
                std::max(a.x1, b.x1), std::min(a.x2, b.x2)};
}

std::vector<Rect> rect_difference(const Rect& a, const Rect& b) {
    Rect ov = rect_intersection(a, b);
    if (ov.empty()) return {a};
    std::vector<Rect> pieces;
    auto push = [&pieces](Rect r) {
        if (!r.empty()) pieces.push_back(r);
    };
    push(Rect{a.t1, ov.t1, a.x1, a.x2});   // before in time
    push(Rect{ov.t2, a.t2, a.x1, a.x2});   // after in time
    push(Rect{ov.t1, ov.t2, a.x1, ov.x1}); // below in space
    push(Rect{ov.t1, ov.t2, ov.x2, a.x2}); // above in space
    return pieces;
}

// ---------------------------------------------------------------------------
// BoxSet
// ---------------------------------------------------------------------------

BoxSet::BoxSet(std::vector<Rect> rects) {
    rects_.reserve(rects.size());
    for (const Rect& r : rects) {
        if (r.empty()) continue;
        if (!(r.t1 >= 0.0)) throw Error("box time side must start at t >= 0");
        // split space sides straddling the origin; {0} is nu-null and
        // jump-free, so the half-open split is measure exact
        if (r.x1 < 0.0 && 0.0 < r.x2) {
            rects_.push_back(Rect{r.t1, r.t2, r.x1, 0.0});
            rects_.push_back(Rect{r.t1, r.t2, 0.0, r.x2});
        } else {
            rects_.push_back(r);
        }
    }
    for (std::size_t i = 0; i < rects_.size(); ++i)
        for (std::size_t j = i + 1; j < rects_.size(); ++j)
            if (rects_overlap(rects_[i], rects_[j]))
                throw Error("box set rectangles must be pairwise disjoint");
}

bool BoxSet::contains(double t, double x) const {
    if (x == 0.0) return false;  // space is R \ {0}
    for (const Rect& r : rects_)
        if (r.contains(t, x)) return true;
    return false;
}

double BoxSet::max_time() const {
    double m = 0.0;
    for (const Rect& r : rects_) m = std::max(m, r.t2);
    return m;
}

BoxSet BoxSet::intersect(const BoxSet& a, const BoxSet& b) {
    std::vector<Rect> out;
    for (const Rect& ra : a.rects_)
        for (const Rect& rb : b.rects_) {
            Rect ov = rect_intersection(ra, rb);
            if (!ov.empty()) out.push_back(ov);
        }
    return BoxSet(std::move(out));
}

bool BoxSet::subset(const BoxSet& inner, const BoxSet& outer) {
    std::vector<Rect> remainder = inner.rects_;
    for (const Rect& cut : outer.rects_) {
        std::vector<Rect> next;
        for (const Rect& r : remainder) {
            auto pieces = rect_difference(r, cut);
            next.insert(next.end(), pieces.begin(), pieces.end());
        }
        remainder.swap(next);
        if (remainder.empty()) return true;
    }
    return remainder.empty();
}

bool BoxSet::disjoint(const BoxSet& a, const BoxSet& b) {
    for (const Rect& ra : a.rects_)
        for (const Rect& rb : b.rects_)
            if (rects_overlap(ra, rb)) return false;
    return true;
}

BoxSet BoxSet::disjoint_union(const BoxSet& a, const BoxSet& b) {
    std::vector<Rect> all = a.rects_;
    all.insert(all.end(), b.rects_.begin(), b.rects_.end());
    return BoxSet(std::move(all));
}

bool BoxSet::covers_segment(double t_end, double x) const {
    // union of time intervals of rects whose space side holds x must
    // cover [0, t_end)
    std::vector<Interval> times;
    for (const Rect& r : rects_)
        if (r.x1 <= x && x < r.x2) times.push_back(r.time());
    std::sort(times.begin(), times.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    double reached = 0.0;
    for (const Interval& iv : times) {
        if (iv.lo > reached) return false;
        reached = std::max(reached, iv.hi);
        if (reached >= t_end) return true;
    }
    return reached >= t_end;
}

bool BoxSet::covers_band(double t_end, const Interval& xs) const {
    if (xs.empty()) return true;
    return subset(BoxSet({Rect{0.0, t_end, xs.lo, xs.hi}}), *this);
}

// ---------------------------------------------------------------------------
// Measures of box sets
// ---------------------------------------------------------------------------

double expected_count(const JumpModel& model, const BoxSet& a) {
    double total = 0.0;
    for (const Rect& r : a.rects())
        total += r.dt() * model.nu_measure(r.space());
    return total;
}

double m_measure(const JumpModel& model, const BoxSet& a) {
    model.require_pure_jump("m_measure");
    double total = 0.0;
    for (const Rect& r : a.rects())
        total += r.dt() * model.nu_second_moment(r.space());
    return total;
}

double m_first_moment(const JumpModel& model, const BoxSet& a) {
    double total = 0.0;
    for (const Rect& r : a.rects())
        total += r.dt() * model.nu_first_moment(r.space());
    return total;
}

bool covers_support(const JumpModel& model, const BoxSet& a) {
    double t_end = model.horizon();
    for (const NuComponent& c : model.components()) {
        if (c.is_atom()) {
            if (!a.covers_segment(t_end, c.atom_x())) return false;
        } else {
            if (!a.covers_band(t_end, Interval{c.lower(), c.upper()}))
                return false;
        }
    }
    return true;
}

}  // namespace levylab
