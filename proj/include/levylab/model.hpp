// SPDX-License-Identifier: Apache-2.0
//
// Compound Poisson model: the jump measure nu as a finite mixture of atoms
// and uniform pieces, half-open box sets in time x space, and the analytic
// measures dt (x) nu and m(ds,dx) = ds x^2 nu(dx). All measure evaluations
// are exact closed forms; no quadrature anywhere in this module.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "levylab/errors.hpp"

namespace levylab {

// Half-open interval [lo, hi). Empty when hi <= lo.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool empty() const { return !(lo < hi); }
    double length() const { return empty() ? 0.0 : hi - lo; }
    bool contains(double x) const { return lo <= x && x < hi; }
};

// One component of the jump measure: a point mass at x0 != 0 or a uniform
// layer on [a, b] with 0 outside the closed interval. Total component mass
// is finite by construction, as is its second moment.
class NuComponent {
  public:
    static NuComponent atom(double x0, double mass);
    static NuComponent uniform(double a, double b, double mass);

    bool is_atom() const { return kind_ == Kind::Atom; }
    double mass() const { return mass_; }
    double atom_x() const { return x0_; }
    double lower() const { return a_; }
    double upper() const { return b_; }

    // nu restricted to the half-open interval.
    double mass_in(const Interval& iv) const;
    // integral of x nu(dx) over the interval (compensator building block)
    double first_moment_in(const Interval& iv) const;
    // integral of x^2 nu(dx) over the interval (the m-measure weight)
    double second_moment_in(const Interval& iv) const;

  private:
    enum class Kind { Atom, Uniform };

    NuComponent(Kind kind, double x0, double a, double b, double mass)
        : kind_(kind), x0_(x0), a_(a), b_(b), mass_(mass) {}

    Kind kind_;
    double x0_;
    double a_, b_;
    double mass_;
};

// Levy triplet restricted to the in-scope case: drift beta, sigma carried as
// a field but required to be 0 by every m-measure operation, and a finite
// jump measure with strictly positive total mass. Immutable after
// construction and safe to share across threads.
class JumpModel {
  public:
    JumpModel(double drift, double horizon, double sigma,
              std::vector<NuComponent> components);

    double drift() const { return drift_; }
    double horizon() const { return horizon_; }
    double sigma() const { return sigma_; }
    const std::vector<NuComponent>& components() const { return components_; }
    double total_mass() const { return total_mass_; }

    double nu_measure(const Interval& iv) const;
    double nu_first_moment(const Interval& iv) const;
    double nu_second_moment(const Interval& iv) const;

    // Throws OutOfScopeError unless sigma == 0.
    void require_pure_jump(const std::string& op) const;

  private:
    double drift_;
    double horizon_;
    double sigma_;
    std::vector<NuComponent> components_;
    double total_mass_;
};

// Half-open rectangle [t1, t2) x [x1, x2).
struct Rect {
    double t1 = 0.0, t2 = 0.0;
    double x1 = 0.0, x2 = 0.0;

    bool empty() const { return !(t1 < t2) || !(x1 < x2); }
    double dt() const { return empty() ? 0.0 : t2 - t1; }
    Interval time() const { return {t1, t2}; }
    Interval space() const { return {x1, x2}; }
    bool contains(double t, double x) const {
        return t1 <= t && t < t2 && x1 <= x && x < x2;
    }
};

bool rects_overlap(const Rect& a, const Rect& b);
Rect rect_intersection(const Rect& a, const Rect& b);
// a \ b as up to four disjoint rectangles; empty pieces dropped.
std::vector<Rect> rect_difference(const Rect& a, const Rect& b);

// Disjoint union of half-open rectangles. Rectangles whose space side spans
// zero are split there on construction, so no side ever straddles the origin;
// the point {0} itself carries no nu-mass and no jump, so the split is exact.
class BoxSet {
  public:
    BoxSet() = default;
    explicit BoxSet(std::vector<Rect> rects);

    static BoxSet box(double t1, double t2, double x1, double x2) {
        return BoxSet({Rect{t1, t2, x1, x2}});
    }

    const std::vector<Rect>& rects() const { return rects_; }
    bool empty() const { return rects_.empty(); }
    bool contains(double t, double x) const;

    double max_time() const;

    static BoxSet intersect(const BoxSet& a, const BoxSet& b);
    // inner subseteq outer, decided exactly by rectangle subtraction.
    static bool subset(const BoxSet& inner, const BoxSet& outer);
    static bool disjoint(const BoxSet& a, const BoxSet& b);
    // union of two box sets that must not overlap
    static BoxSet disjoint_union(const BoxSet& a, const BoxSet& b);

    // Does this set contain [0, t_end) x {x}?
    bool covers_segment(double t_end, double x) const;
    // Does this set contain [0, t_end) x [xs.lo, xs.hi)?
    bool covers_band(double t_end, const Interval& xs) const;

  private:
    std::vector<Rect> rects_;
};

// E[N(A)] = (dt (x) nu)(A), exact.
double expected_count(const JumpModel& model, const BoxSet& a);
// m(A) with m(ds,dx) = ds x^2 nu(dx); rejects sigma != 0.
double m_measure(const JumpModel& model, const BoxSet& a);
// integral of x over A against dt (x) nu (the M-compensator), exact.
double m_first_moment(const JumpModel& model, const BoxSet& a);

// Does A cover [0,T) x supp(nu) for every component? Used by the
// measurability certificate for the terminal value X_T.
bool covers_support(const JumpModel& model, const BoxSet& a);

}  // namespace levylab
