// SPDX-License-Identifier: Apache-2.0
//
// Discrete Wiener-Ito chaos machinery on a finite partition of box cells.
// The random measure M(B) is the jump sum minus its closed-form compensator;
// the multiple integral of an elementary tensor on pairwise-disjoint cells is
// the product of cell M-values; grids of step-function coefficients evaluate
// by summing coefficient * product over tuples of pairwise-distinct cells.
// Tuples with a repeated cell contribute nothing: the elementary definition
// is stated for disjoint boxes, and the diagonal is m^(x)n-null under
// refinement.
#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "levylab/estimate.hpp"
#include "levylab/model.hpp"
#include "levylab/simulate.hpp"

namespace levylab {

// Tuple enumeration is exponential in the order; desk-scale verification
// stays at or below this.
inline constexpr int kDefaultChaosOrder = 3;

// Pairwise-disjoint box cells with cached m-masses. Cells with zero m-mass
// are kept but flagged null.
class Partition {
  public:
    Partition(std::vector<BoxSet> cells, const JumpModel& model);

    std::size_t size() const { return cells_.size(); }
    const BoxSet& cell(std::size_t i) const { return cells_[i]; }
    double m_mass(std::size_t i) const { return m_mass_[i]; }
    bool is_null(std::size_t i) const { return m_mass_[i] == 0.0; }

    // index of the cell containing (t, x), or npos
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t locate(double t, double x) const;

  private:
    std::vector<BoxSet> cells_;
    std::vector<double> m_mass_;
};

using PartitionPtr = std::shared_ptr<const Partition>;

// Step-function chaos coefficients f_0 .. f_max_order on a partition: for
// each order n a dense tensor indexed by n-tuples of cells. Entries on
// repeated-index tuples are stored but never evaluated.
class CoefficientGrid {
  public:
    explicit CoefficientGrid(PartitionPtr partition,
                             int max_order = kDefaultChaosOrder);

    const PartitionPtr& partition() const { return partition_; }
    int max_order() const { return max_order_; }
    bool symmetric() const { return symmetric_; }
    void mark_symmetric() { symmetric_ = true; }

    double constant() const { return tensors_[0][0]; }
    void set_constant(double v) { tensors_[0][0] = v; }

    double get(int order, std::span<const std::size_t> cells) const;
    void set(int order, std::span<const std::size_t> cells, double value);

    const std::vector<double>& tensor(int order) const {
        return tensors_[static_cast<std::size_t>(order)];
    }

    void scale(double c);

  private:
    friend CoefficientGrid symmetrize(const CoefficientGrid& grid);

    std::size_t flat_index(int order,
                           std::span<const std::size_t> cells) const;

    PartitionPtr partition_;
    int max_order_;
    bool symmetric_ = false;
    std::vector<std::vector<double>> tensors_;  // tensors_[n] has K^n entries
};

// M(B) = sum of jump sizes in B minus the closed-form compensator
// integral of x over B against dt (x) nu. Requires sigma = 0.
double eval_M(const JumpModel& model, const JumpPath& path, const BoxSet& b);

// coefficient * prod_i M(cell_i); cells must be pairwise disjoint.
double multiple_integral(const JumpModel& model, const JumpPath& path,
                         std::span<const BoxSet> cells, double coefficient);

// sum over n and over n-tuples of pairwise-distinct cells of
// coefficient * prod M(cell). Exact pathwise, no randomness.
double chaos_eval(const JumpModel& model, const JumpPath& path,
                  const CoefficientGrid& grid);

// average each tensor over index permutations
CoefficientGrid symmetrize(const CoefficientGrid& grid);

// sum_n n! (f~_n, g~_n) over distinct-cell tuples weighted by the cell
// m-masses; orders present in only one grid contribute zero. Grids must
// share a partition.
double grid_inner_product(const JumpModel& model, const CoefficientGrid& f,
                          const CoefficientGrid& g);

struct IsometryCheck {
    Estimate mc;   // Monte Carlo estimate of E[chaos_eval^2]
    double exact;  // sum_n n! ||f~_n||^2
};

IsometryCheck isometry_check(const JumpModel& model,
                             const CoefficientGrid& grid,
                             std::int64_t n_samples, SeedSpec seed,
                             int workers = 1, double sigmas = 3.0);

// f_1 = 1/x on each cell of a partition whose cells carry single-atom
// nu-support; then I_1(f_1) = N(A) - E[N(A)] pathwise for A the union.
CoefficientGrid h_indicator_grid(const JumpModel& model, PartitionPtr cells);

// Record list (order, cell indices..., value), delimiter-separated; zero
// entries omitted.
void write_grid(std::ostream& os, const CoefficientGrid& grid,
                char delim = '\t');
CoefficientGrid read_grid(std::istream& is, PartitionPtr partition,
                          int max_order, char delim = '\t');

// Split every rectangle of every cell into k equal time slices; step
// functions carried over (repeated original cells map to zero, see module
// notes) keep the same chaos_eval pathwise.
PartitionPtr refine_time(const Partition& partition, const JumpModel& model,
                         int k);
CoefficientGrid carry_to_refinement(const CoefficientGrid& grid,
                                    PartitionPtr refined,
                                    const JumpModel& model);

}  // namespace levylab
