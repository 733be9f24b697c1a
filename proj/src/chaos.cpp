// SPDX-License-Identifier: Apache-2.0
#include "levylab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "levylab/errors.hpp"

namespace levylab {

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

Partition::Partition(std::vector<BoxSet> cells, const JumpModel& model)
    : cells_(std::move(cells)) {
    model.require_pure_jump("partition");
    for (std::size_t i = 0; i < cells_.size(); ++i)
        for (std::size_t j = i + 1; j < cells_.size(); ++j)
            if (!BoxSet::disjoint(cells_[i], cells_[j]))
                throw Error("partition cells must be pairwise disjoint");
    m_mass_.reserve(cells_.size());
    for (const BoxSet& c : cells_) m_mass_.push_back(m_measure(model, c));
}

std::size_t Partition::locate(double t, double x) const {
    for (std::size_t i = 0; i < cells_.size(); ++i)
        if (cells_[i].contains(t, x)) return i;
    return npos;
}

// ---------------------------------------------------------------------------
// CoefficientGrid
// ---------------------------------------------------------------------------

CoefficientGrid::CoefficientGrid(PartitionPtr partition, int max_order)
    : partition_(std::move(partition)), max_order_(max_order) {
    if (!partition_) throw Error("grid needs a partition");
    if (max_order_ < 0) throw Error("grid order must be >= 0");
    std::size_t k = partition_->size();
    tensors_.resize(static_cast<std::size_t>(max_order_) + 1);
    std::size_t size = 1;
    for (int n = 0; n <= max_order_; ++n) {
        tensors_[static_cast<std::size_t>(n)].assign(size, 0.0);
        size *= k;
    }
}

std::size_t CoefficientGrid::flat_index(
    int order, std::span<const std::size_t> cells) const {
    if (order < 0 || order > max_order_)
        throw Error("tensor order out of range");
    if (cells.size() != static_cast<std::size_t>(order))
        throw Error("index tuple arity mismatch");
    std::size_t k = partition_->size();
    std::size_t idx = 0;
    for (std::size_t c : cells) {
        if (c >= k) throw Error("cell index out of range");
        idx = idx * k + c;
    }
    return idx;
}

double CoefficientGrid::get(int order,
                            std::span<const std::size_t> cells) const {
    return tensors_[static_cast<std::size_t>(order)][flat_index(order, cells)];
}

void CoefficientGrid::set(int order, std::span<const std::size_t> cells,
                          double value) {
    tensors_[static_cast<std::size_t>(order)][flat_index(order, cells)] =
        value;
    symmetric_ = false;
}

void CoefficientGrid::scale(double c) {
    for (auto& tensor : tensors_)
        for (double& v : tensor) v *= c;
}

// ---------------------------------------------------------------------------
// Random measure and multiple integrals
// ---------------------------------------------------------------------------

double eval_M(const JumpModel& model, const JumpPath& path, const BoxSet& b) {
    model.require_pure_jump("eval_M");
    double sum = 0.0;
    for (const Jump& j : path.jumps())
        if (b.contains(j.t, j.x)) sum += j.x;
    return sum - m_first_moment(model, b);
}

double multiple_integral(const JumpModel& model, const JumpPath& path,
                         std::span<const BoxSet> cells, double coefficient) {
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j)
            if (!BoxSet::disjoint(cells[i], cells[j]))
                throw Error(
                    "multiple_integral cells must be pairwise disjoint");
    double product = coefficient;
    for (const BoxSet& cell : cells) product *= eval_M(model, path, cell);
    return product;
}

namespace {

// visit all order-n tuples over k cells with pairwise-distinct entries
template <typename Fn>
void for_each_distinct_tuple(std::size_t k, int order, Fn&& fn) {
    if (order == 0) return;
    std::vector<std::size_t> tuple(static_cast<std::size_t>(order), 0);
    for (;;) {
        bool distinct = true;
        for (std::size_t i = 0; i < tuple.size() && distinct; ++i)
            for (std::size_t j = i + 1; j < tuple.size(); ++j)
                if (tuple[i] == tuple[j]) {
                    distinct = false;
                    break;
                }
        if (distinct) fn(std::span<const std::size_t>(tuple));
        // odometer increment
        int pos = order - 1;
        while (pos >= 0) {
            if (++tuple[static_cast<std::size_t>(pos)] < k) break;
            tuple[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
}

std::vector<double> cell_m_values(const JumpModel& model, const JumpPath& path,
                                  const Partition& partition) {
    std::vector<double> values(partition.size());
    for (std::size_t i = 0; i < partition.size(); ++i)
        values[i] = eval_M(model, path, partition.cell(i));
    return values;
}

}  // namespace

double chaos_eval(const JumpModel& model, const JumpPath& path,
                  const CoefficientGrid& grid) {
    const Partition& partition = *grid.partition();
    std::vector<double> m = cell_m_values(model, path, partition);
    double total = grid.constant();
    for (int n = 1; n <= grid.max_order(); ++n) {
        for_each_distinct_tuple(
            partition.size(), n, [&](std::span<const std::size_t> tuple) {
                double coef = grid.get(n, tuple);
                if (coef == 0.0) return;
                double prod = coef;
                for (std::size_t c : tuple) prod *= m[c];
                total += prod;
            });
    }
    return total;
}

CoefficientGrid symmetrize(const CoefficientGrid& grid) {
    CoefficientGrid out(grid.partition(), grid.max_order());
    out.set_constant(grid.constant());
    std::size_t k = grid.partition()->size();
    for (int n = 1; n <= grid.max_order(); ++n) {
        std::vector<std::size_t> tuple(static_cast<std::size_t>(n), 0);
        std::vector<std::size_t> perm(static_cast<std::size_t>(n));
        bool done = k == 0;
        while (!done) {
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            double sum = 0.0;
            std::size_t count = 0;
            std::vector<std::size_t> permuted(tuple.size());
            do {
                for (std::size_t i = 0; i < tuple.size(); ++i)
                    permuted[i] = tuple[perm[i]];
                sum += grid.get(n, permuted);
                ++count;
            } while (std::next_permutation(perm.begin(), perm.end()));
            out.set(n, tuple, sum / static_cast<double>(count));
            int pos = n - 1;
            while (pos >= 0) {
                if (++tuple[static_cast<std::size_t>(pos)] < k) break;
                tuple[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            done = pos < 0;
        }
    }
    out.mark_symmetric();
    return out;
}

double grid_inner_product(const JumpModel& model, const CoefficientGrid& f,
                          const CoefficientGrid& g) {
    if (f.partition() != g.partition())
        throw Error("grid_inner_product: grids must share a partition");
    const Partition& partition = *f.partition();
    CoefficientGrid fs = f.symmetric() ? f : symmetrize(f);
    CoefficientGrid gs = g.symmetric() ? g : symmetrize(g);

    double total = fs.constant() * gs.constant();
    int common = std::min(fs.max_order(), gs.max_order());
    double factorial = 1.0;
    for (int n = 1; n <= common; ++n) {
        factorial *= n;
        double order_sum = 0.0;
        for_each_distinct_tuple(
            partition.size(), n, [&](std::span<const std::size_t> tuple) {
                double fv = fs.get(n, tuple);
                double gv = gs.get(n, tuple);
                if (fv == 0.0 || gv == 0.0) return;
                double weight = 1.0;
                for (std::size_t c : tuple) weight *= partition.m_mass(c);
                order_sum += fv * gv * weight;
            });
        total += factorial * order_sum;
    }
    (void)model;
    return total;
}

IsometryCheck isometry_check(const JumpModel& model,
                             const CoefficientGrid& grid,
                             std::int64_t n_samples, SeedSpec seed,
                             int workers, double sigmas) {
    IsometryCheck result;
    result.exact = grid_inner_product(model, grid, grid);
    result.mc = estimate_mean(
        n_samples, seed, workers, sigmas,
        [&](std::int64_t, Rng& rng) {
            JumpPath path = sample_path(model, rng, seed);
            double y = chaos_eval(model, path, grid);
            return y * y;
        });
    return result;
}

CoefficientGrid h_indicator_grid(const JumpModel& model, PartitionPtr cells) {
    CoefficientGrid grid(cells, 1);
    for (std::size_t i = 0; i < cells->size(); ++i) {
        const BoxSet& cell = cells->cell(i);
        double atom_x = 0.0;
        bool found = false;
        for (const Rect& r : cell.rects()) {
            for (const NuComponent& c : model.components()) {
                if (c.mass_in(r.space()) == 0.0) continue;
                if (!c.is_atom())
                    throw Error(
                        "h grid needs atom-only nu-support in every cell");
                if (found && c.atom_x() != atom_x)
                    throw Error(
                        "h grid cell spans two atoms; refine the partition");
                atom_x = c.atom_x();
                found = true;
            }
        }
        std::size_t idx[1] = {i};
        grid.set(1, idx, found ? 1.0 / atom_x : 0.0);
    }
    grid.mark_symmetric();
    return grid;
}

// ---------------------------------------------------------------------------
// Grid text records
// ---------------------------------------------------------------------------

void write_grid(std::ostream& os, const CoefficientGrid& grid, char delim) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", grid.constant());
    os << 0 << delim << buf << '\n';
    std::size_t k = grid.partition()->size();
    for (int n = 1; n <= grid.max_order(); ++n) {
        std::vector<std::size_t> tuple(static_cast<std::size_t>(n), 0);
        bool done = k == 0;
        while (!done) {
            double v = grid.get(n, tuple);
            if (v != 0.0) {
                os << n;
                for (std::size_t c : tuple) os << delim << c;
                std::snprintf(buf, sizeof buf, "%.17g", v);
                os << delim << buf << '\n';
            }
            int pos = n - 1;
            while (pos >= 0) {
                if (++tuple[static_cast<std::size_t>(pos)] < k) break;
                tuple[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            done = pos < 0;
        }
    }
}

CoefficientGrid read_grid(std::istream& is, PartitionPtr partition,
                          int max_order, char delim) {
    CoefficientGrid grid(std::move(partition), max_order);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), delim, ' ');
        std::istringstream fields(line);
        int order = 0;
        if (!(fields >> order))
            throw Error("grid record " + std::to_string(lineno) +
                        ": missing order");
        std::vector<std::size_t> tuple(
            order >= 0 ? static_cast<std::size_t>(order) : 0);
        for (auto& c : tuple)
            if (!(fields >> c))
                throw Error("grid record " + std::to_string(lineno) +
                            ": missing cell index");
        double value = 0.0;
        if (!(fields >> value))
            throw Error("grid record " + std::to_string(lineno) +
                        ": missing value");
        if (order == 0)
            grid.set_constant(value);
        else
            grid.set(order, tuple, value);
    }
    return grid;
}

// ---------------------------------------------------------------------------
// Refinement
// ---------------------------------------------------------------------------

PartitionPtr refine_time(const Partition& partition, const JumpModel& model,
                         int k) {
    if (k < 1) throw Error("refinement factor must be >= 1");
    std::vector<BoxSet> cells;
    cells.reserve(partition.size() * static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < partition.size(); ++i) {
        for (int slice = 0; slice < k; ++slice) {
            std::vector<Rect> rects;
            for (const Rect& r : partition.cell(i).rects()) {
                double step = (r.t2 - r.t1) / k;
                rects.push_back(Rect{r.t1 + slice * step,
                                     slice + 1 == k ? r.t2
                                                    : r.t1 + (slice + 1) * step,
                                     r.x1, r.x2});
            }
            cells.emplace_back(std::move(rects));
        }
    }
    return std::make_shared<Partition>(std::move(cells), model);
}

CoefficientGrid carry_to_refinement(const CoefficientGrid& grid,
                                    PartitionPtr refined,
                                    const JumpModel& model) {
    (void)model;
    std::size_t k_orig = grid.partition()->size();
    if (k_orig == 0 || refined->size() % k_orig != 0)
        throw Error("refined partition size must be a multiple of original");
    std::size_t factor = refined->size() / k_orig;
    CoefficientGrid out(refined, grid.max_order());
    out.set_constant(grid.constant());
    std::size_t k = refined->size();
    for (int n = 1; n <= grid.max_order(); ++n) {
        std::vector<std::size_t> tuple(static_cast<std::size_t>(n), 0);
        std::vector<std::size_t> parent(static_cast<std::size_t>(n));
        bool done = k == 0;
        while (!done) {
            bool distinct_parents = true;
            for (std::size_t i = 0; i < tuple.size(); ++i) {
                parent[i] = tuple[i] / factor;
                for (std::size_t j = 0; j < i && distinct_parents; ++j)
                    if (parent[j] == parent[i]) distinct_parents = false;
            }
            // the step function vanishes on original diagonal blocks, so
            // sub-tuples inside one original cell carry zero
            if (distinct_parents) out.set(n, tuple, grid.get(n, parent));
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

}  // namespace levylab
