// SPDX-License-Identifier: Apache-2.0
#include "levylab/simulate.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "levylab/errors.hpp"

namespace levylab {

JumpPath::JumpPath(std::vector<Jump> jumps, SeedSpec origin)
    : jumps_(std::move(jumps)), origin_(origin) {
    for (const Jump& j : jumps_)
        if (j.x == 0.0) throw Error("jump sizes must be nonzero");
    std::stable_sort(jumps_.begin(), jumps_.end(),
                     [](const Jump& a, const Jump& b) { return a.t < b.t; });
}

double sample_jump_size(const JumpModel& model, Rng& rng) {
    double u = rng.uniform01() * model.total_mass();
    double acc = 0.0;
    const auto& comps = model.components();
    for (std::size_t i = 0; i < comps.size(); ++i) {
        acc += comps[i].mass();
        if (u < acc || i + 1 == comps.size()) {
            const NuComponent& c = comps[i];
            if (c.is_atom()) return c.atom_x();
            return rng.uniform(c.lower(), c.upper());
        }
    }
    throw Error("unreachable: empty component list");
}

JumpPath sample_path(const JumpModel& model, Rng& rng, SeedSpec origin) {
    model.require_pure_jump("sample_path");
    double lambda = model.total_mass() * model.horizon();
    std::int64_t n = sample_poisson(rng, lambda);
    std::vector<Jump> jumps;
    jumps.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        double t = rng.uniform(0.0, model.horizon());
        double x = sample_jump_size(model, rng);
        jumps.push_back(Jump{t, x});
    }
    return JumpPath(std::move(jumps), origin);
}

JumpPath sample_path(const JumpModel& model, SeedSpec seed) {
    Rng rng(seed);
    return sample_path(model, rng, seed);
}

int count_in(const JumpPath& path, const BoxSet& a) {
    int n = 0;
    for (const Jump& j : path.jumps())
        if (a.contains(j.t, j.x)) ++n;
    return n;
}

JumpPath add_jump(const JumpPath& path, double t, double x) {
    if (x == 0.0) throw Error("add_jump: size must be nonzero");
    std::vector<Jump> jumps = path.jumps();
    auto pos = std::upper_bound(
        jumps.begin(), jumps.end(), t,
        [](double value, const Jump& j) { return value < j.t; });
    jumps.insert(pos, Jump{t, x});
    return JumpPath(std::move(jumps), path.origin());
}

double terminal_value(const JumpModel& model, const JumpPath& path) {
    double sum = model.drift() * model.horizon();
    for (const Jump& j : path.jumps()) sum += j.x;
    return sum;
}

void write_path_records(std::ostream& os, const JumpModel& model,
                        std::uint64_t master_seed, std::uint64_t streams,
                        char delim) {
    char line[96];
    for (std::uint64_t s = 0; s < streams; ++s) {
        JumpPath path = sample_path(model, SeedSpec{master_seed, s});
        for (const Jump& j : path.jumps()) {
            std::snprintf(line, sizeof line,
                          "%llu%c%.17g%c%.17g\n",
                          static_cast<unsigned long long>(s), delim, j.t,
                          delim, j.x);
            os << line;
        }
    }
}

}  // namespace levylab
