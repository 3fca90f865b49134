#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "gridwalk/kernel.hpp"
#include "gridwalk/stats.hpp"

namespace gridwalk {

namespace detail {

// SplitMix64 finalizer (Stafford mix13).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Stream seed for one path. Each path owns an independent generator derived
// from (seed, path), so trajectories do not depend on how paths are
// partitioned across workers.
inline std::uint64_t path_stream_seed(std::uint64_t seed, std::uint64_t path) {
    return mix64(seed + 0x9e3779b97f4a7c15ull * (path + 1));
}

// 53-bit uniform in [0,1). The raw engine output is mapped explicitly so the
// draw sequence is identical on every platform (distribution adapters are
// implementation-defined).
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Cumulative branch thresholds over a contiguous index window, precomputed
// once per kernel so the sampling loop is two comparisons and a lookup.
struct KernelTable {
    std::int64_t half_width = 0;
    std::vector<double> cum_left;         // lambda_L
    std::vector<double> cum_left_center;  // lambda_L + lambda_C

    static KernelTable build(const Grid& grid, const MomentSpec& spec,
                             std::int64_t half_width, double slack) {
        KernelTable t;
        t.half_width = half_width;
        const std::size_t states = static_cast<std::size_t>(2 * half_width + 1);
        t.cum_left.resize(states);
        t.cum_left_center.resize(states);
        for (std::int64_t i = -half_width; i <= half_width; ++i) {
            const ProbTriple p = transition_probs(grid, spec, i, slack);
            const std::size_t j = static_cast<std::size_t>(i + half_width);
            t.cum_left[j] = p.left;
            t.cum_left_center[j] = p.left + p.center;
        }
        return t;
    }
};

}  // namespace detail

/// Step-indexed kernel changes: segment j applies from start_step (inclusive)
/// until the next segment begins. Sorted, first start_step must be 0.
struct KernelSegment {
    std::int64_t start_step = 0;
    MomentSpec spec;
};

/// N trajectories of the chain over steps 0..num_steps, stored as grid
/// indices (exact integers; coordinates are recovered through the grid).
/// Every path starts at index 0 and moves by at most one index per step.
struct TrajectoryBatch {
    Grid grid;
    std::int64_t num_paths = 0;
    std::int64_t num_steps = 0;  // k_max
    std::uint64_t seed = 0;
    std::vector<std::int32_t> states;  // num_paths x (num_steps+1), row-major

    std::int32_t state(std::int64_t path, std::int64_t k) const {
        return states[static_cast<std::size_t>(path * (num_steps + 1) + k)];
    }

    double coordinate(std::int64_t path, std::int64_t k) const {
        return grid.point(state(path, k));
    }
};

/// Generates num_paths trajectories under a piecewise-constant kernel
/// schedule. Deterministic for fixed (seed, num_paths, k_max) regardless of
/// the worker count. Feasibility over the whole reachable window
/// [-k_max, k_max] is established for every segment before any sampling.
///
/// Branch ordering is fixed: a uniform draw u moves left when u < L, stays
/// when u < L + C, and moves right otherwise.
inline TrajectoryBatch simulate_piecewise(const Grid& grid,
                                          const std::vector<KernelSegment>& segments,
                                          std::int64_t k_max,
                                          std::int64_t num_paths,
                                          std::uint64_t seed, int threads = 1,
                                          double slack = 0.0) {
    if (segments.empty()) {
        throw std::invalid_argument("simulate_piecewise: no kernel segments");
    }
    if (segments.front().start_step != 0) {
        throw std::invalid_argument(
            "simulate_piecewise: first segment must start at step 0");
    }
    for (std::size_t s = 1; s < segments.size(); ++s) {
        if (segments[s].start_step <= segments[s - 1].start_step) {
            throw std::invalid_argument(
                "simulate_piecewise: segment start steps must be strictly increasing");
        }
    }
    if (k_max < 0 || k_max > std::numeric_limits<std::int32_t>::max() - 1) {
        throw std::invalid_argument("simulate_piecewise: k_max out of range");
    }
    if (num_paths < 1) {
        throw std::invalid_argument("simulate_piecewise: num_paths must be >= 1");
    }
    if (threads < 1) {
        throw std::invalid_argument("simulate_piecewise: threads must be >= 1");
    }

    // Any infeasibility in the reachable window aborts here, before sampling.
    std::vector<detail::KernelTable> tables;
    tables.reserve(segments.size());
    for (const auto& seg : segments) {
        tables.push_back(detail::KernelTable::build(grid, seg.spec, k_max, slack));
    }

    TrajectoryBatch batch;
    batch.grid = grid;
    batch.num_paths = num_paths;
    batch.num_steps = k_max;
    batch.seed = seed;
    batch.states.resize(static_cast<std::size_t>(num_paths) *
                        static_cast<std::size_t>(k_max + 1));

    const auto run_paths = [&](std::int64_t first, std::int64_t last) {
        const std::size_t row = static_cast<std::size_t>(k_max + 1);
        for (std::int64_t p = first; p < last; ++p) {
            std::mt19937_64 eng(detail::path_stream_seed(seed, static_cast<std::uint64_t>(p)));
            std::int32_t* out = batch.states.data() + static_cast<std::size_t>(p) * row;
            std::int64_t idx = 0;
            out[0] = 0;
            std::size_t seg = 0;
            const detail::KernelTable* table = &tables[seg];
            for (std::int64_t k = 0; k < k_max; ++k) {
                if (seg + 1 < tables.size() && k == segments[seg + 1].start_step) {
                    ++seg;
                    table = &tables[seg];
                }
                const double u = detail::uniform01(eng);
                const std::size_t j = static_cast<std::size_t>(idx + k_max);
                if (u < table->cum_left[j]) {
                    --idx;
                } else if (u >= table->cum_left_center[j]) {
                    ++idx;
                }
                out[k + 1] = static_cast<std::int32_t>(idx);
            }
        }
    };

    if (threads == 1) {
        run_paths(0, num_paths);
    } else {
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(threads));
        const std::int64_t chunk = (num_paths + threads - 1) / threads;
        for (int w = 0; w < threads; ++w) {
            const std::int64_t first = static_cast<std::int64_t>(w) * chunk;
            const std::int64_t last = std::min<std::int64_t>(first + chunk, num_paths);
            if (first >= last) break;
            workers.emplace_back(run_paths, first, last);
        }
        for (auto& t : workers) t.join();
    }
    return batch;
}

inline TrajectoryBatch simulate(const TransitionKernel& kernel,
                                std::int64_t k_max, std::int64_t num_paths,
                                std::uint64_t seed, int threads = 1) {
    return simulate_piecewise(kernel.grid(), {{0, kernel.spec()}}, k_max,
                              num_paths, seed, threads, kernel.slack());
}

/// Cross-section of the batch at step k, mapped to grid coordinates.
inline EmpiricalDistribution snapshot(const TrajectoryBatch& batch,
                                      std::int64_t k) {
    if (k < 0 || k > batch.num_steps) {
        throw std::out_of_range("snapshot: step outside the simulated range");
    }
    // Coordinates repeat heavily; cache them per index over the reachable
    // window instead of re-deriving per path.
    const std::int64_t w = batch.num_steps;
    std::vector<double> coord(static_cast<std::size_t>(2 * w + 1));
    for (std::int64_t i = -w; i <= w; ++i) {
        coord[static_cast<std::size_t>(i + w)] = batch.grid.point(i);
    }
    std::vector<double> samples(static_cast<std::size_t>(batch.num_paths));
    for (std::int64_t p = 0; p < batch.num_paths; ++p) {
        samples[static_cast<std::size_t>(p)] =
            coord[static_cast<std::size_t>(batch.state(p, k) + w)];
    }
    return EmpiricalDistribution(std::move(samples));
}

}  // namespace gridwalk
