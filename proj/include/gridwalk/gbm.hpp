#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gridwalk/kernel.hpp"
#include "gridwalk/simulate.hpp"
#include "gridwalk/stats.hpp"

namespace gridwalk {

/// Geometric Brownian motion ds = mu*s*dt + sigma*s*dw observed at physical
/// times t = k*tau. The chain approximates the log-return ln(s_t/s0), which
/// is normal with mean eta*t and variance sigma2*t where eta = mu - sigma2/2.
struct GbmParams {
    double mu = 0.0;
    double sigma2 = 1.0;  // squared volatility
    double s0 = 1.0;
    double tau = 1.0;

    double eta() const { return mu - 0.5 * sigma2; }
};

inline void validate(const GbmParams& params) {
    if (!(params.sigma2 > 0.0)) {
        throw std::invalid_argument("GbmParams: sigma2 must be > 0");
    }
    if (!(params.s0 > 0.0)) {
        throw std::invalid_argument("GbmParams: s0 must be > 0");
    }
    if (!(params.tau > 0.0)) {
        throw std::invalid_argument("GbmParams: tau must be > 0");
    }
}

inline MomentSpec gbm_spec(const GbmParams& params) {
    validate(params);
    return MomentSpec{params.eta() * params.tau, params.sigma2 * params.tau};
}

inline ProbTriple gbm_kernel_probs(const Grid& grid, const GbmParams& params,
                                   std::int64_t i, double slack = 0.0) {
    return transition_probs(grid, gbm_spec(params), i, slack);
}

/// Exact law of the log-return at step k: N(eta*k*tau, sigma2*k*tau).
inline NormalLaw log_return_law(const GbmParams& params, std::int64_t k) {
    validate(params);
    if (k < 0) {
        throw std::invalid_argument("log_return_law: k must be >= 0");
    }
    const double t = static_cast<double>(k) * params.tau;
    return NormalLaw{params.eta() * t, params.sigma2 * t};
}

inline double expected_price(const GbmParams& params, std::int64_t k) {
    validate(params);
    return params.s0 * std::exp(params.mu * static_cast<double>(k) * params.tau);
}

/// Drift/volatility regimes switching at fixed steps; s0 and tau are shared
/// across segments (changing tau mid-run would change the feasibility
/// regime of the grid).
class CoefficientSchedule {
public:
    struct Segment {
        std::int64_t start_step = 0;
        GbmParams params;
    };

    explicit CoefficientSchedule(std::vector<Segment> segments)
        : segments_(std::move(segments)) {
        if (segments_.empty()) {
            throw std::invalid_argument("CoefficientSchedule: no segments");
        }
        if (segments_.front().start_step != 0) {
            throw std::invalid_argument(
                "CoefficientSchedule: first segment must start at step 0");
        }
        for (const Segment& seg : segments_) validate(seg.params);
        for (std::size_t j = 1; j < segments_.size(); ++j) {
            if (segments_[j].start_step <= segments_[j - 1].start_step) {
                throw std::invalid_argument(
                    "CoefficientSchedule: start steps must be strictly increasing");
            }
            if (segments_[j].params.s0 != segments_.front().params.s0 ||
                segments_[j].params.tau != segments_.front().params.tau) {
                throw std::invalid_argument(
                    "CoefficientSchedule: s0 and tau must be shared across segments");
            }
        }
    }

    const std::vector<Segment>& segments() const { return segments_; }
    double s0() const { return segments_.front().params.s0; }
    double tau() const { return segments_.front().params.tau; }

    /// Steps spent in each segment when the run ends at step k.
    std::vector<std::int64_t> steps_per_segment(std::int64_t k) const {
        std::vector<std::int64_t> counts(segments_.size(), 0);
        for (std::size_t j = 0; j < segments_.size(); ++j) {
            const std::int64_t begin = segments_[j].start_step;
            const std::int64_t end =
                (j + 1 < segments_.size()) ? segments_[j + 1].start_step : k;
            counts[j] = std::max<std::int64_t>(0, std::min(end, k) - begin);
        }
        return counts;
    }

private:
    std::vector<Segment> segments_;
};

/// Exact log-return moments of the schedule at step k: sums of the per-step
/// mean and variance increments over the steps each segment was active.
inline std::pair<double, double> schedule_log_return_moments(
    const CoefficientSchedule& schedule, std::int64_t k) {
    const auto counts = schedule.steps_per_segment(k);
    double mean = 0.0;
    double variance = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        const MomentSpec spec = gbm_spec(schedule.segments()[j].params);
        mean += spec.mean_step * static_cast<double>(counts[j]);
        variance += spec.var_step * static_cast<double>(counts[j]);
    }
    return {mean, variance};
}

inline double expected_price(const CoefficientSchedule& schedule,
                             std::int64_t k) {
    const auto counts = schedule.steps_per_segment(k);
    double exponent = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j) {
        exponent += schedule.segments()[j].params.mu * schedule.tau() *
                    static_cast<double>(counts[j]);
    }
    return schedule.s0() * std::exp(exponent);
}

/// Runs the common sampling engine under the schedule's piecewise kernels.
/// A single-segment schedule is bit-identical to simulate() with the same
/// seed; splitting a homogeneous run into several identical segments changes
/// nothing.
inline TrajectoryBatch simulate_schedule(const Grid& grid,
                                         const CoefficientSchedule& schedule,
                                         std::int64_t k_max,
                                         std::int64_t num_paths,
                                         std::uint64_t seed, int threads = 1,
                                         double slack = 0.0) {
    std::vector<KernelSegment> segments;
    segments.reserve(schedule.segments().size());
    for (const auto& seg : schedule.segments()) {
        segments.push_back({seg.start_step, gbm_spec(seg.params)});
    }
    return simulate_piecewise(grid, segments, k_max, num_paths, seed, threads,
                              slack);
}

/// Price view of a trajectory batch: s(k) = s0 * exp(r(k)).
///
/// sample_prices holds full trajectories for the first
/// min(sample_count, num_paths) paths only; the per-step mean is always
/// taken over every path. Exponentials are looked up per grid index, not
/// recomputed per sample.
///
/// The chain matches the first two log-return moments exactly, so the mean
/// price tracks expected_price only approximately (the exponential mixes in
/// higher moments); expect a sub-percent gap at the reference parameters,
/// not machine precision.
struct PricePaths {
    std::int64_t num_steps = 0;
    std::int64_t sample_count = 0;
    std::vector<double> sample_prices;   // sample_count x (num_steps+1)
    std::vector<double> mean_price;      // per step, all paths
    std::vector<double> expected_price;  // s0 * exp(mu * k * tau)

    double sample(std::int64_t path, std::int64_t k) const {
        return sample_prices[static_cast<std::size_t>(path * (num_steps + 1) + k)];
    }
};

inline PricePaths price_paths(const TrajectoryBatch& batch,
                              const GbmParams& params,
                              std::int64_t sample_count = 20) {
    validate(params);
    const std::int64_t w = batch.num_steps;
    std::vector<double> price_by_index(static_cast<std::size_t>(2 * w + 1));
    for (std::int64_t i = -w; i <= w; ++i) {
        price_by_index[static_cast<std::size_t>(i + w)] =
            params.s0 * std::exp(batch.grid.point(i));
    }

    PricePaths result;
    result.num_steps = w;
    result.sample_count = std::min(sample_count, batch.num_paths);
    result.sample_prices.resize(static_cast<std::size_t>(result.sample_count) *
                                static_cast<std::size_t>(w + 1));
    result.mean_price.assign(static_cast<std::size_t>(w + 1), 0.0);
    result.expected_price.resize(static_cast<std::size_t>(w + 1));

    for (std::int64_t p = 0; p < batch.num_paths; ++p) {
        const bool keep = p < result.sample_count;
        for (std::int64_t k = 0; k <= w; ++k) {
            const double price =
                price_by_index[static_cast<std::size_t>(batch.state(p, k) + w)];
            result.mean_price[static_cast<std::size_t>(k)] += price;
            if (keep) {
                result.sample_prices[static_cast<std::size_t>(p * (w + 1) + k)] = price;
            }
        }
    }
    for (double& m : result.mean_price) {
        m /= static_cast<double>(batch.num_paths);
    }
    for (std::int64_t k = 0; k <= w; ++k) {
        result.expected_price[static_cast<std::size_t>(k)] = expected_price(params, k);
    }
    return result;
}

}  // namespace gridwalk
