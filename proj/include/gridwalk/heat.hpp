#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "gridwalk/exact.hpp"
#include "gridwalk/kernel.hpp"
#include "gridwalk/stats.hpp"

namespace gridwalk {

/// Free-space heat diffusion u_t = alpha * u_xx observed at physical times
/// t = k*tau. The matching chain is driftless with per-step variance
/// 2*alpha*tau; its distribution after k steps tracks the Gaussian profile
/// with variance 2*alpha*k*tau.
struct HeatParams {
    double alpha = 1.0;  // diffusivity, length^2 / time
    double tau = 1.0;    // physical time per step
    std::vector<double> points_of_interest;
};

inline void validate(const HeatParams& params) {
    if (!(params.alpha > 0.0)) {
        throw std::invalid_argument("HeatParams: alpha must be > 0");
    }
    if (!(params.tau > 0.0)) {
        throw std::invalid_argument("HeatParams: tau must be > 0");
    }
    for (double p : params.points_of_interest) {
        if (!std::isfinite(p)) {
            throw std::invalid_argument("HeatParams: points must be finite");
        }
    }
}

inline MomentSpec heat_spec(const HeatParams& params) {
    validate(params);
    return MomentSpec{0.0, 2.0 * params.alpha * params.tau};
}

/// With zero drift the three inequalities collapse to the single condition
/// 2*alpha*tau <= (x_{i+1}-x_i)(x_i-x_{i-1}); any violation reported here is
/// inequality 3.
inline FeasibilityReport heat_feasibility(const Grid& grid,
                                          const HeatParams& params,
                                          std::int64_t lo, std::int64_t hi,
                                          double slack = 0.0) {
    return check_feasibility(grid, heat_spec(params), lo, hi, slack);
}

inline ProbTriple heat_kernel_probs(const Grid& grid, const HeatParams& params,
                                    std::int64_t i, double slack = 0.0) {
    return transition_probs(grid, heat_spec(params), i, slack);
}

/// Builds an explicit grid containing every point of interest plus the
/// anchor 0, with oversized gaps filled by equally spaced interior points so
/// no adjacent gap exceeds base_gap. Beyond the table the grid extends
/// uniformly with gap base_gap. Duplicates collapse; an empty list yields a
/// plain uniform grid.
inline Grid embed_points(std::vector<double> points, double base_gap) {
    if (!(base_gap > 0.0)) {
        throw std::invalid_argument("embed_points: base_gap must be > 0");
    }
    for (double p : points) {
        if (!std::isfinite(p)) {
            throw std::invalid_argument("embed_points: points must be finite");
        }
    }
    points.push_back(0.0);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    if (points.size() == 1) {
        return Grid::uniform(base_gap);
    }
    std::vector<double> table;
    table.push_back(points.front());
    for (std::size_t j = 1; j < points.size(); ++j) {
        const double a = points[j - 1];
        const double b = points[j];
        const double gap = b - a;
        if (gap > base_gap) {
            const auto pieces = static_cast<std::int64_t>(std::ceil(gap / base_gap));
            for (std::int64_t s = 1; s < pieces; ++s) {
                table.push_back(a + gap * static_cast<double>(s) /
                                        static_cast<double>(pieces));
            }
        }
        table.push_back(b);
    }
    return Grid::explicit_table(std::move(table), base_gap, base_gap);
}

struct ProfileRow {
    std::int64_t index = 0;
    double x = 0.0;
    double mass = 0.0;              // chain probability at x
    double density_estimate = 0.0;  // mass / half-span of neighboring gaps
    double analytic_density = 0.0;  // Gaussian pdf at (k*tau, x)
    double analytic_cell_mass = 0.0;
    bool point_of_interest = false;
};

struct TemperatureProfile {
    std::int64_t step = 0;
    double time = 0.0;  // step * tau
    std::vector<ProfileRow> rows;
};

/// Exact chain profile at step k on the truncated state set [-n, n],
/// side by side with the analytic Gaussian solution. The chain produces
/// cell masses; the analytic law gives both a density and, through the CDF
/// at cell midpoints, comparable cell masses. At k = 0 the analytic columns
/// are NaN (point-mass limit, nothing to compare against).
inline TemperatureProfile temperature_profile(const Grid& grid,
                                              const HeatParams& params,
                                              std::int64_t n, std::int64_t k,
                                              double slack = 0.0) {
    if (k > n) {
        throw std::domain_error(
            "temperature_profile: k must not exceed n (truncation would bias the profile)");
    }
    const TransitionKernel kernel(grid, heat_spec(params), slack);
    const TruncatedChain chain = build_truncated(kernel, n);
    const GridDistribution dist = propagate(chain, k);

    const double var = 2.0 * params.alpha * static_cast<double>(k) * params.tau;
    const NormalLaw law{0.0, var};
    const double nan = std::numeric_limits<double>::quiet_NaN();

    TemperatureProfile profile;
    profile.step = k;
    profile.time = static_cast<double>(k) * params.tau;
    profile.rows.resize(dist.support.size());
    for (std::int64_t i = -n; i <= n; ++i) {
        const std::size_t j = static_cast<std::size_t>(i + n);
        ProfileRow& row = profile.rows[j];
        row.index = i;
        row.x = dist.support[j];
        row.mass = dist.mass[j];
        const Grid::Gaps g = grid.gaps(i);
        row.density_estimate = row.mass / (0.5 * (g.left + g.right));
        if (k == 0) {
            row.analytic_density = nan;
            row.analytic_cell_mass = nan;
        } else {
            row.analytic_density =
                std::exp(-row.x * row.x / (2.0 * var)) /
                std::sqrt(2.0 * std::numbers::pi * var);
            const double lo_mid = row.x - 0.5 * g.left;
            const double hi_mid = row.x + 0.5 * g.right;
            row.analytic_cell_mass = normal_cdf(law, hi_mid) - normal_cdf(law, lo_mid);
        }
        row.point_of_interest =
            std::find(params.points_of_interest.begin(),
                      params.points_of_interest.end(),
                      row.x) != params.points_of_interest.end();
    }
    return profile;
}

/// Total-variation distance between the chain cell masses and the analytic
/// cell masses, 0.5 * sum |p_i - q_i|. NaN at k = 0.
inline double total_variation(const TemperatureProfile& profile) {
    KahanSum acc;
    for (const ProfileRow& row : profile.rows) {
        acc.add(std::abs(row.mass - row.analytic_cell_mass));
    }
    return 0.5 * acc.value();
}

}  // namespace gridwalk
