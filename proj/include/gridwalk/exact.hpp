#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gridwalk/kernel.hpp"
#include "gridwalk/summation.hpp"

namespace gridwalk {

/// Probability distribution over the truncated state set x_{-n}..x_n.
struct GridDistribution {
    std::vector<double> support;  // coordinates, ascending
    std::vector<double> mass;     // nonnegative, sums to 1

    double total_mass() const {
        KahanSum acc;
        for (double m : mass) acc.add(m);
        return acc.value();
    }
};

/// mean = sum x*m, variance = sum x^2*m - mean^2, compensated throughout.
inline std::pair<double, double> mean_var(const GridDistribution& dist) {
    KahanSum first, second;
    for (std::size_t j = 0; j < dist.mass.size(); ++j) {
        first.add(dist.support[j] * dist.mass[j]);
        second.add(dist.support[j] * dist.support[j] * dist.mass[j]);
    }
    const double mean = first.value();
    return {mean, second.value() - mean * mean};
}

/// Finite restriction of the chain to indices [-n, n]. Interior rows carry
/// the moment-matched triple; the two outermost states are absorbing, so the
/// matrix row structure is
///
///   [ 1  0  0  ...              ]
///   [ L  C  R  ...              ]
///   [    ...  L  C  R           ]
///   [              ...  0  0  1 ]
///
/// Starting from the point mass at the center, no trajectory can touch the
/// boundary before step n, hence every distribution and moment is exact for
/// k <= n.
struct TruncatedChain {
    std::int64_t half_width = 0;    // n
    std::vector<double> coords;     // 2n+1 coordinates
    std::vector<ProbTriple> rows;   // 2n+1 rows; absorbing rows are (0,1,0)
    MomentSpec spec;
};

inline TruncatedChain build_truncated(const TransitionKernel& kernel,
                                      std::int64_t n) {
    if (n < 1) {
        throw std::invalid_argument("build_truncated: n must be >= 1");
    }
    TruncatedChain chain;
    chain.half_width = n;
    chain.spec = kernel.spec();
    const std::size_t states = static_cast<std::size_t>(2 * n + 1);
    chain.coords.resize(states);
    chain.rows.resize(states, ProbTriple{0.0, 1.0, 0.0});
    for (std::int64_t i = -n; i <= n; ++i) {
        chain.coords[static_cast<std::size_t>(i + n)] = kernel.grid().point(i);
    }
    for (std::int64_t i = -(n - 1); i <= n - 1; ++i) {
        chain.rows[static_cast<std::size_t>(i + n)] = kernel.probs(i);
    }
    return chain;
}

/// Sequential distribution-vector stepper exploiting the tridiagonal row
/// structure: one step costs three multiplies per state instead of a dense
/// matrix product.
class Propagator {
public:
    explicit Propagator(const TruncatedChain& chain)
        : chain_(&chain),
          cur_(chain.coords.size(), 0.0),
          next_(chain.coords.size(), 0.0) {
        cur_[static_cast<std::size_t>(chain.half_width)] = 1.0;  // point mass at x_0
    }

    void step() {
        const auto& rows = chain_->rows;
        const std::size_t m = cur_.size();
        for (std::size_t j = 0; j < m; ++j) {
            double v = cur_[j] * rows[j].center;
            if (j > 0) v += cur_[j - 1] * rows[j - 1].right;
            if (j + 1 < m) v += cur_[j + 1] * rows[j + 1].left;
            next_[j] = v;
        }
        cur_.swap(next_);
        ++steps_;
    }

    std::int64_t steps() const { return steps_; }

    double boundary_mass() const { return cur_.front() + cur_.back(); }

    GridDistribution distribution() const {
        return GridDistribution{chain_->coords, cur_};
    }

private:
    const TruncatedChain* chain_;
    std::vector<double> cur_;
    std::vector<double> next_;
    std::int64_t steps_ = 0;
};

/// Distribution after k steps from the centered point mass.
inline GridDistribution propagate(const TruncatedChain& chain, std::int64_t k) {
    if (k < 0) {
        throw std::invalid_argument("propagate: k must be >= 0");
    }
    Propagator p(chain);
    for (std::int64_t s = 0; s < k; ++s) p.step();
    return p.distribution();
}

// Tolerances for the exact-propagation consistency checks below.
inline constexpr double kMeanStepResidualTol = 1e-11;
inline constexpr double kSecondMomentResidualTol = 1e-10;
inline constexpr double kMeanClosedFormTol = 1e-10;
inline constexpr double kSecondMomentClosedFormTol = 1e-9;

struct RecurrenceReport {
    std::int64_t k_max = 0;
    // max over k of |mean(k) - mean(k-1) - M|
    double max_mean_step_residual = 0.0;
    // max over k of |m2(k) - m2(k-1) - (M^2 + V + 2 M^2 (k-1))|
    double max_second_moment_residual = 0.0;
    // max over k of |mean(k) - M*k|
    double max_mean_closed_form_error = 0.0;
    // max over k of |m2(k) - (M^2 k^2 + V k)|
    double max_second_moment_closed_form_error = 0.0;
    bool ok = false;
};

/// Propagates k_max steps and checks, per step, the one-step recurrences of
/// the first two raw moments along with their closed forms. Requires
/// k_max <= n: once mass can reach the absorbing boundary the truncation
/// biases the moments and the recurrences no longer apply.
inline RecurrenceReport check_recurrences(const TruncatedChain& chain,
                                          std::int64_t k_max) {
    if (k_max > chain.half_width) {
        throw std::domain_error(
            "check_recurrences: k_max must not exceed the half-width n");
    }
    if (k_max < 0) {
        throw std::invalid_argument("check_recurrences: k_max must be >= 0");
    }
    const double m_step = chain.spec.mean_step;
    const double v_step = chain.spec.var_step;

    RecurrenceReport report;
    report.k_max = k_max;

    Propagator p(chain);
    double prev_mean = 0.0;
    double prev_m2 = 0.0;
    for (std::int64_t k = 1; k <= k_max; ++k) {
        p.step();
        const GridDistribution dist = p.distribution();
        KahanSum first, second;
        for (std::size_t j = 0; j < dist.mass.size(); ++j) {
            first.add(dist.support[j] * dist.mass[j]);
            second.add(dist.support[j] * dist.support[j] * dist.mass[j]);
        }
        const double mean = first.value();
        const double m2 = second.value();
        const double kd = static_cast<double>(k);

        const double mean_resid = std::abs(mean - prev_mean - m_step);
        const double m2_resid = std::abs(
            m2 - prev_m2 -
            (m_step * m_step + v_step + 2.0 * m_step * m_step * (kd - 1.0)));
        const double mean_cf = std::abs(mean - m_step * kd);
        const double m2_cf =
            std::abs(m2 - (m_step * m_step * kd * kd + v_step * kd));

        report.max_mean_step_residual =
            std::max(report.max_mean_step_residual, mean_resid);
        report.max_second_moment_residual =
            std::max(report.max_second_moment_residual, m2_resid);
        report.max_mean_closed_form_error =
            std::max(report.max_mean_closed_form_error, mean_cf);
        report.max_second_moment_closed_form_error =
            std::max(report.max_second_moment_closed_form_error, m2_cf);

        prev_mean = mean;
        prev_m2 = m2;
    }

    report.ok = report.max_mean_step_residual <= kMeanStepResidualTol &&
                report.max_second_moment_residual <= kSecondMomentResidualTol &&
                report.max_mean_closed_form_error <= kMeanClosedFormTol &&
                report.max_second_moment_closed_form_error <=
                    kSecondMomentClosedFormTol;
    return report;
}

}  // namespace gridwalk
