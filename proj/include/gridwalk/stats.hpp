#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gridwalk/summation.hpp"

namespace gridwalk {

/// Sorted sample set with a left-continuous quantile function.
class EmpiricalDistribution {
public:
    explicit EmpiricalDistribution(std::vector<double> samples)
        : samples_(std::move(samples)) {
        if (samples_.empty()) {
            throw std::invalid_argument("EmpiricalDistribution: no samples");
        }
        std::sort(samples_.begin(), samples_.end());
    }

    const std::vector<double>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

private:
    std::vector<double> samples_;
};

struct NormalLaw {
    double mean = 0.0;
    double variance = 0.0;
};

/// Left-continuous empirical inverse: the ceil(q*N)-th order statistic.
/// Alternative conventions shift Wasserstein values at O(1/N); this one is
/// fixed project-wide.
inline double empirical_quantile(const EmpiricalDistribution& dist, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("empirical_quantile: q must be in (0,1)");
    }
    const double n = static_cast<double>(dist.size());
    auto rank = static_cast<std::int64_t>(std::ceil(q * n));
    rank = std::clamp<std::int64_t>(rank, 1, static_cast<std::int64_t>(dist.size()));
    return dist.samples()[static_cast<std::size_t>(rank - 1)];
}

inline double standard_normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

inline double standard_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

inline double normal_cdf(const NormalLaw& law, double x) {
    if (law.variance < 0.0) {
        throw std::invalid_argument("normal_cdf: negative variance");
    }
    if (law.variance == 0.0) {
        return x < law.mean ? 0.0 : 1.0;
    }
    return standard_normal_cdf((x - law.mean) / std::sqrt(law.variance));
}

namespace detail {

// Acklam's rational approximation on (0, 0.5], refined by one Halley step
// against the erfc-based CDF. Restricting to the lower half keeps
// F(z) - q free of cancellation: both values stay at or below 0.5.
inline double standard_normal_quantile_lower(double q) {
    static constexpr double a[6] = {
        -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
        1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {
        -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
        6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[6] = {
        -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
        -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {
        7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
        3.754408661907416e+00};
    constexpr double q_low = 0.02425;

    double z;
    if (q < q_low) {
        const double r = std::sqrt(-2.0 * std::log(q));
        z = (((((c[0] * r + c[1]) * r + c[2]) * r + c[3]) * r + c[4]) * r + c[5]) /
            ((((d[0] * r + d[1]) * r + d[2]) * r + d[3]) * r + 1.0);
    } else {
        const double u = q - 0.5;
        const double r = u * u;
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * u /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }

    // One Halley step on F(z) - q = 0.
    const double err = standard_normal_cdf(z) - q;
    const double u = err * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * z * z);
    return z - u / (1.0 + 0.5 * z * u);
}

}  // namespace detail

/// Standard normal inverse CDF; absolute error well below 1e-9 across
/// (1e-12, 1-1e-12). The upper half reflects through symmetry, where 1-q is
/// exact for q >= 0.5.
inline double standard_normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("standard_normal_quantile: q must be in (0,1)");
    }
    if (q > 0.5) return -detail::standard_normal_quantile_lower(1.0 - q);
    return detail::standard_normal_quantile_lower(q);
}

inline double normal_quantile(const NormalLaw& law, double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("normal_quantile: q must be in (0,1)");
    }
    if (law.variance < 0.0) {
        throw std::invalid_argument("normal_quantile: negative variance");
    }
    if (law.variance == 0.0) return law.mean;
    return law.mean + std::sqrt(law.variance) * standard_normal_quantile(q);
}

/// Wasserstein-1 distance between an empirical sample set and a normal law,
/// as the quantile-difference integral over (0,1). Midpoint rule at
/// q_j = (j-0.5)/nodes; endpoints are never touched, so the quantile
/// singularities at 0 and 1 need no special casing.
inline double wasserstein1(const EmpiricalDistribution& dist,
                           const NormalLaw& law, int nodes = 4096) {
    if (nodes < 2) {
        throw std::invalid_argument("wasserstein1: nodes must be >= 2");
    }
    KahanSum acc;
    for (int j = 1; j <= nodes; ++j) {
        const double q = (static_cast<double>(j) - 0.5) / static_cast<double>(nodes);
        acc.add(std::abs(empirical_quantile(dist, q) - normal_quantile(law, q)));
    }
    return acc.value() / static_cast<double>(nodes);
}

/// Exact Wasserstein-1 between two equal-size empirical measures: the mean
/// absolute difference of sorted samples. Cross-check oracle for the
/// midpoint-rule integral.
inline double wasserstein1_empirical(const EmpiricalDistribution& a,
                                     const EmpiricalDistribution& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(
            "wasserstein1_empirical: sample counts differ");
    }
    KahanSum acc;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc.add(std::abs(a.samples()[i] - b.samples()[i]));
    }
    return acc.value() / static_cast<double>(a.size());
}

struct Histogram {
    std::vector<double> edges;
    std::vector<std::int64_t> counts;   // per bin
    std::vector<double> density;        // count / (N * bin_width)
    std::int64_t total = 0;             // N, including samples outside edges
};

/// Bins bin_j = [edges[j], edges[j+1]); a sample equal to an edge lands in
/// the bin to its right, except the last edge which is inclusive.
inline Histogram histogram(const EmpiricalDistribution& dist,
                           std::vector<double> edges) {
    if (edges.size() < 2) {
        throw std::invalid_argument("histogram: need at least two edges");
    }
    for (std::size_t j = 1; j < edges.size(); ++j) {
        if (!(edges[j - 1] < edges[j])) {
            throw std::invalid_argument("histogram: edges must be strictly increasing");
        }
    }
    Histogram h;
    h.edges = std::move(edges);
    const std::size_t bins = h.edges.size() - 1;
    h.counts.assign(bins, 0);
    h.total = static_cast<std::int64_t>(dist.size());
    for (double s : dist.samples()) {
        if (s < h.edges.front() || s > h.edges.back()) continue;
        std::size_t j;
        if (s == h.edges.back()) {
            j = bins - 1;
        } else {
            j = static_cast<std::size_t>(
                    std::upper_bound(h.edges.begin(), h.edges.end(), s) -
                    h.edges.begin()) - 1;
        }
        ++h.counts[j];
    }
    h.density.resize(bins);
    for (std::size_t j = 0; j < bins; ++j) {
        const double width = h.edges[j + 1] - h.edges[j];
        h.density[j] = static_cast<double>(h.counts[j]) /
                       (static_cast<double>(h.total) * width);
    }
    return h;
}

}  // namespace gridwalk
