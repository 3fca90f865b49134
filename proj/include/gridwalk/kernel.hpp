#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "gridwalk/grid.hpp"

namespace gridwalk {

/// Prescribed per-step moments of the chain increment: after k steps the
/// chain's mean is mean_step*k and its variance is var_step*k, both in grid
/// coordinate units.
struct MomentSpec {
    double mean_step = 0.0;  // M
    double var_step = 0.0;   // V
};

struct ProbTriple {
    double left = 0.0;
    double center = 1.0;
    double right = 0.0;

    double sum() const { return left + center + right; }
};

/// One failed moment-matching inequality at a grid index. `inequality` is
/// 1, 2 or 3:
///   1:  M*(x_{i+1}-x_i)            <= M^2 + V
///   2: -M*(x_i-x_{i-1})            <= M^2 + V
///   3:  M^2 + V + M*(2x_i-x_{i+1}-x_{i-1}) <= (x_{i+1}-x_i)*(x_i-x_{i-1})
struct FeasibilityViolation {
    std::int64_t index = 0;
    int inequality = 0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct FeasibilityReport {
    bool feasible = true;
    std::optional<FeasibilityViolation> first_violation;
};

class infeasibility_error : public std::runtime_error {
public:
    infeasibility_error(const FeasibilityViolation& v, const ProbTriple& t)
        : std::runtime_error(describe(v)), violation_(v), probs_(t) {}

    const FeasibilityViolation& violation() const { return violation_; }
    const ProbTriple& probs() const { return probs_; }

private:
    static std::string describe(const FeasibilityViolation& v) {
        std::ostringstream os;
        os << "moment-matching inequality " << v.inequality
           << " violated at index " << v.index << ": " << v.lhs << " > " << v.rhs;
        return os.str();
    }

    FeasibilityViolation violation_;
    ProbTriple probs_;
};

namespace detail {

// Fixed expression ordering shared by every probability path: gaps first,
// then span, then the three numerators. Keeps the uniform shortcut and the
// general evaluation bit-comparable.
inline ProbTriple probs_from_gaps(double left_gap, double right_gap,
                                  const MomentSpec& spec) {
    const double span = left_gap + right_gap;
    const double m2v = spec.mean_step * spec.mean_step + spec.var_step;
    const double num_left = m2v - spec.mean_step * right_gap;
    const double num_right = m2v + spec.mean_step * left_gap;
    const double num_center = m2v + spec.mean_step * (left_gap - right_gap);
    ProbTriple t;
    t.left = num_left / (span * left_gap);
    t.right = num_right / (span * right_gap);
    t.center = 1.0 - num_center / (right_gap * left_gap);
    return t;
}

// First violated inequality for the given gaps, if any. Comparisons are
// lhs <= rhs + slack.
inline std::optional<FeasibilityViolation> violation_from_gaps(
    double left_gap, double right_gap, const MomentSpec& spec,
    std::int64_t index, double slack) {
    const double m2v = spec.mean_step * spec.mean_step + spec.var_step;
    const double lhs1 = spec.mean_step * right_gap;
    if (!(lhs1 <= m2v + slack)) return FeasibilityViolation{index, 1, lhs1, m2v};
    const double lhs2 = -spec.mean_step * left_gap;
    if (!(lhs2 <= m2v + slack)) return FeasibilityViolation{index, 2, lhs2, m2v};
    const double lhs3 = m2v + spec.mean_step * (left_gap - right_gap);
    const double rhs3 = right_gap * left_gap;
    if (!(lhs3 <= rhs3 + slack)) return FeasibilityViolation{index, 3, lhs3, rhs3};
    return std::nullopt;
}

inline ProbTriple checked_probs_from_gaps(double left_gap, double right_gap,
                                          const MomentSpec& spec,
                                          std::int64_t index, double slack) {
    const ProbTriple t = probs_from_gaps(left_gap, right_gap, spec);
    if (auto v = violation_from_gaps(left_gap, right_gap, spec, index, slack)) {
        throw infeasibility_error(*v, t);
    }
    // The center weight is evaluated from its own closed form; the
    // complement identity must agree to rounding noise.
    if (std::abs(t.center - (1.0 - t.left - t.right)) > 1e-12) {
        throw std::logic_error(
            "transition probabilities lost the complement identity");
    }
    return t;
}

}  // namespace detail

inline std::optional<FeasibilityViolation> feasibility_violation_at(
    const Grid& grid, const MomentSpec& spec, std::int64_t i,
    double slack = 0.0) {
    const Grid::Gaps g = grid.gaps(i);
    return detail::violation_from_gaps(g.left, g.right, spec, i, slack);
}

/// Scans indices lo..hi (inclusive, ascending) and reports the first index
/// where one of the three inequalities fails. Infeasibility is a result, not
/// an error.
///
/// The scan window is necessarily finite while the grid is not. For the
/// stock grid families a window is conclusive whenever it covers every
/// distinct (left_gap, right_gap) pair:
///   - uniform:   any index, the pair is always (h, h);
///   - two_sided: any window containing {-1, 0, 1} covers the three pairs
///                (sn, sn), (sn, sp), (sp, sp);
///   - explicit:  the window must cover the whole table plus one index on
///                each side to reach both extension regions.
inline FeasibilityReport check_feasibility(const Grid& grid,
                                           const MomentSpec& spec,
                                           std::int64_t lo, std::int64_t hi,
                                           double slack = 0.0) {
    if (lo > hi) {
        throw std::invalid_argument("check_feasibility: empty index range");
    }
    for (std::int64_t i = lo; i <= hi; ++i) {
        if (auto v = feasibility_violation_at(grid, spec, i, slack)) {
            return FeasibilityReport{false, v};
        }
    }
    return FeasibilityReport{true, std::nullopt};
}

/// Moment-matched trinomial probabilities (move-left, stay, move-right) at
/// grid index i. Throws infeasibility_error, carrying the computed triple,
/// when the inequalities fail at i: outside them the triple is not a
/// probability distribution and clamping would silently break the moments.
inline ProbTriple transition_probs(const Grid& grid, const MomentSpec& spec,
                                   std::int64_t i, double slack = 0.0) {
    const Grid::Gaps g = grid.gaps(i);
    return detail::checked_probs_from_gaps(g.left, g.right, spec, i, slack);
}

/// Uniform-grid shortcut: the triple is index-independent,
///   left  = (M^2+V - h*M) / (2h^2)
///   right = (M^2+V + h*M) / (2h^2)
///   center = 1 - (M^2+V)/h^2.
/// Agrees bit-for-bit with transition_probs on Grid::uniform(h).
inline ProbTriple uniform_transition_probs(double h, const MomentSpec& spec,
                                           double slack = 0.0) {
    if (!(h > 0.0)) {
        throw std::invalid_argument("uniform_transition_probs: h must be > 0");
    }
    return detail::checked_probs_from_gaps(h, h, spec, 0, slack);
}

/// Immutable (grid, moments) pair exposing per-index probabilities. probs(i)
/// is pure; instances are safe to share across threads.
class TransitionKernel {
public:
    TransitionKernel(Grid grid, MomentSpec spec, double slack = 0.0)
        : grid_(std::move(grid)), spec_(spec), slack_(slack) {}

    ProbTriple probs(std::int64_t i) const {
        return transition_probs(grid_, spec_, i, slack_);
    }

    const Grid& grid() const { return grid_; }
    const MomentSpec& spec() const { return spec_; }
    double slack() const { return slack_; }

private:
    Grid grid_;
    MomentSpec spec_;
    double slack_;
};

}  // namespace gridwalk
