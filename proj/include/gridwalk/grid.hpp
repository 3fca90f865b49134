#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gridwalk {

/// Doubly-infinite, strictly increasing spatial grid i -> x_i with x_0 = 0.
///
/// Points are evaluated lazily from the index, never stored as a full array,
/// so trajectories may wander arbitrarily far in either direction. Three
/// families are supported:
///   - uniform(h):                     x_i = h*i
///   - two_sided(slope_neg, slope_pos): x_i = slope_pos*i for i >= 0,
///                                      x_i = slope_neg*i for i < 0
///   - explicit_table(points, hl, hr): finite strictly increasing table that
///     must contain 0 (the anchor x_0); indices beyond the table extend
///     uniformly with gap hl on the left and hr on the right.
///
/// gaps(i) returns the adjacent spacings (x_i - x_{i-1}, x_{i+1} - x_i)
/// computed analytically per region, so that uniform regions report their
/// nominal gap exactly instead of a rounded coordinate difference.
class Grid {
public:
    enum class Kind { uniform, two_sided, explicit_table };

    struct Gaps {
        double left;
        double right;
    };

    static Grid uniform(double h) {
        if (!(h > 0.0)) {
            throw std::invalid_argument("Grid::uniform: h must be > 0");
        }
        Grid g;
        g.kind_ = Kind::uniform;
        g.slope_neg_ = h;
        g.slope_pos_ = h;
        return g;
    }

    static Grid two_sided(double slope_neg, double slope_pos) {
        if (!(slope_neg > 0.0) || !(slope_pos > 0.0)) {
            throw std::invalid_argument("Grid::two_sided: slopes must be > 0");
        }
        Grid g;
        g.kind_ = Kind::two_sided;
        g.slope_neg_ = slope_neg;
        g.slope_pos_ = slope_pos;
        return g;
    }

    static Grid explicit_table(std::vector<double> points, double extend_left,
                               double extend_right) {
        if (points.empty()) {
            throw std::invalid_argument("Grid::explicit_table: empty point table");
        }
        if (!(extend_left > 0.0) || !(extend_right > 0.0)) {
            throw std::invalid_argument(
                "Grid::explicit_table: extension gaps must be > 0");
        }
        for (std::size_t j = 1; j < points.size(); ++j) {
            if (!(points[j - 1] < points[j])) {
                throw std::invalid_argument(
                    "Grid::explicit_table: points must be strictly increasing");
            }
        }
        const auto zero = std::find(points.begin(), points.end(), 0.0);
        if (zero == points.end()) {
            throw std::invalid_argument(
                "Grid::explicit_table: table must contain the anchor point 0");
        }
        Grid g;
        g.kind_ = Kind::explicit_table;
        g.table_ = std::move(points);
        g.zero_pos_ = static_cast<std::int64_t>(zero - g.table_.begin());
        g.slope_neg_ = extend_left;
        g.slope_pos_ = extend_right;
        return g;
    }

    /// Default-constructs the unit uniform grid.
    Grid() = default;

    Kind kind() const { return kind_; }

    /// Coordinate of grid index i. Pure; repeated queries are bit-identical.
    double point(std::int64_t i) const {
        switch (kind_) {
            case Kind::uniform:
            case Kind::two_sided:
                return (i >= 0 ? slope_pos_ : slope_neg_) * static_cast<double>(i);
            case Kind::explicit_table:
            default: {
                const std::int64_t j = zero_pos_ + i;
                const std::int64_t m = static_cast<std::int64_t>(table_.size());
                if (j < 0) {
                    return table_.front() + slope_neg_ * static_cast<double>(j);
                }
                if (j >= m) {
                    return table_.back() +
                           slope_pos_ * static_cast<double>(j - (m - 1));
                }
                return table_[static_cast<std::size_t>(j)];
            }
        }
    }

    /// (x_i - x_{i-1}, x_{i+1} - x_i); both strictly positive.
    Gaps gaps(std::int64_t i) const {
        switch (kind_) {
            case Kind::uniform:
                return {slope_pos_, slope_pos_};
            case Kind::two_sided:
                if (i >= 1) return {slope_pos_, slope_pos_};
                if (i == 0) return {slope_neg_, slope_pos_};
                return {slope_neg_, slope_neg_};
            case Kind::explicit_table:
            default:
                return {gap_between(zero_pos_ + i - 1), gap_between(zero_pos_ + i)};
        }
    }

    // Uniform / two-sided parameter accessors (0 for explicit tables).
    double slope_neg() const { return slope_neg_; }
    double slope_pos() const { return slope_pos_; }
    const std::vector<double>& table() const { return table_; }

private:
    // Gap between table positions j and j+1 (position zero_pos_ is x_0).
    double gap_between(std::int64_t j) const {
        const std::int64_t m = static_cast<std::int64_t>(table_.size());
        if (j < 0) return slope_neg_;
        if (j >= m - 1) return slope_pos_;
        return table_[static_cast<std::size_t>(j + 1)] -
               table_[static_cast<std::size_t>(j)];
    }

    Kind kind_ = Kind::uniform;
    double slope_neg_ = 1.0;  // uniform h, left slope, or left extension gap
    double slope_pos_ = 1.0;  // uniform h, right slope, or right extension gap
    std::vector<double> table_;
    std::int64_t zero_pos_ = 0;
};

inline Grid make_uniform(double h) { return Grid::uniform(h); }

inline Grid make_two_sided(double slope_neg, double slope_pos) {
    return Grid::two_sided(slope_neg, slope_pos);
}

inline Grid make_explicit(std::vector<double> points, double extend_left,
                          double extend_right) {
    return Grid::explicit_table(std::move(points), extend_left, extend_right);
}

}  // namespace gridwalk
