#pragma once

#include <cmath>
#include <span>

namespace gridwalk {

// Neumaier-compensated accumulator. Sequential and deterministic; used
// wherever tolerances sit near 1e-11 on sums over 1e4+ terms.
class KahanSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double kahan_total(std::span<const double> values) {
    KahanSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

}  // namespace gridwalk
