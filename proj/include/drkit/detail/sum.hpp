#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace drkit::detail {

// Neumaier-compensated accumulator. The aggregate identities asserted by the
// test suites are checked at 1e-12 absolute, which naive summation of
// 0-100-scale scores does not reliably reach.
class Accumulator {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double sum(std::span<const double> xs) noexcept {
    Accumulator acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

inline double mean(std::span<const double> xs) noexcept {
    return xs.empty() ? 0.0 : sum(xs) / static_cast<double>(xs.size());
}

}  // namespace drkit::detail
