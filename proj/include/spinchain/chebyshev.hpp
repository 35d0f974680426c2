// chebyshev.hpp — Second-kind Chebyshev ladder used by the determinant recursion

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace spinchain {

// Evaluates S_m(x) = sin((m+1) psi) / sin(psi) with x = 2 cos(psi), for a fixed
// argument and a range of orders. The three-term recurrence
//   S_m = x S_{m-1} - S_{m-2},  S_0 = 1,  S_{-1} = 0
// is the definition here; it is total and real for every real x, including
// |x| >= 2 where the trigonometric form needs analytic continuation.
// Negative orders follow from the reflection S_{-m} = -S_{m-2}.
class ChebKernel {
public:
    ChebKernel(double x, int max_order) : x_(x) {
        if (max_order < 1) max_order = 1;
        u_values_.resize(static_cast<size_t>(max_order) + 1);
        u_values_[0] = 1.0;
        u_values_[1] = x;
        for (int m = 2; m <= max_order; ++m)
            u_values_[m] = x * u_values_[m - 1] - u_values_[m - 2];
    }

    double x() const noexcept { return x_; }

    // S_m for any m with |m| within the precomputed range.
    double at(int m) const {
        if (m >= 0) return u_values_.at(static_cast<size_t>(m));
        if (m == -1) return 0.0;
        return -u_values_.at(static_cast<size_t>(-m - 2));
    }

    const std::vector<double>& u_values() const noexcept { return u_values_; }

private:
    double x_;
    std::vector<double> u_values_;
};

// One-off evaluation for callers that need a single order.
inline double cheb_second(double x, int m) {
    if (m == -1) return 0.0;
    int mm = (m >= 0) ? m : -m - 2;
    ChebKernel k(x, mm);
    return (m >= 0) ? k.at(m) : -k.at(mm);
}

} // namespace spinchain
