#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace wavekin {

// Closed 1D interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool operator==(const Interval&) const = default;
};

inline constexpr double kPi = std::numbers::pi;

// n points from lo to hi inclusive; n >= 2.
std::vector<double> linspace(double lo, double hi, std::size_t n);

} // namespace wavekin
