#pragma once

#include <functional>
#include <limits>
#include <span>

namespace wavekin::quadrature {

struct Result {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
};

struct Options {
    double rel_tol = 1e-10;
    // Interior points where the integrand may jump; the interval is split there.
    std::span<const double> breakpoints = {};
    // Upper bound on the length of a single adaptive piece. Oscillatory
    // integrands converge much faster when pieces span a few periods at most.
    double max_piece = std::numeric_limits<double>::infinity();
};

// Adaptive Gauss-Kronrod (31 point) integration of f over [a, b].
// Throws QuadratureError when the result is non-finite or the error estimate
// stays above the requested tolerance.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options = {});

} // namespace wavekin::quadrature
