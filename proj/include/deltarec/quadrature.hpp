#pragma once

// Small numerical helpers shared by the modules: adaptive Simpson, composite
// Simpson on uniform samples, and bracketed bisection.

#include <cstddef>
#include <functional>
#include <span>

namespace deltarec::quad {

/// ∫_a^b f by adaptive Simpson with absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 48);

/// Composite Simpson over uniform samples y_0..y_n with spacing h; a trapezoid
/// panel closes an odd number of cells.
double simpson(std::span<const double> y, double h);

/// Root of f in [lo, hi] where f(lo), f(hi) have opposite signs (or one is 0).
/// Stops when the bracket is below tol relative to max(1, |mid|).
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-15,
              int max_iter = 400);

}  // namespace deltarec::quad
