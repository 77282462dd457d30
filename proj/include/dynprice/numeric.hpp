#pragma once

#include <functional>

namespace dynprice::numeric {

/// Adaptive Simpson quadrature of `f` over [a, b].
///
/// Recursion stops when the Richardson estimate |S2 - S1| / 15 falls below
/// max(abs_tol, rel_tol * |S|), where S is a coarse estimate of the whole
/// integral. Depth is capped so a discontinuous integrand still terminates.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-9, double abs_tol = 1e-13, int max_depth = 48);

struct BisectResult {
    double x;
    int iterations;
    bool converged;
};

/// Bisection on a bracket [lo, hi] where f(lo) and f(hi) differ in sign (or one
/// of them is zero). Throws DomainError if the bracket is invalid.
BisectResult bisect(const std::function<double(double)>& f, double lo, double hi,
                    double x_tol = 1e-10, int max_iter = 200);

}  // namespace dynprice::numeric
