#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace subh {

/// Adaptive Simpson quadrature on [a, b].
///
/// Classic bisection scheme with the 1/15 Richardson error estimate. The
/// tolerance is absolute; callers integrating large quantities should scale
/// it themselves.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, int max_depth = 48);

/// Adaptive Simpson over an interval split at the given interior breakpoints.
/// Breakpoints outside (a, b) are ignored. Use for integrands with kinks at
/// known locations (weight sign changes, trajectory step boundaries).
double integrate_adaptive_split(const std::function<double(double)>& f, double a, double b,
                                std::span<const double> breakpoints, double abs_tol = 1e-12);

/// Composite Simpson with a fixed number of panels (n is rounded up to even).
/// Used by tests as an oracle independent of the adaptive path.
double integrate_simpson_fixed(const std::function<double(double)>& f, double a, double b,
                               std::size_t n);

/// Exact integral of the piecewise-linear interpolant through (t_i, v_i).
/// Nodes must be strictly increasing.
double integrate_trapezoid_breakpoints(std::span<const double> t, std::span<const double> v);

}  // namespace subh
