#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "subh/periodic.hpp"

namespace subh {

/// Zero count and phase-plane winding of u(t) - u*(t) against a T-periodic
/// reference, over the orbit's full period [0, kT).
struct OscillationReport {
    int orbit_class_id = -1;
    int reference_class_id = -1;
    int zero_count = 0;
    double winding_turns = 0.0;
    std::optional<int> j_index;   ///< zero_count / 2 when even
    int tangencies = 0;           ///< near-zeros without a sign change (flagged, not counted)
    std::vector<double> zeros;    ///< crossing times in [0, kT), bisected on the dense output
};

/// Zeros of d(t) = u(t) - u*(t) located by circular sign scan refined by
/// bisection. Throws DegenerateDifferenceError when the orbits coincide.
OscillationReport count_zeros_diff(const PeriodicOrbit& orbit, const PeriodicOrbit& reference);

/// Clockwise revolutions of (d(t), d'(t)) around the origin over [0, kT],
/// an integer for periodic differences. Throws OriginHitError when the
/// phase point collapses onto the origin.
double winding(const PeriodicOrbit& orbit, const PeriodicOrbit& reference);

/// Low-level winding of a planar curve given by callables, used directly by
/// tests with closed-form inputs.
double winding_of(const std::function<double(double)>& d, const std::function<double(double)>& dp,
                  double t0, double t1);

}  // namespace subh
