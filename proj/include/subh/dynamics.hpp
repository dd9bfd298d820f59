#pragma once

#include <utility>

#include "subh/dopri5.hpp"
#include "subh/nonlinearity.hpp"

namespace subh {

using PlanarState = Vec<2>;

/// Dense solution of the planar system (u, u').
using Trajectory = Solution<2>;

/// Fundamental solution of the variational equation over [0, kT].
/// Liouville: det = exp(-c kT); the area-preserving case c = 0 gives det = 1.
struct MonodromyData {
    double m11 = 1.0, m12 = 0.0, m21 = 0.0, m22 = 1.0;

    double trace() const { return m11 + m22; }
    double det() const { return m11 * m22 - m12 * m21; }

    PlanarState apply(const PlanarState& v) const {
        return {m11 * v[0] + m12 * v[1], m21 * v[0] + m22 * v[1]};
    }
};

struct DynamicsOptions {
    double tol = 1e-10;
    double escape = 1e8;
    bool store_dense = true;
};

/// Integrate u'' + c u' + F(t, u) = 0 as a first-order system with dense
/// output. Blow-up is reported in-band on the trajectory; a collapsing step
/// raises StepUnderflowError.
Trajectory integrate(const ExtendedField& F, const PlanarState& y0, double t0, double t1,
                     const DynamicsOptions& opt = {});

/// Endpoint-only flow map (no dense storage). Throws BlowUpError on escape.
PlanarState flow_endpoint(const ExtendedField& F, const PlanarState& y0, double t0, double t1,
                          const DynamicsOptions& opt = {});

/// y(t0 + kT) together with the Jacobian of y0 -> y(t0 + kT), obtained from
/// the variational equation integrated along the trajectory as one augmented
/// system. The anchor t0 shifts the section; fixed points are kT-periodic
/// solutions regardless. Throws BlowUpError when the orbit escapes.
std::pair<PlanarState, MonodromyData> poincare_map(const ExtendedField& F, const PlanarState& y0,
                                                   int k, const DynamicsOptions& opt = {},
                                                   double t0 = 0.0);

using PlanarStateHP = VecT<2, long double>;

/// Extended-precision Poincare map over [0, kT]: drops the double round-off
/// floor of the residual measurement by three orders on stiff monodromies.
std::pair<PlanarStateHP, MonodromyData> poincare_map_hp(const ExtendedField& F,
                                                        const PlanarStateHP& y0, int k,
                                                        double tol = 1e-18, double escape = 1e8,
                                                        double t0 = 0.0);

}  // namespace subh
