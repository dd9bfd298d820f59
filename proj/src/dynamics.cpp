#include "subh/dynamics.hpp"

namespace subh {

namespace {

IntegrateOptions planar_options(const ExtendedField& F, const DynamicsOptions& opt) {
    IntegrateOptions io;
    io.tol = opt.tol;
    io.escape = opt.escape;
    io.store_dense = opt.store_dense;
    // the sign extension f has a slope kink at u = 0; the truncation h and
    // raw test fields are smooth there
    io.split_at_zero = !F.raw && !F.truncation_R.has_value();
    return io;
}

}  // namespace

Trajectory integrate(const ExtendedField& F, const PlanarState& y0, double t0, double t1,
                     const DynamicsOptions& opt) {
    auto rhs = [&F](double t, const Vec<2>& y, Vec<2>& dy) {
        dy[0] = y[1];
        dy[1] = -F.friction_c * y[1] - F.force(t, y[0]);
    };
    return integrate_dopri5<2>(rhs, t0, t1, y0, planar_options(F, opt));
}

PlanarState flow_endpoint(const ExtendedField& F, const PlanarState& y0, double t0, double t1,
                          const DynamicsOptions& opt) {
    DynamicsOptions o = opt;
    o.store_dense = false;
    Trajectory tr = integrate(F, y0, t0, t1, o);
    if (tr.blow_up)
        throw BlowUpError(*tr.blow_up, "flow_endpoint: solution escaped before reaching t1");
    return tr.y_end();
}

std::pair<PlanarState, MonodromyData> poincare_map(const ExtendedField& F, const PlanarState& y0,
                                                   int k, const DynamicsOptions& opt, double t0) {
    if (F.period_T <= 0.0) throw Error("poincare_map: field has no period set");
    if (k < 1) throw Error("poincare_map: k must be >= 1");

    // state layout: (u, u', m11, m21, m12, m22) -- the monodromy columns
    auto rhs = [&F](double t, const Vec<6>& y, Vec<6>& dy) {
        const double slope = F.force_slope(t, y[0]);
        const double c = F.friction_c;
        dy[0] = y[1];
        dy[1] = -c * y[1] - F.force(t, y[0]);
        dy[2] = y[3];
        dy[3] = -slope * y[2] - c * y[3];
        dy[4] = y[5];
        dy[5] = -slope * y[4] - c * y[5];
    };

    IntegrateOptions io;
    io.tol = opt.tol;
    io.escape = opt.escape;
    io.escape_dims = 2;  // monodromy entries may legitimately grow large
    io.split_at_zero = !F.raw && !F.truncation_R.has_value();
    io.store_dense = false;

    const Vec<6> z0{y0[0], y0[1], 1.0, 0.0, 0.0, 1.0};
    Solution<6> sol = integrate_dopri5<6>(rhs, t0, t0 + k * F.period_T, z0, io);
    if (sol.blow_up)
        throw BlowUpError(*sol.blow_up, "poincare_map: solution escaped before kT");

    const Vec<6>& z = sol.y_end();
    MonodromyData M;
    M.m11 = z[2];
    M.m21 = z[3];
    M.m12 = z[4];
    M.m22 = z[5];
    return {PlanarState{z[0], z[1]}, M};
}

std::pair<PlanarStateHP, MonodromyData> poincare_map_hp(const ExtendedField& F,
                                                        const PlanarStateHP& y0, int k,
                                                        double tol, double escape, double t0) {
    if (F.period_T <= 0.0) throw Error("poincare_map_hp: field has no period set");
    using LD = long double;
    auto rhs = [&F](LD t, const VecT<6, LD>& y, VecT<6, LD>& dy) {
        const LD slope = F.force_slope_hp(t, y[0]);
        const LD c = F.friction_c;
        dy[0] = y[1];
        dy[1] = -c * y[1] - F.force_hp(t, y[0]);
        dy[2] = y[3];
        dy[3] = -slope * y[2] - c * y[3];
        dy[4] = y[5];
        dy[5] = -slope * y[4] - c * y[5];
    };
    IntegrateOptions io;
    io.tol = tol;
    io.escape = escape;
    io.escape_dims = 2;
    io.split_at_zero = !F.raw && !F.truncation_R.has_value();
    io.store_dense = false;
    const VecT<6, LD> z0{y0[0], y0[1], 1.0L, 0.0L, 0.0L, 1.0L};
    const LD t0l = t0;
    SolutionT<6, LD> sol = integrate_dopri5_t<6, decltype(rhs)&, LD>(
        rhs, t0l, t0l + static_cast<LD>(k) * static_cast<LD>(F.period_T), z0, io);
    if (sol.blow_up)
        throw BlowUpError(static_cast<double>(*sol.blow_up),
                          "poincare_map_hp: solution escaped before kT");
    const VecT<6, LD>& z = sol.y_end();
    MonodromyData M;
    M.m11 = static_cast<double>(z[2]);
    M.m21 = static_cast<double>(z[3]);
    M.m12 = static_cast<double>(z[4]);
    M.m22 = static_cast<double>(z[5]);
    return {PlanarStateHP{z[0], z[1]}, M};
}

}  // namespace subh
