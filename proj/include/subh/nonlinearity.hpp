#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "subh/errors.hpp"
#include "subh/weights.hpp"

namespace subh {

/// g and its first two derivatives on s >= 0.
///
/// Presets carry closed-form derivatives; custom instances can be built
/// directly from callables (tests use g(s) = s and friends).
struct Nonlinearity {
    std::string kind;
    std::vector<double> params;
    std::function<double(double)> g;
    std::function<double(double)> dg;
    std::function<double(double)> ddg;
    // high-precision twins for the verification path; empty means fall back
    // to the double evaluators
    std::function<long double(long double)> g_hp;
    std::function<long double(long double)> dg_hp;
};

/// Factory for the presets:
///   power   (p)        g(s) = s^p, p > 1
///   polymix (c2, c3)   g(s) = c2*s^2 + c3*s^3, coefficients >= 0
///   atan    (scale)    g(s) = scale * s * arctan(s), scale > 0
///   table   (s0,g0,s1,g1,...)  piecewise-linear through the pairs
Nonlinearity make_nonlinearity(const std::string& kind, const std::vector<double>& params);

/// Sampled verification of the growth hypotheses.
struct HypothesisReport {
    bool positive = false;             ///< g(0) = 0 and g(s) > 0 on the grid
    bool superlinear_at_zero = false;  ///< finite-difference g'(0) < 1e-6
    bool convex = false;               ///< g'' > 0 at all grid points
    bool superlinear_at_infinity = false;
    double liminf_proxy = 0.0;  ///< min of g(s)/s over the top grid decades
    double dg0_estimate = 0.0;
};

struct HypothesisGrid {
    double s_min = 1e-8;
    double s_max = 1e4;
    int points_per_decade = 8;
};

HypothesisReport check_hypotheses(const Nonlinearity& n, const HypothesisGrid& grid = {});

/// The planar vector field for u'' + c u' + F(t, u) = 0, where F is either
/// the sign extension f (truncation_R empty) or the linear truncation h.
///
///   f(t,s) = -s for s <= 0,      q(t) g(s) for s >= 0
///   h(t,s) = 0 for s < 0,        q(t) g(s) on [0, R],
///            q(t)(g(R) + g'(R)(s - R)) for s > R
struct ExtendedField {
    std::function<double(double)> q;  ///< weight coefficient q(t)
    Nonlinearity base;
    std::optional<double> truncation_R;
    double friction_c = 0.0;
    double period_T = 0.0;  ///< period of q in t; required by the Poincare map
    bool raw = false;       ///< q(t) g(s) on all of R, no extension (test fields)

    static ExtendedField from_weight(const WeightSpec& w, Nonlinearity n,
                                     std::optional<double> R = std::nullopt, double c = 0.0) {
        ExtendedField F;
        F.q = w.coefficient();
        F.base = std::move(n);
        F.truncation_R = R;
        F.friction_c = c;
        F.period_T = w.period();
        F.q_hp = w.coefficient_hp();
        return F;
    }

    /// F(t, s): the scalar restoring term.
    double force(double t, double s) const;
    /// dF/ds along a trajectory; at s = 0 the right limit q(t) g'(0) is used
    /// for the f extension (s < 0 gives -1) and 0 for the h truncation.
    double force_slope(double t, double s) const;

    /// Extended-precision evaluations for the final residual measurement on
    /// strongly hyperbolic orbits (round-off through the monodromy dominates
    /// plain double).
    std::function<long double(long double)> q_hp;
    long double force_hp(long double t, long double s) const;
    long double force_slope_hp(long double t, long double s) const;
};

/// Right-hand side of the first-order system: (u, u') -> (u', -c u' - F(t,u)).
std::pair<double, double> field_eval(const ExtendedField& F, double t, double s, double sp);

}  // namespace subh
