#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "subh/dynamics.hpp"
#include "subh/nonlinearity.hpp"
#include "subh/weights.hpp"

namespace subh {

/// {0,1} code over the km positivity humps of [0, kT]: bit j (0-based,
/// j = (i-1) + ell*m) is 1 when the solution's maximum on J^+_{i,ell}
/// exceeds the threshold r.
struct HumpString {
    std::vector<std::uint8_t> bits;

    HumpString() = default;
    explicit HumpString(std::vector<std::uint8_t> b) : bits(std::move(b)) {}
    static HumpString from_string(const std::string& s);
    static HumpString ones(std::size_t n) { return HumpString(std::vector<std::uint8_t>(n, 1)); }

    std::size_t size() const { return bits.size(); }
    bool any() const;
    std::string str() const;  // e.g. "101"

    bool operator==(const HumpString& o) const { return bits == o.bits; }
    bool operator<(const HumpString& o) const { return bits < o.bits; }
};

/// Lexicographically least rotation of the string by whole blocks of m bits
/// (one block per period shift); canonical label of a periodicity class.
HumpString canonical_block_rotation(const HumpString& s, int m);

/// A kT-periodic solution found by shooting.
struct PeriodicOrbit {
    PlanarState y0{0.0, 0.0};
    int order_k = 1;
    double residual = 0.0;  ///< |P_kT(y0) - y0| from the classification-grade re-integration
    HumpString string;
    bool minimal = false;
    int class_id = -1;
    std::vector<double> max_per_hump;  ///< km values, one per J^+_{i,ell}
    Trajectory trajectory;             ///< dense output on [0, kT]
    MonodromyData monodromy;           ///< at the converged point
    double min_u = 0.0;
    double max_u = 0.0;

    // diagnostics attached by the pipeline
    double lambda0 = std::numeric_limits<double>::quiet_NaN();
    double nc_residual_1 = std::numeric_limits<double>::quiet_NaN();
    double nc_residual_2 = std::numeric_limits<double>::quiet_NaN();

    /// u(t) with t folded into [0, kT] (periodic extension).
    double u_at(double t) const;
    /// u'(t), same folding.
    double up_at(double t) const;
    double period() const;  ///< kT
};

struct SeedOptions {
    std::vector<double> amplitudes{0.05, 0.15, 0.5, 1.5, 5.0, 15.0};
    std::vector<double> epsilons{0.02, 0.2};
};

/// Initial states aimed at the solution coded by S: glued bump profiles with
/// amplitude A on 1-bits and eps*A on 0-bits, evaluated at t = 0. All-ones
/// strings additionally get the near-constant guesses (A, 0).
std::vector<PlanarState> seed_guesses(const WeightSpec& w, const Nonlinearity& n, int k,
                                      const HumpString& S, const SeedOptions& opt = {});

enum class ShootStatus { converged, no_convergence, singular_jacobian, blow_up, step_underflow };

struct ShootOptions {
    double newton_tol = 1e-9;
    int max_iter = 50;
    double integrate_tol = 1e-10;
    double classify_tol = 1e-12;  ///< re-integration tolerance for the stored trajectory
    double escape = 1e8;
    int max_damping = 20;
    double t_anchor = 0.0;  ///< section anchor; a hump center puts (A, 0) seeds
                            ///< near the target's maximum, where the basin is wide
    bool hp_refine = false;  ///< extended-precision Newton tail and residual
                             ///< measurement (t_anchor == 0 only)
    double hp_tol = 1e-18;
};

struct ShootResult {
    ShootStatus status = ShootStatus::no_convergence;
    PeriodicOrbit orbit;  ///< valid when has_orbit(): also kept on a stall
                          ///< near the tolerance, with the measured residual
    int iterations = 0;
    double final_residual = std::numeric_limits<double>::infinity();
    bool orbit_built = false;

    bool has_orbit() const { return orbit_built; }
};

/// Damped Newton iteration on y -> P_kT(y) - y with the monodromy Jacobian.
ShootResult newton_shoot(const ExtendedField& F, const PlanarState& y0, int k,
                         const ShootOptions& opt = {});

/// Per-hump maxima of u over all J^+_{i,ell} in [0, kT], bit order.
std::vector<double> hump_maxima(const PeriodicOrbit& orbit, const WeightSpec& w);

/// r and R from the gap statistic over the pooled per-hump maxima:
/// r is the geometric midpoint of the largest (ratio) gap, R twice the
/// global maximum.
struct Thresholds {
    double r = 0.0;
    double R = 0.0;
};
Thresholds select_thresholds(const std::vector<double>& pooled_maxima);

/// Compare per-hump maxima against r; fills orbit.string and
/// orbit.max_per_hump. Throws AmbiguousClassificationError when a maximum
/// falls inside [r(1-delta), r(1+delta)] and ExceedsRError above R.
HumpString classify_string(PeriodicOrbit& orbit, const WeightSpec& w, double r, double R,
                           double delta = 0.05);

/// True when no proper divisor ell of k gives an ell*T period:
/// max_t |u(t) - u(t + ell T)| > 10 tol for every proper divisor.
bool minimal_order(const PeriodicOrbit& orbit, double tol);

/// Orbits merged into time-translation classes.
struct PeriodicityClass {
    int id = -1;
    HumpString canonical;
    std::vector<std::size_t> members;  ///< indices into the orbit list
    std::size_t representative = 0;
    bool minimal = false;
};

/// Merge orbits equal up to a T-shift (within tol); assigns class ids on the
/// orbits, deterministic order (canonical string, then y0).
std::vector<PeriodicityClass> dedup_classes(std::vector<PeriodicOrbit>& orbits, double tol);

/// The two integral identities every positive kT-periodic solution satisfies:
/// |int_0^kT q g(u)| and |k int_0^T q + int_0^kT (u'/g(u))^2 g'(u)|.
std::pair<double, double> necessary_condition_residuals(const PeriodicOrbit& orbit,
                                                        const WeightSpec& w,
                                                        const Nonlinearity& n);

/// Coefficient-level version: q as a callable, the exact value of
/// int_0^kT q, and quadrature split points supplied by the caller.
std::pair<double, double> necessary_condition_residuals(const PeriodicOrbit& orbit,
                                                        const std::function<double(double)>& q,
                                                        double q_integral_kT,
                                                        const std::vector<double>& splits,
                                                        const Nonlinearity& n);

}  // namespace subh
