#pragma once

#include <functional>
#include <utility>

#include "subh/nonlinearity.hpp"
#include "subh/periodic.hpp"
#include "subh/weights.hpp"

namespace subh {

/// Time-periodic coefficient for the linear problems.
using Coefficient = std::function<double(double)>;

/// Principal periodic eigenvalue of v'' + (lambda + q(t)) v = 0.
struct HillResult {
    double lambda0 = 0.0;
    std::pair<double, double> bracket{0.0, 0.0};  ///< final bisection bracket
    double discriminant_at_lambda0 = 2.0;
    int iterations = 0;
};

struct SpectralOptions {
    double lambda_tol = 1e-9;     ///< bisection width in lambda
    double integrate_tol = 1e-12; ///< tolerance of the monodromy integrations
    double lambda_limit = 1e6;    ///< bracket search range
};

/// Trace of the monodromy matrix of v'' + (lambda + q(t)) v = 0 over one
/// period. Closed form 2 cos(sqrt(lambda) T) when q = 0.
double hill_discriminant(const Coefficient& q, double period, double lambda,
                         double integrate_tol = 1e-12);

/// Smallest lambda with discriminant 2: bracket grown leftward from
/// -max|q| - 1 (discriminant > 2 there), right endpoint found by scanning
/// for the first dip below 2, then bisection. Throws BracketFailureError.
HillResult principal_eigenvalue(const Coefficient& q, double period,
                                const SpectralOptions& opt = {});

/// lambda_0 of the linearization q(t) g'(u(t)) along a T-periodic orbit,
/// with the sign verdict (negative lambda_0 expected for positive solutions
/// of the convex problem).
std::pair<double, bool> verify_morse(const PeriodicOrbit& orbit, const WeightSpec& w,
                                     const Nonlinearity& n, const SpectralOptions& opt = {});

/// Smallest lambda > 0 with a nontrivial solution of
/// phi'' + lambda q(t) phi = 0, phi(lo) = phi(hi) = 0, by shooting from
/// (phi, phi') = (0, 1) and bisecting on the first-zero predicate.
double dirichlet_eigenvalue(const Coefficient& q, double lo, double hi,
                            const SpectralOptions& opt = {});

/// Same on the positive hump I^+_i of the weight.
double dirichlet_eigenvalue(const WeightSpec& w, int hump_index, const SpectralOptions& opt = {});

}  // namespace subh
