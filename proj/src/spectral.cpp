#include "subh/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "subh/dopri5.hpp"

namespace subh {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Monodromy trace, with overflow treated as +inf (very negative lambda).
double discriminant_or_inf(const Coefficient& q, double period, double lambda, double tol) {
    auto rhs = [&](double t, const Vec<4>& y, Vec<4>& dy) {
        const double c = lambda + q(t);
        dy[0] = y[1];
        dy[1] = -c * y[0];
        dy[2] = y[3];
        dy[3] = -c * y[2];
    };
    IntegrateOptions io;
    io.tol = tol;
    io.escape = kInf;
    io.store_dense = false;
    const Vec<4> y0{1.0, 0.0, 0.0, 1.0};
    try {
        Solution<4> sol = integrate_dopri5<4>(rhs, 0.0, period, y0, io);
        const double tr = sol.y_end()[0] + sol.y_end()[3];
        return std::isfinite(tr) ? tr : kInf;
    } catch (const StepUnderflowError&) {
        return kInf;
    } catch (const Error&) {
        return kInf;
    }
}

void sample_range(const Coefficient& q, double period, double& q_min, double& q_max_abs) {
    q_min = kInf;
    double q_max = -kInf;
    constexpr int kSamples = 4096;
    for (int i = 0; i <= kSamples; ++i) {
        const double v = q(period * i / double(kSamples));
        q_min = std::min(q_min, v);
        q_max = std::max(q_max, v);
    }
    q_max_abs = std::max(std::abs(q_min), std::abs(q_max));
}

/// Zeros of the solution with v(0) = 0, v'(0) = 1 on (0, n_periods*T].
/// Below lambda_0 the equation is disconjugate and the count is zero; the
/// count is nondecreasing in lambda (Sturm), which localizes lambda_0.
int oscillation_count(const Coefficient& q, double period, double lambda, int n_periods,
                      double coeff_max) {
    auto rhs = [&](double t, const Vec<2>& y, Vec<2>& dy) {
        dy[0] = y[1];
        dy[1] = -(lambda + q(t)) * y[0];
    };
    IntegrateOptions io;
    io.tol = 1e-8;  // counting tolerates noise
    io.escape = kInf;
    const double t1 = n_periods * period;
    Solution<2> sol;
    try {
        sol = integrate_dopri5<2>(rhs, 0.0, t1, Vec<2>{0.0, 1.0}, io);
    } catch (const Error&) {
        return 1 << 20;  // treat a failed run as strongly oscillatory
    }
    // sample densely enough for the fastest local rotation
    const double rate = std::sqrt(std::max(lambda + coeff_max, 1.0));
    const int n = n_periods * std::max(512, static_cast<int>(8.0 * rate * period / 3.14159));
    int count = 0;
    double prev = 0.0;
    bool have = false;
    for (int i = 1; i <= n; ++i) {
        const double v = sol.eval(t1 * i / double(n))[0];
        if (v == 0.0) continue;
        if (have && v * prev < 0.0) ++count;
        prev = v;
        have = true;
    }
    return count;
}

}  // namespace

double hill_discriminant(const Coefficient& q, double period, double lambda,
                         double integrate_tol) {
    const double d = discriminant_or_inf(q, period, lambda, integrate_tol);
    if (d == kInf) throw IntegrationFailureError("hill_discriminant: monodromy overflow");
    return d;
}

HillResult principal_eigenvalue(const Coefficient& q, double period, const SpectralOptions& opt) {
    double q_min, q_max_abs;
    sample_range(q, period, q_min, q_max_abs);

    auto disc = [&](double lam) { return discriminant_or_inf(q, period, lam, opt.integrate_tol); };

    // left endpoint: lambda + q < 0 pointwise makes the discriminant exceed 2
    double lam_l = -q_max_abs - 1.0;
    while (disc(lam_l) <= 2.0) {
        lam_l = 2.0 * lam_l - 1.0;
        if (lam_l < -opt.lambda_limit)
            throw BracketFailureError("principal_eigenvalue: no discriminant > 2 on the left");
    }

    // localize lambda_0 by the rotation count: zero for lambda <= lambda_0,
    // positive above, nondecreasing in lambda. A direct discriminant scan
    // can step over the narrow first dip of strongly indefinite
    // coefficients and would bisect onto a higher crossing.
    const double omega = 2.0 * std::numbers::pi / period;
    double coeff_max = q_max_abs;
    constexpr int kPeriods = 16;
    auto count_at = [&](double lam) {
        return oscillation_count(q, period, lam, kPeriods, coeff_max);
    };
    double rot_lo = lam_l;
    double rot_hi = -q_min + omega * omega + 1.0;
    while (count_at(rot_hi) == 0) {
        rot_lo = rot_hi;
        rot_hi = 2.0 * rot_hi + 1.0;
        if (rot_hi > opt.lambda_limit)
            throw BracketFailureError("principal_eigenvalue: no oscillation below the limit");
    }
    if (count_at(rot_lo) != 0)
        throw BracketFailureError("principal_eigenvalue: oscillatory at the left endpoint");
    // the discriminant bisection below is the precision stage; here a
    // localization within the first dip suffices
    while (rot_hi - rot_lo > 1e-6 * (1.0 + std::abs(rot_hi))) {
        const double mid = 0.5 * (rot_lo + rot_hi);
        (count_at(mid) == 0 ? rot_lo : rot_hi) = mid;
    }
    const double lam_star = rot_hi;  // in [lambda_0, lambda_0 + rotation bias]

    // local discriminant bracket around the localized eigenvalue
    double step = std::max(1e-7 * (1.0 + std::abs(lam_star)), 1e-7);
    double lam_r = kInf;
    for (double v = step; v < opt.lambda_limit; v *= 2.0) {
        if (disc(lam_star + v) < 2.0) {
            lam_r = lam_star + v;
            break;
        }
    }
    for (double wdn = step;; wdn *= 2.0) {
        const double cand = lam_star - wdn;
        if (cand < lam_l) break;
        if (disc(cand) > 2.0) {
            lam_l = cand;
            break;
        }
    }
    if (lam_r == kInf)
        throw BracketFailureError("principal_eigenvalue: no discriminant dip near the rotation point");

    HillResult res;
    int iters = 0;
    while (lam_r - lam_l > opt.lambda_tol) {
        const double mid = 0.5 * (lam_l + lam_r);
        (disc(mid) > 2.0 ? lam_l : lam_r) = mid;
        ++iters;
    }
    res.lambda0 = 0.5 * (lam_l + lam_r);
    res.bracket = {lam_l, lam_r};
    res.discriminant_at_lambda0 = disc(res.lambda0);
    res.iterations = iters;
    return res;
}

std::pair<double, bool> verify_morse(const PeriodicOrbit& orbit, const WeightSpec& w,
                                     const Nonlinearity& n, const SpectralOptions& opt) {
    if (orbit.order_k != 1)
        throw Error("verify_morse: the linearization check applies to T-periodic orbits");
    const Coefficient coeff = [&w, &n, &orbit](double t) {
        return w.eval(t) * n.dg(orbit.u_at(t));
    };
    const HillResult hr = principal_eigenvalue(coeff, w.period(), opt);
    return {hr.lambda0, hr.lambda0 < -10.0 * opt.lambda_tol};
}

namespace {

struct Shot {
    double phi_end = 0.0;
    bool has_zero = false;  ///< a zero of phi in (lo, hi]
};

Shot shoot_dirichlet(const Coefficient& q, double lo, double hi, double lambda, double tol) {
    auto rhs = [&](double t, const Vec<2>& y, Vec<2>& dy) {
        dy[0] = y[1];
        dy[1] = -lambda * q(t) * y[0];
    };
    IntegrateOptions io;
    io.tol = tol;
    io.escape = kInf;
    Solution<2> sol = integrate_dopri5<2>(rhs, lo, hi, Vec<2>{0.0, 1.0}, io);

    Shot s;
    s.phi_end = sol.y_end()[0];
    constexpr int kSamples = 512;
    double prev = 0.0;
    bool have_prev = false;
    for (int i = 1; i <= kSamples; ++i) {
        const double t = lo + (hi - lo) * i / double(kSamples);
        const double v = sol.eval(t)[0];
        if (have_prev && prev * v < 0.0) {
            s.has_zero = true;
            break;
        }
        if (v != 0.0) {
            prev = v;
            have_prev = true;
        }
    }
    if (s.phi_end <= 0.0) s.has_zero = true;
    return s;
}

}  // namespace

double dirichlet_eigenvalue(const Coefficient& q, double lo, double hi,
                            const SpectralOptions& opt) {
    if (!(hi > lo)) throw Error("dirichlet_eigenvalue: empty interval");
    const double L = hi - lo;

    // coefficient scale on the hump sets the lambda search scale
    double q_mean = 0.0;
    constexpr int kSamples = 512;
    for (int i = 0; i <= kSamples; ++i) q_mean += std::max(q(lo + L * i / double(kSamples)), 0.0);
    q_mean /= kSamples + 1;
    if (q_mean <= 0.0)
        throw BracketFailureError("dirichlet_eigenvalue: coefficient not positive on the hump");

    const double pi = std::numbers::pi;
    const double lam_guess = (pi / L) * (pi / L) / q_mean;

    double lam_lo = 0.0;
    double lam_hi = 0.25 * lam_guess;
    while (!shoot_dirichlet(q, lo, hi, lam_hi, opt.integrate_tol).has_zero) {
        lam_lo = lam_hi;
        lam_hi *= 2.0;
        if (lam_hi > 1e9 * lam_guess)
            throw BracketFailureError("dirichlet_eigenvalue: no zero of phi(hi) found");
    }
    while (lam_hi - lam_lo > 1e-10 * lam_hi + 1e-13) {
        const double mid = 0.5 * (lam_lo + lam_hi);
        (shoot_dirichlet(q, lo, hi, mid, opt.integrate_tol).has_zero ? lam_hi : lam_lo) = mid;
    }
    return 0.5 * (lam_lo + lam_hi);
}

double dirichlet_eigenvalue(const WeightSpec& w, int hump_index, const SpectralOptions& opt) {
    const SignedInterval hump = w.positive_hump(hump_index);
    return dirichlet_eigenvalue(w.coefficient(), hump.lo, hump.hi, opt);
}

}  // namespace subh
