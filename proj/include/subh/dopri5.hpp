#pragma once

// Embedded Dormand-Prince 5(4) pair with 4th-order dense output,
// blow-up escape detection, and optional event splitting at zeros of the
// first state component.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "subh/errors.hpp"

namespace subh {

template <std::size_t N, class Real = double>
using VecT = std::array<Real, N>;

template <std::size_t N>
using Vec = VecT<N, double>;

namespace dp5 {

inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                        a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

inline constexpr double safe = 0.9, facl = 0.2, facr = 10.0, beta = 0.04;

}  // namespace dp5

/// Dense-output polynomial for one accepted step.
template <std::size_t N, class Real = double>
struct DenseSegmentT {
    Real t0 = 0.0;     ///< step start
    Real h = 0.0;      ///< full step length used to scale theta
    Real t_end = 0.0;  ///< may be below t0 + h when the step was cut at an event
    std::array<VecT<N, Real>, 5> c{};

    VecT<N, Real> eval(Real t) const {
        const Real th = (t - t0) / h;
        const Real th1 = Real(1) - th;
        VecT<N, Real> y;
        for (std::size_t i = 0; i < N; ++i)
            y[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
        return y;
    }
};

template <std::size_t N>
using DenseSegment = DenseSegmentT<N, double>;

/// Result of an adaptive integration: states at step ends plus the dense
/// interpolant. When blow_up is set the stored samples stop at the escape
/// crossing and the final state sits on the escape threshold.
template <std::size_t N, class Real = double>
struct SolutionT {
    std::vector<Real> times;
    std::vector<VecT<N, Real>> states;
    std::vector<DenseSegmentT<N, Real>> segments;
    std::optional<Real> blow_up;
    std::size_t n_accepted = 0;
    std::size_t n_rejected = 0;

    Real t_begin() const { return times.front(); }
    Real t_end() const { return times.back(); }
    const VecT<N, Real>& y_end() const { return states.back(); }

    VecT<N, Real> eval(Real t) const {
        if (segments.empty()) return states.front();
        if (t <= times.front()) return states.front();
        if (t >= times.back()) return states.back();
        // segment i covers [times[i], times[i+1]]
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        std::size_t i = static_cast<std::size_t>(it - times.begin());
        i = (i == 0) ? 0 : i - 1;
        if (i >= segments.size()) i = segments.size() - 1;
        return segments[i].eval(t);
    }
};

template <std::size_t N>
using Solution = SolutionT<N, double>;

struct IntegrateOptions {
    double tol = 1e-10;   ///< absolute and relative tolerance
    double escape = 1e8;  ///< blow-up threshold on |y_i|; infinity disables
    std::size_t escape_dims = static_cast<std::size_t>(-1);  ///< leading components checked
    bool split_at_zero = false;  ///< cut accepted steps at sign changes of y[0]
    double h_max = 0.0;          ///< 0: no cap
    std::size_t max_steps = 20'000'000;
    bool store_dense = true;  ///< false: keep only the running endpoint
};

namespace detail {

template <std::size_t N, class Real>
Real error_norm(const VecT<N, Real>& e, const VecT<N, Real>& y0, const VecT<N, Real>& y1,
                Real tol) {
    Real sum = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const Real sk = tol + tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const Real r = e[i] / sk;
        sum += r * r;
    }
    return std::sqrt(sum / static_cast<Real>(N));
}

template <std::size_t N, class Real>
bool finite(const VecT<N, Real>& y) {
    for (Real v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace detail

/// Integrate y' = rhs(t, y) from t0 to t1 (t1 >= t0).
/// rhs signature: void(Real t, const VecT& y, VecT& dydt).
template <std::size_t N, class RHS, class Real = double>
SolutionT<N, Real> integrate_dopri5_t(RHS&& rhs, Real t0, Real t1, const VecT<N, Real>& y0,
                                      const IntegrateOptions& opt = {}) {
    using namespace dp5;
    SolutionT<N, Real> sol;
    sol.times.push_back(t0);
    sol.states.push_back(y0);
    if (t1 <= t0) return sol;

    const Real span = t1 - t0;
    const Real h_min = Real(1e-14) * span;
    const std::size_t n_esc = std::min<std::size_t>(opt.escape_dims, N);

    Real t = t0;
    VecT<N, Real> y = y0;
    VecT<N, Real> k1, k2, k3, k4, k5, k6, k7, ytmp;
    rhs(t, y, k1);

    // initial step from the magnitude of y and y'
    Real h;
    {
        Real dny = 0.0, dnf = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const Real sk = Real(opt.tol) + Real(opt.tol) * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        h = (dnf <= Real(1e-10) || dny <= Real(1e-10)) ? Real(1e-6) * span
                                                       : Real(0.01) * std::sqrt(dny / dnf);
        h = std::min(h, span);
        if (opt.h_max > 0.0) h = std::min(h, Real(opt.h_max));
    }

    Real facold = 1e-4;
    std::size_t steps = 0;

    auto push_sample = [&](Real tn, const VecT<N, Real>& yn, const DenseSegmentT<N, Real>& seg) {
        sol.times.push_back(tn);
        sol.states.push_back(yn);
        if (opt.store_dense)
            sol.segments.push_back(seg);
        else {
            sol.times.erase(sol.times.begin());
            sol.states.erase(sol.states.begin());
        }
    };

    while (t < t1) {
        if (++steps > opt.max_steps) throw Error("integrate: step budget exhausted");
        if (h < h_min)
            throw StepUnderflowError(static_cast<double>(t), "integrate: step size underflow");
        bool last = false;
        if (t + Real(1.01) * h >= t1) {
            h = t1 - t;
            last = true;
        }

        // stages
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        VecT<N, Real> ynew;
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        rhs(t + h, ynew, k7);

        VecT<N, Real> ee;
        for (std::size_t i = 0; i < N; ++i)
            ee[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);

        Real err = detail::error_norm<N, Real>(ee, y, ynew, Real(opt.tol));
        if (!detail::finite<N, Real>(ynew) || !std::isfinite(err)) {
            h *= Real(0.25);
            ++sol.n_rejected;
            continue;
        }

        const Real fac11 = std::pow(err, Real(0.2 - beta * 0.75));
        if (err > Real(1)) {
            h /= std::min(Real(1.0 / facl), fac11 / Real(safe));
            ++sol.n_rejected;
            continue;
        }

        // accepted
        facold = std::max(err, Real(1e-4));
        Real fac = fac11 / std::pow(facold, Real(beta));
        fac = std::max(Real(1.0 / facr), std::min(Real(1.0 / facl), fac / Real(safe)));
        Real h_next = h / fac;
        if (opt.h_max > 0.0) h_next = std::min(h_next, Real(opt.h_max));

        DenseSegmentT<N, Real> seg;
        seg.t0 = t;
        seg.h = h;
        seg.t_end = t + h;
        for (std::size_t i = 0; i < N; ++i) {
            const double dy = ynew[i] - y[i];
            seg.c[0][i] = y[i];
            seg.c[1][i] = dy;
            seg.c[2][i] = h * k1[i] - dy;
            seg.c[3][i] = dy - h * k7[i] - seg.c[2][i];
            seg.c[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                               d7 * k7[i]);
        }

        // escape event: cut the step at the first threshold crossing
        bool escaped = false;
        for (std::size_t i = 0; i < n_esc && !escaped; ++i)
            escaped = std::abs(ynew[i]) > Real(opt.escape);
        if (escaped) {
            Real lo = 0.0, hi = 1.0;
            for (int it = 0; it < 80 && (hi - lo) > Real(1e-15); ++it) {
                const Real mid = Real(0.5) * (lo + hi);
                const VecT<N, Real> ym = seg.eval(t + mid * h);
                bool over = false;
                for (std::size_t i = 0; i < n_esc && !over; ++i)
                    over = std::abs(ym[i]) > Real(opt.escape);
                (over ? hi : lo) = mid;
            }
            const Real t_bu = t + hi * h;
            seg.t_end = t_bu;
            push_sample(t_bu, seg.eval(t_bu), seg);
            sol.blow_up = t_bu;
            ++sol.n_accepted;
            return sol;
        }

        // zero-crossing split on the first component (field kink at u = 0)
        if (opt.split_at_zero && y[0] * ynew[0] < Real(0) && h > Real(16) * h_min) {
            Real lo = 0.0, hi = 1.0;
            const int s0 = y[0] > Real(0) ? 1 : -1;
            for (int it = 0; it < 80 && (hi - lo) > Real(1e-15); ++it) {
                const Real mid = Real(0.5) * (lo + hi);
                const VecT<N, Real> ym = seg.eval(t + mid * h);
                ((ym[0] > Real(0) ? 1 : -1) == s0 ? lo : hi) = mid;
            }
            const Real t_c = t + Real(0.5) * (lo + hi) * h;
            if (t_c - t > Real(4) * h_min && seg.t_end - t_c > Real(4) * h_min) {
                VecT<N, Real> yc = seg.eval(t_c);
                seg.t_end = t_c;
                push_sample(t_c, yc, seg);
                ++sol.n_accepted;
                t = t_c;
                y = yc;
                rhs(t, y, k1);  // field slope changes across u = 0
                h = h_next;
                continue;
            }
        }

        push_sample(t + h, ynew, seg);
        ++sol.n_accepted;
        t += h;
        y = ynew;
        k1 = k7;  // FSAL
        h = h_next;
        if (last && t >= t1) break;
    }
    return sol;
}

/// Double-precision entry point (the default throughout the library).
template <std::size_t N, class RHS>
Solution<N> integrate_dopri5(RHS&& rhs, double t0, double t1, const Vec<N>& y0,
                             const IntegrateOptions& opt = {}) {
    return integrate_dopri5_t<N, RHS, double>(std::forward<RHS>(rhs), t0, t1, y0, opt);
}

}  // namespace subh
