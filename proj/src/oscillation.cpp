#include "subh/oscillation.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace subh {

namespace {

constexpr double kTangentTol = 1e-9;
constexpr double kOriginTol = 1e-10;

double wrap_angle(double a) {
    while (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
    while (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    return a;
}

/// Accumulated angle of (d, dp) over [t0, t1], subdividing until every
/// increment is small enough to be unambiguous.
double sweep_angle(const std::function<double(double)>& d, const std::function<double(double)>& dp,
                   double t0, double t1, double th0, double th1, int depth) {
    const double delta = wrap_angle(th1 - th0);
    if (std::abs(delta) < 0.5 || depth <= 0) return delta;
    const double tm = 0.5 * (t0 + t1);
    const double dm = d(tm), dpm = dp(tm);
    if (std::abs(dm) < kOriginTol && std::abs(dpm) < kOriginTol)
        throw OriginHitError("winding: phase point reached the origin at t = " + std::to_string(tm));
    const double thm = std::atan2(dpm, dm);
    return sweep_angle(d, dp, t0, tm, th0, thm, depth - 1) +
           sweep_angle(d, dp, tm, t1, thm, th1, depth - 1);
}

}  // namespace

OscillationReport count_zeros_diff(const PeriodicOrbit& orbit, const PeriodicOrbit& reference) {
    const double kT = orbit.period();
    const auto d = [&](double t) { return orbit.u_at(t) - reference.u_at(t); };

    const int n = 8192 * std::max(1, orbit.order_k);
    std::vector<double> ts(n), vs(n);
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
        ts[i] = kT * i / double(n);
        vs[i] = d(ts[i]);
        dmax = std::max(dmax, std::abs(vs[i]));
    }
    if (dmax < 1e-8)
        throw DegenerateDifferenceError("count_zeros_diff: orbit coincides with the reference");

    OscillationReport rep;
    rep.orbit_class_id = orbit.class_id;
    rep.reference_class_id = reference.class_id;

    // circular scan over [0, kT): strict sign alternations count, near-zero
    // samples without an adjacent sign change are tangencies; each crossing
    // is then bisected on the dense output
    auto bisect_zero = [&](double lo, double hi, double flo) {
        for (int it = 0; it < 60 && hi - lo > 1e-13 * kT; ++it) {
            const double mid = 0.5 * (lo + hi);
            (d(mid) * flo > 0.0 ? lo : hi) = mid;
        }
        rep.zeros.push_back(0.5 * (lo + hi));
    };
    int prev_sign = 0;
    int first_sign = 0;
    double prev_t = 0.0, prev_v = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = vs[i];
        const int s = (v > 0.0) ? 1 : (v < 0.0 ? -1 : 0);
        if (s == 0) continue;
        if (prev_sign != 0 && s != prev_sign) {
            ++rep.zero_count;
            bisect_zero(prev_t, ts[i], prev_v);
        }
        if (first_sign == 0) first_sign = s;
        prev_sign = s;
        prev_t = ts[i];
        prev_v = v;
        if (std::abs(v) < kTangentTol) {
            const double vl = d(ts[i] - 0.25 * kT / n);
            const double vr = d(ts[i] + 0.25 * kT / n);
            if (vl * vr > 0.0) ++rep.tangencies;
        }
    }
    if (prev_sign != 0 && first_sign != 0 && prev_sign != first_sign) {
        ++rep.zero_count;  // wrap crossing in the final gap
        bisect_zero(prev_t, kT, prev_v);
    }

    if (rep.zero_count % 2 == 0) rep.j_index = rep.zero_count / 2;
    return rep;
}

double winding(const PeriodicOrbit& orbit, const PeriodicOrbit& reference) {
    const double kT = orbit.period();
    const auto d = [&](double t) { return orbit.u_at(t) - reference.u_at(t); };
    const auto dp = [&](double t) { return orbit.up_at(t) - reference.up_at(t); };
    return winding_of(d, dp, 0.0, kT);
}

double winding_of(const std::function<double(double)>& d, const std::function<double(double)>& dp,
                  double t0, double t1) {
    const int n = 4096;
    double total = 0.0;
    double t_prev = t0;
    double x = d(t0), y = dp(t0);
    if (std::abs(x) < kOriginTol && std::abs(y) < kOriginTol)
        throw OriginHitError("winding: phase point starts at the origin");
    double th_prev = std::atan2(y, x);
    for (int i = 1; i <= n; ++i) {
        const double t = t0 + (t1 - t0) * i / double(n);
        x = d(t);
        y = dp(t);
        if (std::abs(x) < kOriginTol && std::abs(y) < kOriginTol)
            throw OriginHitError("winding: phase point reached the origin at t = " +
                                 std::to_string(t));
        const double th = std::atan2(y, x);
        total += sweep_angle(d, dp, t_prev, t, th_prev, th, 24);
        t_prev = t;
        th_prev = th;
    }
    // the phase point of a second-order difference rotates clockwise
    return -total / (2.0 * std::numbers::pi);
}

}  // namespace subh
