#include "subh/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "subh/quadrature.hpp"

namespace subh {

namespace {

double reduce_mod(double t, double period) {
    double s = t - period * std::floor(t / period);
    if (s < 0.0) s += period;  // guard against -0 rounding
    if (s >= period) s -= period;
    return s;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

/// Bisect a strict sign change of f between a (sign sa) and b to within tol.
double bisect_crossing(const std::function<double(double)>& f, double a, double b, int sa,
                       double tol) {
    double lo = a, hi = b;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const int sm = sign_of(f(mid));
        if (sm == sa)
            lo = mid;
        else if (sm == -sa)
            hi = mid;
        else {
            // landed on a zero plateau; probe both halves and keep the one
            // that still brackets a strict change
            const double q1 = 0.25 * (3.0 * lo + hi);
            if (sign_of(f(q1)) == sa)
                lo = q1;
            else
                hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Strict sign crossings of f on [0, period), located to tol.
std::vector<double> find_crossings(const std::function<double(double)>& f, double period,
                                   std::size_t grid_n, double tol) {
    std::vector<double> zs;
    const double h = period / static_cast<double>(grid_n);
    int prev_sign = 0;
    double prev_t = 0.0;
    for (std::size_t i = 0; i <= grid_n; ++i) {
        const double t = (i == grid_n) ? period : h * static_cast<double>(i);
        const int s = sign_of(f(t));
        if (s != 0) {
            if (prev_sign != 0 && s != prev_sign) {
                double z = bisect_crossing(f, prev_t, t, prev_sign, tol);
                zs.push_back(z);
            }
            prev_sign = s;
            prev_t = t;
        }
    }
    // map the crossing at the period end back to 0 if the function starts on a zero
    for (double& z : zs)
        if (z >= period) z -= period;
    std::sort(zs.begin(), zs.end());
    // a zero at t=0 that the scan saw only as sign(0)=0 still separates the
    // wrap-around humps; detect it from the signs just inside both ends
    const int s_begin = sign_of(f(tol));
    const int s_end = sign_of(f(period - tol));
    if (s_begin != 0 && s_end != 0 && s_begin != s_end)
        if (zs.empty() || zs.front() > tol) zs.insert(zs.begin(), 0.0);
    return zs;
}

/// Geometric probe outward from a zero point until f is nonzero, then bisect
/// the edge of the zero region. dir = +1 probes right, -1 left.
double plateau_edge(const std::function<double(double)>& f, double z, int dir, double limit,
                    double tol) {
    double step = std::max(tol * 8.0, 1e-13);
    while (sign_of(f(z + dir * step)) == 0) {
        step *= 2.0;
        if (step > limit) return z + dir * limit;
    }
    double in = z + dir * step * 0.5, out = z + dir * step;
    if (sign_of(f(in)) != 0) return z;  // no plateau after all
    while (std::abs(out - in) > tol) {
        const double mid = 0.5 * (in + out);
        (sign_of(f(mid)) == 0 ? in : out) = mid;
    }
    return 0.5 * (in + out);
}

/// Move a located boundary past a flat-zero plateau so the plateau joins the
/// positive hump (endpoint selection of the positive intervals).
double shrink_past_plateau(const std::function<double(double)>& f, double z, double span,
                           double tol) {
    const double probe = std::max(tol * 8.0, 1e-13);
    if (sign_of(f(z + probe)) != 0 && sign_of(f(z - probe)) != 0) return z;
    const double lo = plateau_edge(f, z, -1, span, tol);
    const double hi = plateau_edge(f, z, +1, span, tol);
    const int s_left = sign_of(f(lo - probe));
    return (s_left < 0) ? lo : hi;
}

}  // namespace

WeightSpec WeightSpec::sinusoid(double period, double mu, double freq, double sign_tol) {
    if (period <= 0.0 || mu <= 0.0 || freq <= 0.0)
        throw BadParamsError("sinusoid weight: period, mu, freq must be positive");
    WeightSpec w;
    w.kind_ = Kind::sinusoid;
    w.period_ = period;
    w.mu_ = mu;
    w.freq_ = freq;
    try {
        w.humps_ = decompose_humps(w, sign_tol);
    } catch (const NoSignChangeError&) {
        w.humps_.clear();
    }
    w.m_ = static_cast<int>(std::count_if(w.humps_.begin(), w.humps_.end(),
                                          [](const SignedInterval& s) { return s.sign > 0; }));
    return w;
}

WeightSpec WeightSpec::table(double period, double mu, std::vector<double> nodes,
                             std::vector<double> values, double sign_tol) {
    if (period <= 0.0 || mu <= 0.0) throw BadParamsError("table weight: period and mu must be positive");
    if (nodes.size() != values.size() || nodes.size() < 2)
        throw BadParamsError("table weight: need matching node/value lists of size >= 2");
    if (std::abs(nodes.front()) > 1e-15 || std::abs(nodes.back() - period) > 1e-12 * period)
        throw BadParamsError("table weight: nodes must start at 0 and end at the period");
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        if (!(nodes[i + 1] > nodes[i])) throw BadParamsError("table weight: nodes must increase");
    WeightSpec w;
    w.kind_ = Kind::table;
    w.period_ = period;
    w.mu_ = mu;
    w.nodes_ = std::move(nodes);
    w.values_ = std::move(values);
    w.nodes_.front() = 0.0;
    w.nodes_.back() = period;
    try {
        w.humps_ = decompose_humps(w, sign_tol);
    } catch (const NoSignChangeError&) {
        w.humps_.clear();
    }
    w.m_ = static_cast<int>(std::count_if(w.humps_.begin(), w.humps_.end(),
                                          [](const SignedInterval& s) { return s.sign > 0; }));
    return w;
}

double WeightSpec::base(double t) const {
    const double s = reduce_mod(t, period_);
    if (kind_ == Kind::sinusoid)
        return std::sin(2.0 * std::numbers::pi * freq_ * s / period_);
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    if (i == 0) return values_.front();
    if (i >= nodes_.size()) return values_.back();
    const double w0 = nodes_[i - 1], w1 = nodes_[i];
    const double lam = (s - w0) / (w1 - w0);
    return (1.0 - lam) * values_[i - 1] + lam * values_[i];
}

double WeightSpec::eval(double t) const {
    const double a = base(t);
    return a >= 0.0 ? a : mu_ * a;  // a+ - mu*a- written without branching on both parts
}

std::function<double(double)> WeightSpec::coefficient() const {
    return [w = *this](double t) { return w.eval(t); };
}

std::function<long double(long double)> WeightSpec::coefficient_hp() const {
    if (kind_ == Kind::sinusoid) {
        const long double two_pi = 6.283185307179586476925286766559L;
        const long double T = period_, f = freq_, mu = mu_;
        return [two_pi, T, f, mu](long double t) {
            long double s = t - T * std::floor(t / T);
            if (s < 0.0L) s += T;
            const long double a = std::sin(two_pi * f * s / T);
            return a >= 0.0L ? a : mu * a;
        };
    }
    // table values are double data; the gain here is the long double
    // interpolation and periodic reduction
    const std::vector<double> nodes = nodes_, values = values_;
    const long double T = period_, mu = mu_;
    return [nodes, values, T, mu](long double t) {
        long double s = t - T * std::floor(t / T);
        if (s < 0.0L) s += T;
        std::size_t i = 1;
        while (i + 1 < nodes.size() && s > static_cast<long double>(nodes[i])) ++i;
        const long double w0 = nodes[i - 1], w1 = nodes[i];
        const long double lam = (s - w0) / (w1 - w0);
        const long double a = (1.0L - lam) * static_cast<long double>(values[i - 1]) +
                              lam * static_cast<long double>(values[i]);
        return a >= 0.0L ? a : mu * a;
    };
}

SignedInterval WeightSpec::positive_hump(int index_i, int shift_ell) const {
    for (const SignedInterval& s : humps_)
        if (s.sign > 0 && s.index_i == index_i) return s.shifted(shift_ell, period_);
    throw Error("positive_hump: no positive hump with index " + std::to_string(index_i));
}

std::vector<double> WeightSpec::hump_boundaries_on(double t0, double t1) const {
    std::vector<double> pts;
    if (humps_.empty()) return pts;
    const int ell_lo = static_cast<int>(std::floor(t0 / period_)) - 1;
    const int ell_hi = static_cast<int>(std::ceil(t1 / period_)) + 1;
    for (int ell = ell_lo; ell <= ell_hi; ++ell)
        for (const SignedInterval& s : humps_) {
            for (double b : {s.lo + ell * period_, s.hi + ell * period_})
                if (b > t0 && b < t1) pts.push_back(b);
        }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double eval_weight(const WeightSpec& w, double t) { return w.eval(t); }

std::vector<SignedInterval> decompose_humps(const WeightSpec& w, double sign_tol) {
    const auto f = [&w](double t) { return w.base(t); };
    const double T = w.period();

    std::vector<double> zs;
    if (w.kind() == WeightSpec::Kind::table) {
        // sign changes tracked over nodes; crossings are exact on strict
        // pieces, plateau boundaries are placed mid-plateau and fixed below
        const auto& tn = w.table_nodes();
        const auto& tv = w.table_values();
        int prev_sign = 0;
        double prev_t = 0.0;
        std::size_t prev_i = 0;
        for (std::size_t i = 0; i < tn.size(); ++i) {
            const int s = sign_of(tv[i]);
            if (s == 0) continue;
            if (prev_sign != 0 && s != prev_sign) {
                if (i == prev_i + 1) {
                    const double v0 = tv[prev_i], v1 = tv[i];
                    zs.push_back(prev_t + (tn[i] - prev_t) * (0.0 - v0) / (v1 - v0));
                } else {
                    zs.push_back(0.5 * (prev_t + tn[i]));
                }
            }
            prev_sign = s;
            prev_t = tn[i];
            prev_i = i;
        }
        const int s_begin = sign_of(w.base(1e-13 * T));
        const int s_end = sign_of(w.base(T * (1.0 - 1e-13)));
        if (s_begin != 0 && s_end != 0 && s_begin != s_end)
            if (zs.empty() || zs.front() > sign_tol) zs.insert(zs.begin(), 0.0);
        std::sort(zs.begin(), zs.end());
    } else {
        const std::size_t grid = std::max<std::size_t>(4096, static_cast<std::size_t>(64 * w.freq()));
        zs = find_crossings(f, T, grid, sign_tol);
    }

    if (zs.empty())
        throw NoSignChangeError("weight has a single sign on its period (hypothesis (q_*) fails)");
    if (zs.size() % 2 != 0)
        throw Error("decompose_humps: odd number of sign changes on one period");

    for (double& z : zs) z = shrink_past_plateau(f, z, 0.45 * T, sign_tol);
    std::sort(zs.begin(), zs.end());

    // intervals between consecutive crossings; the piece before the first
    // crossing wraps around to join the piece after the last one
    std::vector<SignedInterval> out;
    const bool starts_on_crossing = zs.front() <= sign_tol;
    const std::size_t n = zs.size();
    for (std::size_t i = 0; i < n; ++i) {
        SignedInterval s;
        s.lo = zs[i];
        s.hi = (i + 1 < n) ? zs[i + 1] : (starts_on_crossing ? T : zs.front() + T);
        s.sign = sign_of(f(0.5 * (s.lo + std::min(s.hi, s.lo + T))));
        if (s.sign == 0) s.sign = sign_of(f(s.lo + 0.25 * (s.hi - s.lo)));
        out.push_back(s);
    }
    if (!starts_on_crossing) {
        // rotate so the list is ordered by lo after the wrap interval is formed
        std::sort(out.begin(), out.end(),
                  [](const SignedInterval& a, const SignedInterval& b) { return a.lo < b.lo; });
    }

    // alternation and indexing
    int pos = 0, neg = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].sign == 0) throw Error("decompose_humps: could not determine hump sign");
        if (i > 0 && out[i].sign == out[i - 1].sign)
            throw Error("decompose_humps: humps do not alternate in sign");
        if (out[i].sign > 0)
            out[i].index_i = ++pos;
        else
            out[i].index_i = ++neg;
        out[i].shift_ell = 0;
    }
    if (pos != neg) throw Error("decompose_humps: unbalanced hump counts over one period");
    return out;
}

double mean_value(const WeightSpec& w, int k) {
    if (k < 1) throw BadParamsError("mean_value: k must be >= 1");
    const double T = w.period();
    if (w.kind() == WeightSpec::Kind::table) {
        // refine the node list with the sign crossings, then trapezoid q exactly
        std::vector<double> t(w.table_nodes());
        for (const SignedInterval& s : w.humps()) {
            t.push_back(std::min(s.lo, T));
            t.push_back(std::min(s.hi, T));
        }
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                t.end());
        std::vector<double> q(t.size());
        double one_period = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) q[i] = w.eval(std::min(t[i], T * (1 - 1e-16)));
        one_period = integrate_trapezoid_breakpoints(t, q);
        return k * one_period;
    }
    const auto q = [&w](double t) { return w.eval(t); };
    const std::vector<double> splits = w.hump_boundaries_on(0.0, k * T);
    return integrate_adaptive_split(q, 0.0, k * T, splits, 1e-12 * k);
}

double mu_sharp(const WeightSpec& w) {
    const double T = w.period();
    double pos = 0.0, neg = 0.0;
    if (w.kind() == WeightSpec::Kind::table) {
        std::vector<double> t(w.table_nodes());
        for (const SignedInterval& s : w.humps()) {
            t.push_back(std::min(s.lo, T));
            t.push_back(std::min(s.hi, T));
        }
        std::sort(t.begin(), t.end());
        t.erase(std::unique(t.begin(), t.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-14; }),
                t.end());
        std::vector<double> vp(t.size()), vn(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double a = w.base(std::min(t[i], T * (1 - 1e-16)));
            vp[i] = std::max(a, 0.0);
            vn[i] = std::max(-a, 0.0);
        }
        pos = integrate_trapezoid_breakpoints(t, vp);
        neg = integrate_trapezoid_breakpoints(t, vn);
    } else {
        const auto ap = [&w](double t) { return std::max(w.base(t), 0.0); };
        const auto an = [&w](double t) { return std::max(-w.base(t), 0.0); };
        const std::vector<double> splits = w.hump_boundaries_on(0.0, T);
        pos = integrate_adaptive_split(ap, 0.0, T, splits, 1e-13);
        neg = integrate_adaptive_split(an, 0.0, T, splits, 1e-13);
    }
    if (neg <= 1e-14 * (1.0 + pos))
        throw DefiniteWeightError("mu_sharp: the negative part of the weight vanishes");
    return pos / neg;
}

}  // namespace subh
