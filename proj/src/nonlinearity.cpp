#include "subh/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subh {

namespace {

Nonlinearity make_power(double p) {
    if (!(p > 1.0)) throw BadParamsError("power nonlinearity needs p > 1");
    Nonlinearity n;
    n.kind = "power";
    n.params = {p};
    n.g = [p](double s) { return std::pow(s, p); };
    n.dg = [p](double s) { return p * std::pow(s, p - 1.0); };
    n.ddg = [p](double s) { return p * (p - 1.0) * std::pow(s, p - 2.0); };
    const long double pl = p;
    n.g_hp = [pl](long double s) { return std::pow(s, pl); };
    n.dg_hp = [pl](long double s) { return pl * std::pow(s, pl - 1.0L); };
    return n;
}

Nonlinearity make_polymix(double c2, double c3) {
    if (c2 < 0.0 || c3 < 0.0 || (c2 == 0.0 && c3 == 0.0))
        throw BadParamsError("polymix nonlinearity needs nonnegative, not both zero, coefficients");
    Nonlinearity n;
    n.kind = "polymix";
    n.params = {c2, c3};
    n.g = [c2, c3](double s) { return s * s * (c2 + c3 * s); };
    n.dg = [c2, c3](double s) { return s * (2.0 * c2 + 3.0 * c3 * s); };
    n.ddg = [c2, c3](double s) { return 2.0 * c2 + 6.0 * c3 * s; };
    const long double c2l = c2, c3l = c3;
    n.g_hp = [c2l, c3l](long double s) { return s * s * (c2l + c3l * s); };
    n.dg_hp = [c2l, c3l](long double s) { return s * (2.0L * c2l + 3.0L * c3l * s); };
    return n;
}

Nonlinearity make_atan(double scale) {
    if (!(scale > 0.0)) throw BadParamsError("atan nonlinearity needs a positive scale");
    Nonlinearity n;
    n.kind = "atan";
    n.params = {scale};
    n.g = [scale](double s) { return scale * s * std::atan(s); };
    n.dg = [scale](double s) { return scale * (std::atan(s) + s / (1.0 + s * s)); };
    n.ddg = [scale](double s) {
        const double d = 1.0 + s * s;
        return 2.0 * scale / (d * d);
    };
    const long double sl = scale;
    n.g_hp = [sl](long double s) { return sl * s * std::atan(s); };
    n.dg_hp = [sl](long double s) { return sl * (std::atan(s) + s / (1.0L + s * s)); };
    return n;
}

Nonlinearity make_table(const std::vector<double>& params) {
    if (params.size() < 4 || params.size() % 2 != 0)
        throw BadParamsError("table nonlinearity needs (s, g) pairs, at least two");
    std::vector<double> s, v;
    for (std::size_t i = 0; i < params.size(); i += 2) {
        s.push_back(params[i]);
        v.push_back(params[i + 1]);
    }
    if (s.front() != 0.0 || v.front() != 0.0)
        throw BadParamsError("table nonlinearity must start at (0, 0)");
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (!(s[i + 1] > s[i])) throw BadParamsError("table nonlinearity nodes must increase");
    auto interp = [s, v](double x) {
        if (x <= s.front()) return v.front();
        const auto it = std::upper_bound(s.begin(), s.end(), x);
        std::size_t i = static_cast<std::size_t>(it - s.begin());
        if (i >= s.size()) {  // linear extrapolation with the last slope
            const double slope = (v[s.size() - 1] - v[s.size() - 2]) / (s[s.size() - 1] - s[s.size() - 2]);
            return v.back() + slope * (x - s.back());
        }
        const double lam = (x - s[i - 1]) / (s[i] - s[i - 1]);
        return (1.0 - lam) * v[i - 1] + lam * v[i];
    };
    auto slope_at = [s, v](double x) {
        std::size_t i = 1;
        while (i + 1 < s.size() && x >= s[i]) ++i;
        return (v[i] - v[i - 1]) / (s[i] - s[i - 1]);
    };
    Nonlinearity n;
    n.kind = "table";
    n.params = params;
    n.g = interp;
    n.dg = slope_at;
    n.ddg = [](double) { return 0.0; };
    return n;
}

}  // namespace

Nonlinearity make_nonlinearity(const std::string& kind, const std::vector<double>& params) {
    if (kind == "power") {
        if (params.size() != 1) throw BadParamsError("power nonlinearity takes one parameter");
        return make_power(params[0]);
    }
    if (kind == "polymix") {
        if (params.size() != 2) throw BadParamsError("polymix nonlinearity takes two parameters");
        return make_polymix(params[0], params[1]);
    }
    if (kind == "atan") {
        if (params.size() != 1) throw BadParamsError("atan nonlinearity takes one parameter");
        return make_atan(params[0]);
    }
    if (kind == "table") return make_table(params);
    throw BadParamsError("unknown nonlinearity kind: " + kind);
}

HypothesisReport check_hypotheses(const Nonlinearity& n, const HypothesisGrid& grid) {
    HypothesisReport rep;

    std::vector<double> ss;
    const double decades = std::log10(grid.s_max / grid.s_min);
    const int np = std::max(2, static_cast<int>(decades * grid.points_per_decade));
    for (int i = 0; i <= np; ++i)
        ss.push_back(grid.s_min * std::pow(grid.s_max / grid.s_min, double(i) / np));

    rep.positive = std::abs(n.g(0.0)) < 1e-14;
    for (double s : ss)
        if (!(n.g(s) > 0.0)) rep.positive = false;

    const double h0 = 1e-10;
    rep.dg0_estimate = (n.g(h0) - n.g(0.0)) / h0;
    rep.superlinear_at_zero = std::abs(rep.dg0_estimate) < 1e-6;

    rep.convex = true;
    for (double s : ss)
        if (!(n.ddg(s) > 0.0)) rep.convex = false;

    // liminf proxy: smallest g(s)/s over the top two decades of the grid
    double liminf = std::numeric_limits<double>::infinity();
    for (double s : ss)
        if (s >= grid.s_max * 1e-2) liminf = std::min(liminf, n.g(s) / s);
    rep.liminf_proxy = liminf;

    // growth of g(s)/s over the top two decades decides the at-infinity flag
    const double r_top = n.g(grid.s_max) / grid.s_max;
    const double r_mid = n.g(grid.s_max * 1e-2) / (grid.s_max * 1e-2);
    rep.superlinear_at_infinity = r_top > 10.0 * r_mid;

    return rep;
}

double ExtendedField::force(double t, double s) const {
    if (raw) return q(t) * base.g(s);
    if (!truncation_R) {
        if (s <= 0.0) return -s;
        return q(t) * base.g(s);
    }
    const double R = *truncation_R;
    if (s < 0.0) return 0.0;
    if (s <= R) return q(t) * base.g(s);
    return q(t) * (base.g(R) + base.dg(R) * (s - R));
}

double ExtendedField::force_slope(double t, double s) const {
    if (raw) return q(t) * base.dg(s);
    if (!truncation_R) {
        if (s < 0.0) return -1.0;
        return q(t) * base.dg(s);
    }
    const double R = *truncation_R;
    if (s < 0.0) return 0.0;
    if (s <= R) return q(t) * base.dg(s);
    return q(t) * base.dg(R);
}

std::pair<double, double> field_eval(const ExtendedField& F, double t, double s, double sp) {
    return {sp, -F.friction_c * sp - F.force(t, s)};
}

long double ExtendedField::force_hp(long double t, long double s) const {
    const auto qv = [&](long double tt) -> long double {
        return q_hp ? q_hp(tt) : static_cast<long double>(q(static_cast<double>(tt)));
    };
    const auto gv = [&](long double ss) -> long double {
        return base.g_hp ? base.g_hp(ss) : static_cast<long double>(base.g(static_cast<double>(ss)));
    };
    const auto dgv = [&](long double ss) -> long double {
        return base.dg_hp ? base.dg_hp(ss)
                          : static_cast<long double>(base.dg(static_cast<double>(ss)));
    };
    if (raw) return qv(t) * gv(s);
    if (!truncation_R) {
        if (s <= 0.0L) return -s;
        return qv(t) * gv(s);
    }
    const long double R = *truncation_R;
    if (s < 0.0L) return 0.0L;
    if (s <= R) return qv(t) * gv(s);
    return qv(t) * (gv(R) + dgv(R) * (s - R));
}

long double ExtendedField::force_slope_hp(long double t, long double s) const {
    const auto qv = [&](long double tt) -> long double {
        return q_hp ? q_hp(tt) : static_cast<long double>(q(static_cast<double>(tt)));
    };
    const auto dgv = [&](long double ss) -> long double {
        return base.dg_hp ? base.dg_hp(ss)
                          : static_cast<long double>(base.dg(static_cast<double>(ss)));
    };
    if (raw) return qv(t) * dgv(s);
    if (!truncation_R) {
        if (s < 0.0L) return -1.0L;
        return qv(t) * dgv(s);
    }
    const long double R = *truncation_R;
    if (s < 0.0L) return 0.0L;
    if (s <= R) return qv(t) * dgv(s);
    return qv(t) * dgv(R);
}

}  // namespace subh
