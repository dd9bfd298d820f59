#include "subh/quadrature.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace subh {

namespace {

double simpson(double fa, double fm, double fb, double h) {
    return h / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double b, double fa, double fm,
             double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson(fa, flm, fm, m - a);
    const double right = simpson(fm, frm, fb, b - m);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = simpson(fa, fm, fb, b - a);
    return adapt(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

double integrate_adaptive_split(const std::function<double(double)>& f, double a, double b,
                                std::span<const double> breakpoints, double abs_tol) {
    std::vector<double> pts;
    pts.push_back(a);
    for (double t : breakpoints)
        if (t > a && t < b) pts.push_back(t);
    pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    double total = 0.0;
    const double piece_tol = abs_tol / static_cast<double>(pts.size() - 1);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        total += integrate_adaptive(f, pts[i], pts[i + 1], piece_tol);
    return total;
}

double integrate_simpson_fixed(const std::function<double(double)>& f, double a, double b,
                               std::size_t n) {
    if (n % 2) ++n;
    if (n < 2) n = 2;
    const double h = (b - a) / static_cast<double>(n);
    double sum = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i)
        sum += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

double integrate_trapezoid_breakpoints(std::span<const double> t, std::span<const double> v) {
    if (t.size() != v.size() || t.size() < 2)
        throw std::invalid_argument("trapezoid: need matching node/value lists of size >= 2");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        assert(t[i + 1] > t[i]);
        total += 0.5 * (v[i] + v[i + 1]) * (t[i + 1] - t[i]);
    }
    return total;
}

}  // namespace subh
