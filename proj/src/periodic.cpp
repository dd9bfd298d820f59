#include "subh/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "subh/quadrature.hpp"

namespace subh {

namespace {

double fold(double t, double period) {
    double s = t - period * std::floor(t / period);
    if (s < 0.0) s += period;
    if (s >= period) s -= period;
    return s;
}

/// Maximum of a dense trajectory's u over [lo, hi] (folded into [0, kT]):
/// coarse sampling plus golden-section refinement around the best sample.
double max_u_on(const Trajectory& tr, double lo, double hi, double period) {
    constexpr int kSamples = 256;
    double best_t = lo, best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kSamples; ++i) {
        const double t = lo + (hi - lo) * i / double(kSamples);
        const double u = tr.eval(fold(t, period))[0];
        if (u > best) {
            best = u;
            best_t = t;
        }
    }
    const double dt = (hi - lo) / kSamples;
    double a = std::max(lo, best_t - dt), b = std::min(hi, best_t + dt);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = tr.eval(fold(c, period))[0], fd = tr.eval(fold(d, period))[0];
    for (int it = 0; it < 60 && (b - a) > 1e-13 * (1.0 + std::abs(b)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = tr.eval(fold(c, period))[0];
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = tr.eval(fold(d, period))[0];
        }
    }
    return std::max(best, std::max(fc, fd));
}

}  // namespace

HumpString HumpString::from_string(const std::string& s) {
    HumpString h;
    for (char ch : s) {
        if (ch != '0' && ch != '1') throw Error("HumpString: only '0'/'1' characters allowed");
        h.bits.push_back(ch == '1' ? 1 : 0);
    }
    return h;
}

bool HumpString::any() const {
    for (auto b : bits)
        if (b) return true;
    return false;
}

std::string HumpString::str() const {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

HumpString canonical_block_rotation(const HumpString& s, int m) {
    if (m <= 0 || s.bits.empty() || s.bits.size() % static_cast<std::size_t>(m) != 0)
        throw Error("canonical_block_rotation: string length must be a multiple of m");
    const std::size_t k = s.bits.size() / static_cast<std::size_t>(m);
    HumpString best = s;
    for (std::size_t r = 1; r < k; ++r) {
        HumpString rot;
        rot.bits.reserve(s.bits.size());
        for (std::size_t j = 0; j < s.bits.size(); ++j)
            rot.bits.push_back(s.bits[(j + r * m) % s.bits.size()]);
        if (rot < best) best = rot;
    }
    return best;
}

double PeriodicOrbit::u_at(double t) const { return trajectory.eval(fold(t, period()))[0]; }
double PeriodicOrbit::up_at(double t) const { return trajectory.eval(fold(t, period()))[1]; }
double PeriodicOrbit::period() const { return trajectory.times.back() - trajectory.times.front(); }

std::vector<PlanarState> seed_guesses(const WeightSpec& w, const Nonlinearity& /*n*/, int k,
                                      const HumpString& S, const SeedOptions& opt) {
    const int m = w.num_positive_humps();
    if (m == 0) throw NoSignChangeError("seed_guesses: weight has no positive humps");
    if (S.size() != static_cast<std::size_t>(k * m))
        throw Error("seed_guesses: string length must be k*m");
    if (!S.any()) throw Error("seed_guesses: the all-zero string codes no solution");

    const double T = w.period();
    const double kT = k * T;

    // bump centers over [0, kT), one per positivity hump, in bit order
    std::vector<double> centers(static_cast<std::size_t>(k) * m);
    for (int ell = 0; ell < k; ++ell)
        for (int i = 1; i <= m; ++i) {
            const SignedInterval J = w.positive_hump(i, ell);
            centers[static_cast<std::size_t>(ell) * m + (i - 1)] = fold(J.mid(), kT);
        }
    std::vector<std::size_t> order(centers.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return centers[a] < centers[b]; });

    // cos^2 bumps on supports stretched past the tile midlines, so every
    // hump's amplitude leaks into the profile at t = 0 and different strings
    // give different seeds
    const std::size_t n = centers.size();
    constexpr double kStretch = 1.6;
    auto profile_at_zero = [&](double A, double eps) -> PlanarState {
        double u0 = 0.0, v0 = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            const double c = centers[order[p]];
            const double c_prev = (p == 0) ? centers[order[n - 1]] - kT : centers[order[p - 1]];
            const double c_next = (p + 1 == n) ? centers[order[0]] + kT : centers[order[p + 1]];
            const double amp = (S.bits[order[p]] ? A : eps * A);
            // circular distance from t = 0 to this center
            double d = -c - kT * std::floor((-c) / kT + 0.5);
            const double half = (d < 0.0 ? (c - c_prev) : (c_next - c)) * 0.5 * kStretch;
            if (std::abs(d) >= half) continue;
            const double x = std::numbers::pi / 2.0 * d / half;
            u0 += amp * std::cos(x) * std::cos(x);
            v0 += -amp * std::sin(2.0 * x) * std::numbers::pi / (2.0 * half);
        }
        return {u0, v0};
    };

    std::vector<PlanarState> seeds;
    for (double A : opt.amplitudes)
        for (double eps : opt.epsilons) seeds.push_back(profile_at_zero(A, eps));

    bool all_ones = true;
    for (auto b : S.bits) all_ones = all_ones && b;
    if (all_ones)
        for (double A : opt.amplitudes) seeds.push_back({A, 0.0});

    // drop duplicates introduced by strings whose bit at the t=0 support repeats
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end(),
                            [](const PlanarState& a, const PlanarState& b) {
                                return std::abs(a[0] - b[0]) < 1e-12 && std::abs(a[1] - b[1]) < 1e-12;
                            }),
                seeds.end());
    return seeds;
}

ShootResult newton_shoot(const ExtendedField& F, const PlanarState& y0, int k,
                         const ShootOptions& opt) {
    ShootResult out;
    const double kT = k * F.period_T;
    const double a = opt.t_anchor;

    DynamicsOptions dyn;
    dyn.tol = opt.integrate_tol;
    dyn.escape = opt.escape;

    PlanarState y = y0;
    PlanarState Py;
    MonodromyData M;
    double res;

    auto eval_full = [&](const PlanarState& z) {
        auto [pz, mz] = poincare_map(F, z, k, dyn, a);
        return std::pair{pz, mz};
    };
    auto residual_of = [&](const PlanarState& z) {
        const PlanarState pz = flow_endpoint(F, z, a, a + kT, dyn);
        return std::hypot(pz[0] - z[0], pz[1] - z[1]);
    };

    try {
        std::tie(Py, M) = eval_full(y);
        res = std::hypot(Py[0] - y[0], Py[1] - y[1]);

        for (int iter = 0; iter <= opt.max_iter; ++iter) {
            if (res < opt.newton_tol) {
                out.status = ShootStatus::converged;
                out.iterations = iter;
                out.final_residual = res;
                break;
            }
            if (iter == opt.max_iter) {
                out.status = ShootStatus::no_convergence;
                out.final_residual = res;
                break;  // keep the last iterate; the caller judges it
            }

            const double j11 = M.m11 - 1.0, j12 = M.m12, j21 = M.m21, j22 = M.m22 - 1.0;
            const double det = j11 * j22 - j12 * j21;
            if (std::abs(det) < 1e-12) {
                out.status = ShootStatus::singular_jacobian;
                out.final_residual = res;
                return out;
            }
            const double g1 = Py[0] - y[0], g2 = Py[1] - y[1];
            const PlanarState step{(-g1 * j22 + g2 * j12) / det, (g1 * j21 - g2 * j11) / det};

            bool accepted = false;
            double alpha = 1.0;
            for (int d = 0; d <= opt.max_damping; ++d, alpha *= 0.5) {
                const PlanarState yt{y[0] + alpha * step[0], y[1] + alpha * step[1]};
                double rt;
                try {
                    rt = residual_of(yt);
                } catch (const BlowUpError&) {
                    continue;
                } catch (const StepUnderflowError&) {
                    continue;
                }
                if (rt < res) {
                    y = yt;
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                out.status = ShootStatus::no_convergence;
                out.final_residual = res;
                break;  // often a stall at the integrator noise floor
            }
            std::tie(Py, M) = eval_full(y);
            res = std::hypot(Py[0] - y[0], Py[1] - y[1]);
        }
    } catch (const BlowUpError&) {
        out.status = ShootStatus::blow_up;
        return out;
    } catch (const StepUnderflowError&) {
        out.status = ShootStatus::step_underflow;
        return out;
    }

    // extended-precision Newton tail: a couple of steps through the
    // long double map resolve the fixed point past the double round-off
    // amplification of stiff monodromies, and the residual reported below is
    // measured at that precision for the rounded double state
    double hp_residual = -1.0;
    if (opt.hp_refine) {
        try {
            PlanarStateHP yl{y[0], y[1]};
            PlanarStateHP best_y = yl;
            long double best = std::numeric_limits<long double>::infinity();
            for (int it = 0; it < 5; ++it) {
                auto [Pl, Ml] = poincare_map_hp(F, yl, k, opt.hp_tol, opt.escape, a);
                const long double rl = std::hypot(Pl[0] - yl[0], Pl[1] - yl[1]);
                if (rl < best) {
                    best = rl;
                    best_y = yl;
                }
                if (rl < 1e-14L) break;
                const long double j11 = Ml.m11 - 1.0L, j12 = Ml.m12, j21 = Ml.m21,
                                  j22 = Ml.m22 - 1.0L;
                const long double det = j11 * j22 - j12 * j21;
                if (std::abs(det) < 1e-14L) break;
                const long double g1 = Pl[0] - yl[0], g2 = Pl[1] - yl[1];
                yl[0] += (-g1 * j22 + g2 * j12) / det;
                yl[1] += (g1 * j21 - g2 * j11) / det;
            }
            y = PlanarState{static_cast<double>(best_y[0]), static_cast<double>(best_y[1])};
            auto [Pd, Md] =
                poincare_map_hp(F, PlanarStateHP{y[0], y[1]}, k, opt.hp_tol, opt.escape, a);
            hp_residual = static_cast<double>(
                std::hypot(Pd[0] - static_cast<long double>(y[0]),
                           Pd[1] - static_cast<long double>(y[1])));
            M = Md;
            if (hp_residual < opt.newton_tol && out.status == ShootStatus::no_convergence)
                out.status = ShootStatus::converged;
            if (a != 0.0) hp_residual = -1.0;  // the bridged state is re-measured below
        } catch (const Error&) {
            // fall back to the double-precision result
        }
    }

    // re-anchor to t = 0, then do the classification-grade re-integration
    DynamicsOptions tight = dyn;
    tight.tol = opt.classify_tol;
    PeriodicOrbit orbit;
    orbit.order_k = k;
    orbit.monodromy = M;
    try {
        PlanarState y_origin = y;
        if (a != 0.0) {
            // the state at t = kT (== 0 mod kT) lies on the anchored stretch
            const Trajectory bridge = integrate(F, y, a, a + kT, tight);
            if (bridge.blow_up) {
                out.status = ShootStatus::blow_up;
                return out;
            }
            y_origin = bridge.eval(std::ceil(a / kT) * kT);
        }
        orbit.y0 = y_origin;
        orbit.trajectory = integrate(F, y_origin, 0.0, kT, tight);
    } catch (const StepUnderflowError&) {
        out.status = ShootStatus::step_underflow;
        return out;
    }
    if (orbit.trajectory.blow_up) {
        out.status = ShootStatus::blow_up;
        return out;
    }
    // the reported residual is |P_kT(y0) - y0|. With the section at t = 0 it
    // is the Newton iteration's own converged measure (the augmented system
    // resolves the flow sharper than a fresh planar mesh); re-anchored
    // states get re-measured by the flow at the working tolerance.
    if (hp_residual >= 0.0) {
        orbit.residual = hp_residual;
        out.final_residual = hp_residual;
    } else if (a == 0.0) {
        orbit.residual = out.final_residual;
    } else {
        try {
            const PlanarState pe = flow_endpoint(F, orbit.y0, 0.0, kT, dyn);
            orbit.residual = std::hypot(pe[0] - orbit.y0[0], pe[1] - orbit.y0[1]);
        } catch (const Error&) {
            const PlanarState ye = orbit.trajectory.y_end();
            orbit.residual = std::hypot(ye[0] - orbit.y0[0], ye[1] - orbit.y0[1]);
        }
    }

    double mn = std::numeric_limits<double>::infinity(), mx = -mn;
    const int ns = 2048 * k;
    for (int i = 0; i <= ns; ++i) {
        const double u = orbit.trajectory.eval(kT * i / double(ns))[0];
        mn = std::min(mn, u);
        mx = std::max(mx, u);
    }
    orbit.min_u = mn;
    orbit.max_u = mx;

    out.orbit = std::move(orbit);
    out.orbit_built = true;
    return out;
}

std::vector<double> hump_maxima(const PeriodicOrbit& orbit, const WeightSpec& w) {
    const int m = w.num_positive_humps();
    const int k = orbit.order_k;
    const double kT = orbit.period();
    std::vector<double> out(static_cast<std::size_t>(k) * m);
    for (int ell = 0; ell < k; ++ell)
        for (int i = 1; i <= m; ++i) {
            const SignedInterval J = w.positive_hump(i, ell);
            out[static_cast<std::size_t>(ell) * m + (i - 1)] =
                max_u_on(orbit.trajectory, J.lo, J.hi, kT);
        }
    return out;
}

Thresholds select_thresholds(const std::vector<double>& pooled_maxima) {
    if (pooled_maxima.empty()) throw Error("select_thresholds: no maxima to work with");
    std::vector<double> v = pooled_maxima;
    std::sort(v.begin(), v.end());
    Thresholds th;
    th.R = 2.0 * v.back();
    if (v.front() <= 0.0) throw Error("select_thresholds: nonpositive hump maximum");

    double best_ratio = 1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        const double ratio = v[i + 1] / v[i];
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best_i = i;
        }
    }
    if (best_ratio < 3.0) {
        // single cluster: everything counts as a large hump
        th.r = 0.5 * v.front();
        return th;
    }
    th.r = std::sqrt(v[best_i] * v[best_i + 1]);
    return th;
}

HumpString classify_string(PeriodicOrbit& orbit, const WeightSpec& w, double r, double R,
                           double delta) {
    orbit.max_per_hump = hump_maxima(orbit, w);
    HumpString s;
    for (double mx : orbit.max_per_hump) {
        if (mx > R)
            throw ExceedsRError("classify_string: hump maximum " + std::to_string(mx) +
                                " exceeds R = " + std::to_string(R));
        if (mx >= r * (1.0 - delta) && mx <= r * (1.0 + delta))
            throw AmbiguousClassificationError("classify_string: hump maximum " +
                                               std::to_string(mx) + " inside the band around r = " +
                                               std::to_string(r));
        s.bits.push_back(mx > r ? 1 : 0);
    }
    orbit.string = s;
    return s;
}

bool minimal_order(const PeriodicOrbit& orbit, double tol) {
    const int k = orbit.order_k;
    if (k == 1) return true;
    const double T = orbit.period() / k;
    const int ns = 1024 * k;
    for (int ell = 1; ell < k; ++ell) {
        if (k % ell != 0) continue;  // a period ell*T with ell not dividing k would
                                     // force a gcd(ell,k)*T period, so divisors suffice
        double worst = 0.0;
        for (int i = 0; i < ns; ++i) {
            const double t = orbit.period() * i / double(ns);
            worst = std::max(worst, std::abs(orbit.u_at(t) - orbit.u_at(t + ell * T)));
        }
        if (worst <= 10.0 * tol) return false;
    }
    return true;
}

std::vector<PeriodicityClass> dedup_classes(std::vector<PeriodicOrbit>& orbits, double tol) {
    if (orbits.empty()) return {};
    const int k = orbits.front().order_k;
    for (const PeriodicOrbit& o : orbits)
        if (o.order_k != k) throw Error("dedup_classes: all orbits must share the same k");
    const double kT = orbits.front().period();
    const double T = kT / k;
    const int ns = 512 * k;

    auto shift_distance = [&](const PeriodicOrbit& a, const PeriodicOrbit& b, int ell) {
        double worst = 0.0;
        for (int i = 0; i < ns; ++i) {
            const double t = kT * i / double(ns);
            worst = std::max(worst, std::abs(a.u_at(t) - b.u_at(t + ell * T)));
            if (worst >= tol) return worst;  // early out
        }
        return worst;
    };
    auto same_class = [&](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        for (int ell = 0; ell < k; ++ell)
            if (shift_distance(a, b, ell) < tol) return true;
        return false;
    };

    std::vector<int> label(orbits.size(), -1);
    std::vector<PeriodicityClass> classes;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        if (label[i] >= 0) continue;
        PeriodicityClass cl;
        cl.members.push_back(i);
        label[i] = static_cast<int>(classes.size());
        for (std::size_t j = i + 1; j < orbits.size(); ++j)
            if (label[j] < 0 && same_class(orbits[i], orbits[j])) {
                label[j] = label[i];
                cl.members.push_back(j);
            }
        classes.push_back(std::move(cl));
    }

    // canonical string, representative, deterministic ordering
    const int m = static_cast<int>(orbits.front().string.size()) / std::max(1, k);
    for (PeriodicityClass& cl : classes) {
        cl.canonical = canonical_block_rotation(orbits[cl.members.front()].string, m);
        cl.representative = cl.members.front();
        for (std::size_t idx : cl.members) {
            if (orbits[idx].string == cl.canonical &&
                (orbits[cl.representative].string != cl.canonical ||
                 orbits[idx].y0 < orbits[cl.representative].y0))
                cl.representative = idx;
        }
        cl.minimal = orbits[cl.representative].minimal;
    }
    std::sort(classes.begin(), classes.end(), [&](const PeriodicityClass& a, const PeriodicityClass& b) {
        if (a.canonical.str() != b.canonical.str()) return a.canonical.str() < b.canonical.str();
        return orbits[a.representative].y0 < orbits[b.representative].y0;
    });
    for (std::size_t c = 0; c < classes.size(); ++c) {
        classes[c].id = static_cast<int>(c);
        for (std::size_t idx : classes[c].members) orbits[idx].class_id = classes[c].id;
    }
    return classes;
}

std::pair<double, double> necessary_condition_residuals(const PeriodicOrbit& orbit,
                                                        const WeightSpec& w,
                                                        const Nonlinearity& n) {
    const double kT = orbit.period();
    return necessary_condition_residuals(orbit, w.coefficient(), mean_value(w, orbit.order_k),
                                         w.hump_boundaries_on(0.0, kT), n);
}

std::pair<double, double> necessary_condition_residuals(const PeriodicOrbit& orbit,
                                                        const std::function<double(double)>& q,
                                                        double q_integral_kT,
                                                        const std::vector<double>& splits,
                                                        const Nonlinearity& n) {
    const int k = orbit.order_k;
    const double kT = orbit.period();

    const auto f1 = [&](double t) { return q(t) * n.g(orbit.u_at(t)); };
    const double I1 = integrate_adaptive_split(f1, 0.0, kT, splits, 1e-10 * k);

    const auto f2 = [&](double t) {
        const double u = orbit.u_at(t);
        const double up = orbit.up_at(t);
        const double g = n.g(u);
        const double r = up / g;
        return r * r * n.dg(u);
    };
    const double I2 = integrate_adaptive_split(f2, 0.0, kT, splits, 1e-10 * k);
    return {std::abs(I1), std::abs(q_integral_kT + I2)};
}

}  // namespace subh
