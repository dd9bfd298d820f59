#include "subh/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace subh {

namespace {

// ---------------------------------------------------------------- config --

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

int thread_count(const RunConfig& cfg) {
    if (cfg.threads > 0) return cfg.threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return static_cast<int>(std::min(hc == 0 ? 1u : hc, 8u));
}

/// Index-parallel loop; results must be written to per-index slots so the
/// outcome does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int nw = std::min<std::size_t>(threads, n);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace

RunConfig preset_config(const std::string& name) {
    RunConfig cfg;
    if (name == "fig1") {
        cfg.weight_kind = "sin";
        cfg.weight_freq = 3.0;
        cfg.period = 1.0;
        cfg.mu = 10.0;
        cfg.g_kind = "atan";
        cfg.g_params = {400.0};
        cfg.k = 1;
        return cfg;
    }
    if (name == "fig2") {
        cfg.weight_kind = "sin";
        cfg.weight_freq = 1.0;
        cfg.period = 2.0 * 3.14159265358979323846;
        cfg.mu = 6.0;
        cfg.g_kind = "polymix";
        cfg.g_params = {100.0, 100.0};
        cfg.k = 2;
        return cfg;
    }
    throw ConfigError("unknown preset: " + name + " (expected fig1 or fig2)");
}

void apply_config_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    try {
        if (key == "weight.kind")
            cfg.weight_kind = value;
        else if (key == "weight.freq")
            cfg.weight_freq = std::stod(value);
        else if (key == "weight.period")
            cfg.period = std::stod(value);
        else if (key == "weight.mu")
            cfg.mu = std::stod(value);
        else if (key == "weight.table")
            cfg.weight_table = parse_list(value);
        else if (key == "nonlinearity.kind")
            cfg.g_kind = value;
        else if (key == "nonlinearity.params")
            cfg.g_params = parse_list(value);
        else if (key == "k")
            cfg.k = std::stoi(value);
        else if (key == "friction.c")
            cfg.friction_c = std::stod(value);
        else if (key == "tol.integration")
            cfg.tol_integration = std::stod(value);
        else if (key == "tol.newton")
            cfg.tol_newton = std::stod(value);
        else if (key == "tol.dedup")
            cfg.tol_dedup = std::stod(value);
        else if (key == "class.delta")
            cfg.class_delta = std::stod(value);
        else if (key == "class.r")
            cfg.r_override = std::stod(value);
        else if (key == "class.R")
            cfg.R_override = std::stod(value);
        else if (key == "seeds.amplitudes")
            cfg.seed_amplitudes = parse_list(value);
        else if (key == "seeds.epsilons")
            cfg.seed_epsilons = parse_list(value);
        else if (key == "seeds.grid_u")
            cfg.seed_grid_u = parse_list(value);
        else if (key == "seeds.grid_v")
            cfg.seed_grid_v = parse_list(value);
        else if (key == "escape")
            cfg.escape = std::stod(value);
        else if (key == "threads")
            cfg.threads = std::stoi(value);
        else if (key == "max_seed_rounds")
            cfg.max_seed_rounds = std::stoi(value);
        else if (key == "out.dir")
            cfg.out_dir = value;
        else if (key == "out.stride")
            cfg.csv_stride = std::stod(value);
        else
            throw ConfigError("unknown config key: " + key);
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad value for " + key + ": " + value);
    } catch (const std::out_of_range&) {
        throw ConfigError("value out of range for " + key + ": " + value);
    }
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        apply_config_override(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return base;
}

RunConfig parse_config_file(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), std::move(base));
}

void validate_config(const RunConfig& cfg) {
    if (cfg.weight_kind != "sin" && cfg.weight_kind != "table")
        throw ConfigError("weight.kind must be sin or table");
    if (cfg.period <= 0.0) throw ConfigError("weight.period must be positive");
    if (cfg.mu <= 0.0) throw ConfigError("weight.mu must be positive");
    if (cfg.k < 1) throw ConfigError("k must be >= 1");
    if (cfg.tol_integration <= 0.0 || cfg.tol_newton <= 0.0 || cfg.tol_dedup <= 0.0)
        throw ConfigError("tolerances must be positive");
    if (cfg.class_delta < 0.0 || cfg.class_delta >= 0.5)
        throw ConfigError("class.delta must lie in [0, 0.5)");
    if (cfg.escape <= 1.0) throw ConfigError("escape threshold must exceed 1");
}

// ----------------------------------------------------------------- solve --

namespace {

struct Seed {
    PlanarState y0{0.0, 0.0};
    double t_anchor = 0.0;  ///< section time of the shoot
    int string_id = -1;     ///< index into the target string list, -1 for grid seeds
};

std::vector<HumpString> enumerate_strings(int km) {
    std::vector<HumpString> out;
    if (km > 16) {
        // full enumeration infeasible; fall back to singletons plus all-ones
        for (int j = 0; j < km; ++j) {
            HumpString s(std::vector<std::uint8_t>(km, 0));
            s.bits[j] = 1;
            out.push_back(s);
        }
        out.push_back(HumpString::ones(km));
        return out;
    }
    for (std::uint32_t v = 1; v < (1u << km); ++v) {
        HumpString s;
        for (int j = km - 1; j >= 0; --j) s.bits.push_back((v >> j) & 1u);
        out.push_back(s);
    }
    return out;
}

/// Amplitude with g(A)/A equal to the target slope (bracket + bisection on
/// the increasing ratio of a convex g). Empty when g(s)/s stays below it.
std::optional<double> amplitude_for_slope(const Nonlinearity& g, double target) {
    auto ratio = [&](double s) { return g.g(s) / s; };
    double lo = 1e-8;
    if (ratio(lo) >= target) return std::nullopt;  // not superlinear at zero
    double hi = lo;
    while (ratio(hi) < target) {
        hi *= 4.0;
        if (hi > 1e9) return std::nullopt;  // bounded g(s)/s never reaches the target
    }
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Seed amplitudes from the instance's own scales: the solution maxima sit
/// where g(A)/A is comparable to the hump Dirichlet eigenvalues.
std::vector<double> derive_amplitudes(const WeightSpec& w, const Nonlinearity& g) {
    double lam = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= w.num_positive_humps(); ++i)
        lam = std::min(lam, dirichlet_eigenvalue(w, i));
    std::vector<double> amps;
    for (double c : {0.4, 0.7, 1.0, 1.4, 2.0, 3.0, 4.5, 7.0}) {
        const auto A = amplitude_for_slope(g, c * lam);
        if (A) amps.push_back(*A);
    }
    if (amps.empty()) amps = {0.05, 0.5, 5.0};
    // widen past the balance point: interactions push maxima both ways
    amps.push_back(amps.back() * 2.0);
    amps.push_back(amps.front() * 0.5);
    std::sort(amps.begin(), amps.end());
    return amps;
}

/// Reversible-shooting scan. The sine presets are even about every hump
/// center, so a kT-periodic solution symmetric about a center has u' = 0
/// both there and half a period later; sign changes of the half-period
/// velocity as a function of the start amplitude locate such orbits with a
/// 1-D bisection. (For table weights this is only a heuristic seeding; the
/// full-period Newton verifies every candidate regardless.)
std::vector<Seed> section_scan_seeds(const ExtendedField& F, const WeightSpec& w, int k,
                                     const std::vector<double>& amplitudes, int nthreads) {
    const double kT = k * F.period_T;
    std::vector<double> anchors;
    for (int ell = 0; ell < k; ++ell)
        for (const SignedInterval& s : w.humps()) anchors.push_back(s.mid() + ell * w.period());

    const double A_hi = 5.0 * amplitudes.back();
    const double A_lo = std::max(1e-12, 2e-4 * amplitudes.front());
    const int n_grid = 640;

    DynamicsOptions dyn;
    dyn.tol = 1e-10;

    // velocity half a period after starting flat at (A, 0)
    auto half_v = [&](double a, double A) -> std::optional<double> {
        try {
            return flow_endpoint(F, {A, 0.0}, a, a + 0.5 * kT, dyn)[1];
        } catch (const Error&) {
            return std::nullopt;
        }
    };

    std::vector<std::vector<Seed>> per_anchor(anchors.size());
    parallel_for(anchors.size(), nthreads, [&](std::size_t ai) {
        const double a = anchors[ai];
        auto bisect_root = [&](double lo, double hi, double flo) {
            for (int it = 0; it < 48; ++it) {
                const double mid = 0.5 * (lo + hi);
                const std::optional<double> fm = half_v(a, mid);
                if (!fm) break;
                if ((*fm) * flo <= 0.0)
                    hi = mid;
                else {
                    lo = mid;
                    flo = *fm;
                }
            }
            per_anchor[ai].push_back({PlanarState{0.5 * (lo + hi), 0.0}, a, -1});
        };

        std::vector<std::pair<double, std::optional<double>>> samples;
        for (int i = 0; i <= n_grid; ++i) {
            const double A = A_lo * std::pow(A_hi / A_lo, double(i) / n_grid);
            samples.emplace_back(A, half_v(a, A));
        }
        for (std::size_t i = 1; i < samples.size(); ++i) {
            const auto& [A0, f0] = samples[i - 1];
            const auto& [A1, f1] = samples[i];
            if (f0 && f1 && (*f0) * (*f1) < 0.0) bisect_root(A0, A1, *f0);
        }
        // root pairs can hide inside one grid cell around a local minimum of
        // |f|; re-scan those cells at finer resolution
        for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
            const auto& [A0, f0] = samples[i - 1];
            const auto& [A1, f1] = samples[i];
            const auto& [A2, f2] = samples[i + 1];
            if (!f0 || !f1 || !f2) continue;
            if ((*f0) * (*f1) < 0.0 || (*f1) * (*f2) < 0.0) continue;
            if (std::abs(*f1) >= std::abs(*f0) || std::abs(*f1) >= std::abs(*f2)) continue;
            double prev_A = A0;
            double prev_fv = *f0;
            bool prev_ok = true;
            for (int j = 1; j <= 32; ++j) {
                const double A = A0 * std::pow(A2 / A0, double(j) / 32.0);
                const std::optional<double> f = half_v(a, A);
                if (f && prev_ok && (*f) * prev_fv < 0.0) bisect_root(prev_A, A, prev_fv);
                if (f) {
                    prev_A = A;
                    prev_fv = *f;
                    prev_ok = true;
                } else {
                    prev_ok = false;
                }
            }
        }
    });

    std::vector<Seed> out;
    for (const auto& v : per_anchor) out.insert(out.end(), v.begin(), v.end());
    return out;
}

void add_eigen_ladder(std::vector<Seed>& seeds, const PeriodicOrbit& ref, int string_id) {
    const MonodromyData& M = ref.monodromy;
    const double scale = std::max(1e-12, std::hypot(ref.y0[0], ref.y0[1]));
    const double disc = M.trace() * M.trace() - 4.0 * M.det();
    std::vector<PlanarState> dirs;
    if (disc > 0.0) {
        for (double lam : {0.5 * (M.trace() + std::sqrt(disc)), 0.5 * (M.trace() - std::sqrt(disc))}) {
            PlanarState v{M.m12, lam - M.m11};
            if (std::abs(v[0]) + std::abs(v[1]) < 1e-12) v = {lam - M.m22, M.m21};
            const double nn = std::hypot(v[0], v[1]);
            if (nn > 1e-12) dirs.push_back({v[0] / nn, v[1] / nn});
        }
    }
    if (dirs.empty()) dirs = {{1.0, 0.0}, {0.0, 1.0}};
    seeds.push_back({ref.y0, 0.0, string_id});
    for (const PlanarState& d : dirs)
        for (double eta : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1})
            for (double sgn : {1.0, -1.0})
                seeds.push_back(
                    {PlanarState{ref.y0[0] + sgn * eta * scale * d[0],
                                 ref.y0[1] + sgn * eta * scale * d[1]},
                     0.0, string_id});
}

struct RawResult {
    ShootStatus status = ShootStatus::no_convergence;
    PlanarState y0{0.0, 0.0};
    double residual = std::numeric_limits<double>::infinity();
    bool candidate = false;  ///< an orbit worth polishing came out of the shot
};

}  // namespace

static SolveOutcome solve_instance(const WeightSpec& w, const Nonlinearity& g,
                                   const RunConfig& cfg, int k,
                                   const std::vector<PeriodicOrbit>* references) {
    SolveOutcome out;
    const int m = w.num_positive_humps();
    const int km = k * m;
    const int nthreads = thread_count(cfg);

    const ExtendedField field_f = ExtendedField::from_weight(w, g, std::nullopt, cfg.friction_c);

    ShootOptions coarse;
    coarse.newton_tol = std::max(cfg.tol_newton, 1e-8);
    coarse.integrate_tol = cfg.tol_integration;
    coarse.classify_tol = cfg.tol_integration;  // cheap trajectory; polished below
    coarse.escape = cfg.escape;

    ShootOptions fine = coarse;
    fine.newton_tol = std::max(cfg.tol_newton * 0.1, 1e-11);
    fine.integrate_tol = std::max(cfg.tol_integration * 1e-3, 1e-13);
    fine.classify_tol = std::max(cfg.tol_integration * 1e-4, 1e-14);
    fine.hp_refine = true;

    const std::vector<HumpString> targets = enumerate_strings(km);

    const std::vector<double> amplitudes =
        cfg.seed_amplitudes.empty() ? derive_amplitudes(w, g) : cfg.seed_amplitudes;
    SeedOptions seed_opt;
    seed_opt.amplitudes = amplitudes;
    seed_opt.epsilons = cfg.seed_epsilons;

    // velocity scale of a bump of the median amplitude over the narrowest hump
    double min_width = w.period();
    for (const SignedInterval& s : w.humps())
        if (s.sign > 0) min_width = std::min(min_width, s.width());
    const double v_scale =
        3.14159265358979323846 * amplitudes[amplitudes.size() / 2] / min_width;
    const std::vector<double> grid_u =
        cfg.seed_grid_u.empty() ? amplitudes : cfg.seed_grid_u;
    std::vector<double> grid_v = cfg.seed_grid_v;
    if (grid_v.empty())
        for (double c : {-2.0, -0.5, 0.0, 0.5, 2.0}) grid_v.push_back(c * v_scale);

    // round 0 seed list: shots (A, 0) anchored at every hump center (the
    // target solution has u' = 0 near its hump maximum, so the Newton basin
    // is widest there), string-targeted profiles at the t = 0 section, the
    // coarse rectangular grid, and (for subharmonic searches) states of the
    // T-periodic references perturbed along their monodromy eigendirections
    std::vector<Seed> seeds;
    const std::vector<Seed> scan_seeds = section_scan_seeds(field_f, w, k, amplitudes, nthreads);
    for (int ell = 0; ell < k; ++ell)
        for (int i = 1; i <= m; ++i) {
            const double anchor = w.positive_hump(i, ell).mid();
            for (double A : amplitudes) {
                seeds.push_back({PlanarState{A, 0.0}, anchor, -1});
                for (double eps : cfg.seed_epsilons)
                    seeds.push_back({PlanarState{eps * A, 0.0}, anchor, -1});
            }
        }
    for (std::size_t si = 0; si < targets.size(); ++si)
        for (const PlanarState& y : seed_guesses(w, g, k, targets[si], seed_opt))
            seeds.push_back({y, 0.0, static_cast<int>(si)});
    for (double u0 : grid_u)
        for (double v0 : grid_v) seeds.push_back({PlanarState{u0, v0}, 0.0, -1});
    if (references && k > 1)
        for (const PeriodicOrbit& ref : *references) add_eigen_ladder(seeds, ref, -1);

    std::vector<PeriodicOrbit> pool;  // unique coarse orbits, later polished

    auto same_point = [](const PlanarState& a, const PlanarState& b) {
        const double s = 1.0 + std::max(std::hypot(a[0], a[1]), std::hypot(b[0], b[1]));
        return std::hypot(a[0] - b[0], a[1] - b[1]) < 1e-5 * s;
    };

    auto run_round = [&](const std::vector<Seed>& batch, const ExtendedField& field) {
        std::vector<RawResult> results(batch.size());
        parallel_for(batch.size(), nthreads, [&](std::size_t i) {
            RawResult r;
            try {
                ShootOptions so = coarse;
                so.t_anchor = batch[i].t_anchor;
                ShootResult sr = newton_shoot(field, batch[i].y0, k, so);
                r.status = sr.status;
                // coarse shots stall at their integration noise floor, far
                // above the target on strongly hyperbolic orbits; keep
                // anything plausibly small, the tight polish decides
                const double window =
                    1e-6 + 5e-2 * (0.01 + std::hypot(batch[i].y0[0], batch[i].y0[1]));
                if (sr.has_orbit() && sr.orbit.residual < window) {
                    r.y0 = sr.orbit.y0;
                    r.residual = sr.orbit.residual;
                    r.candidate = true;
                }
            } catch (const Error&) {
                r.status = ShootStatus::no_convergence;
            }
            results[i] = r;
        });
        return results;
    };

    // anything this far below the instance's own amplitude scale is the
    // trivial solution seen through integration noise
    const double trivial_floor = std::max(1e-8, 1e-4 * amplitudes.front());

    auto accept_candidates = [&](const std::vector<RawResult>& results) {
        std::vector<PlanarState> cands;
        for (const RawResult& r : results) {
            if (!r.candidate) continue;
            bool dup = false;
            for (const PlanarState& c : cands) dup = dup || same_point(c, r.y0);
            for (const PeriodicOrbit& o : pool) dup = dup || same_point(o.y0, r.y0);
            if (!dup) cands.push_back(r.y0);
        }
        // polish candidates on the untruncated field at tight tolerance
        std::vector<std::optional<PeriodicOrbit>> polished(cands.size());
        parallel_for(cands.size(), nthreads, [&](std::size_t i) {
            try {
                ShootResult sr = newton_shoot(field_f, cands[i], k, fine);
                if (sr.has_orbit()) polished[i] = std::move(sr.orbit);
            } catch (const Error&) {
            }
        });
        for (auto& po : polished) {
            if (!po) continue;
            PeriodicOrbit& o = *po;
            if (o.residual > cfg.tol_newton) continue;   // spec-level acceptance
            if (!(o.min_u > 0.0)) continue;              // positivity (maximum principle)
            if (o.max_u < trivial_floor) continue;       // trivial solution
            if (o.max_u < 1e4 * o.residual) continue;    // indistinguishable from zero
            bool dup = false;
            for (const PeriodicOrbit& p : pool) dup = dup || same_point(p.y0, o.y0);
            if (!dup) pool.push_back(std::move(o));
        }
    };

    // ---- scan candidates are already on the orbits: polish them at their
    // own anchors, bypassing the coarse stage
    {
        std::vector<std::optional<PeriodicOrbit>> hits(scan_seeds.size());
        out.seeds_tried += static_cast<int>(scan_seeds.size());
        parallel_for(scan_seeds.size(), nthreads, [&](std::size_t i) {
            try {
                ShootOptions so = fine;
                so.t_anchor = scan_seeds[i].t_anchor;
                ShootResult sr = newton_shoot(field_f, scan_seeds[i].y0, k, so);
                if (sr.has_orbit()) hits[i] = std::move(sr.orbit);
            } catch (const Error&) {
            }
        });
        std::vector<RawResult> as_results(scan_seeds.size());
        for (std::size_t i = 0; i < hits.size(); ++i) {
            if (!hits[i]) continue;
            as_results[i].candidate = true;
            as_results[i].y0 = hits[i]->y0;
            as_results[i].residual = hits[i]->residual;
        }
        accept_candidates(as_results);
    }

    // ---- round 0 on the sign-extension field
    out.seeds_tried += static_cast<int>(seeds.size());
    std::vector<RawResult> r0 = run_round(seeds, field_f);
    std::vector<Seed> blown;
    for (std::size_t i = 0; i < r0.size(); ++i) {
        if (r0[i].status == ShootStatus::blow_up || r0[i].status == ShootStatus::step_underflow)
            blown.push_back(seeds[i]);
        if (r0[i].status == ShootStatus::no_convergence) ++out.seeds_no_convergence;
        if (r0[i].status == ShootStatus::singular_jacobian) ++out.seeds_singular;
    }
    out.seeds_blown_up += static_cast<int>(blown.size());
    accept_candidates(r0);

    // translates of a found kT-periodic orbit by the weight's minimal
    // period are solutions too; their states at the shifted times seed the
    // missing rotations directly. (The stated period T may be a multiple of
    // the minimal one, as with sin(6 pi t) on [0, 1].)
    double t_min = w.period();
    for (int j = m; j >= 2; --j) {
        double worst = 0.0;
        for (int i = 0; i < 512; ++i) {
            const double t = w.period() * i / 512.0;
            worst = std::max(worst, std::abs(w.eval(t + w.period() / j) - w.eval(t)));
        }
        if (worst < 1e-12) {
            t_min = w.period() / j;
            break;
        }
    }
    const int n_shifts = static_cast<int>(std::lround(k * w.period() / t_min));
    auto complete_translates = [&]() {
        if (n_shifts <= 1) return;
        for (int round = 0; round < 2; ++round) {
            std::vector<Seed> translated;
            for (const PeriodicOrbit& o : pool)
                for (int ell = 1; ell < n_shifts; ++ell) {
                    const PlanarState y = o.trajectory.eval(ell * t_min);
                    bool dup = false;
                    for (const PeriodicOrbit& p : pool) dup = dup || same_point(p.y0, y);
                    if (!dup) translated.push_back({y, 0.0, -1});
                }
            if (translated.empty()) break;
            out.seeds_tried += static_cast<int>(translated.size());
            accept_candidates(run_round(translated, field_f));
        }
    };
    complete_translates();

    // ---- retry escaped seeds on the truncated field (taming blow-up only);
    // every candidate is re-verified on the untruncated field by the polish
    if (!blown.empty()) {
        double top = 0.0;
        for (const PeriodicOrbit& o : pool) top = std::max(top, o.max_u);
        for (double a : amplitudes) top = std::max(top, a);
        const double R_trunc = 10.0 * top;
        ExtendedField field_h = ExtendedField::from_weight(w, g, R_trunc, cfg.friction_c);
        out.seeds_retried_truncated += static_cast<int>(blown.size());
        accept_candidates(run_round(blown, field_h));
        complete_translates();
    }

    // ---- classification rounds: thresholds, strings, re-seed missing codes
    auto classify_pool = [&]() -> std::set<std::string> {
        std::vector<double> maxima;
        for (PeriodicOrbit& o : pool) {
            o.max_per_hump = hump_maxima(o, w);
            maxima.insert(maxima.end(), o.max_per_hump.begin(), o.max_per_hump.end());
        }
        if (maxima.empty()) return {};
        Thresholds th = select_thresholds(maxima);
        if (cfg.r_override) th.r = *cfg.r_override;
        if (cfg.R_override) th.R = *cfg.R_override;
        out.thresholds = th;
        std::set<std::string> found;
        for (PeriodicOrbit& o : pool) {
            try {
                classify_string(o, w, th.r, th.R, cfg.class_delta);
                found.insert(o.string.str());
            } catch (const Error& e) {
                o.string = HumpString{};
                out.warnings.push_back(std::string("classification: ") + e.what());
            }
        }
        return found;
    };

    std::set<std::string> found = classify_pool();
    for (int round = 1; round < cfg.max_seed_rounds; ++round) {
        std::vector<const HumpString*> missing;
        for (const HumpString& s : targets)
            if (!found.count(s.str())) missing.push_back(&s);
        if (missing.empty() || pool.empty()) break;

        // data-driven amplitudes from the found clusters
        std::vector<double> large, small;
        for (const PeriodicOrbit& o : pool)
            for (std::size_t j = 0; j < o.max_per_hump.size(); ++j) {
                if (o.string.bits.empty()) continue;
                (o.string.bits[j] ? large : small).push_back(o.max_per_hump[j]);
            }
        SeedOptions retune = seed_opt;
        if (!large.empty()) {
            std::sort(large.begin(), large.end());
            const double med = large[large.size() / 2];
            retune.amplitudes = {0.7 * med, med, 1.4 * med, 2.0 * med};
            double eps = 0.02;
            if (!small.empty()) {
                std::sort(small.begin(), small.end());
                eps = std::clamp(small[small.size() / 2] / med, 0.005, 0.5);
            }
            retune.epsilons = {eps, 2.0 * eps};
        }

        std::vector<Seed> extra;
        for (const HumpString* s : missing) {
            for (const PlanarState& y : seed_guesses(w, g, k, *s, retune)) extra.push_back({y, 0.0, -1});
            // chain off the found orbit closest in string space
            const PeriodicOrbit* best = nullptr;
            int best_d = km + 1;
            for (const PeriodicOrbit& o : pool) {
                if (o.string.size() != s->size()) continue;
                int d = 0;
                for (std::size_t j = 0; j < s->size(); ++j) d += (o.string.bits[j] != s->bits[j]);
                if (d < best_d) {
                    best_d = d;
                    best = &o;
                }
            }
            if (best) add_eigen_ladder(extra, *best, -1);
        }
        out.seeds_tried += static_cast<int>(extra.size());
        accept_candidates(run_round(extra, field_f));
        complete_translates();
        found = classify_pool();
    }

    // drop orbits that failed classification
    std::erase_if(pool, [](const PeriodicOrbit& o) { return o.string.bits.empty(); });
    out.seeds_converged = static_cast<int>(pool.size());

    for (PeriodicOrbit& o : pool) o.minimal = minimal_order(o, cfg.tol_newton);
    if (!pool.empty()) {
        out.classes = dedup_classes(pool, cfg.tol_dedup);
        std::sort(pool.begin(), pool.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
            if (a.class_id != b.class_id) return a.class_id < b.class_id;
            return a.y0 < b.y0;
        });
        // indices moved; rebuild class membership deterministically
        out.classes = dedup_classes(pool, cfg.tol_dedup);
    }
    out.orbits = std::move(pool);
    return out;
}

// ------------------------------------------------------------- manifest --

namespace {

nlohmann::json finite_or_null(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

nlohmann::json orbit_json(const PeriodicOrbit& o, double expected_det) {
    nlohmann::json j;
    j["k"] = o.order_k;
    j["string"] = o.string.str();
    j["y0"] = {o.y0[0], o.y0[1]};
    j["residual"] = o.residual;
    j["minimal"] = o.minimal;
    j["class_id"] = o.class_id;
    j["max_per_hump"] = o.max_per_hump;
    j["min_u"] = o.min_u;
    j["max_u"] = o.max_u;
    j["nc_residual_1"] = finite_or_null(o.nc_residual_1);
    j["nc_residual_2"] = finite_or_null(o.nc_residual_2);
    j["lambda0"] = finite_or_null(o.lambda0);
    j["monodromy_trace"] = o.monodromy.trace();
    j["monodromy_det"] = o.monodromy.det();
    j["liouville_error"] = std::abs(o.monodromy.det() - expected_det) / expected_det;
    return j;
}

nlohmann::json classes_json(const std::vector<PeriodicityClass>& classes) {
    nlohmann::json arr = nlohmann::json::array();
    for (const PeriodicityClass& c : classes) {
        nlohmann::json j;
        j["id"] = c.id;
        j["string"] = c.canonical.str();
        j["members"] = c.members;
        j["representative"] = c.representative;
        j["minimal"] = c.minimal;
        arr.push_back(j);
    }
    return arr;
}

nlohmann::json config_json(const RunConfig& cfg) {
    nlohmann::json j;
    j["weight.kind"] = cfg.weight_kind;
    j["weight.freq"] = cfg.weight_freq;
    j["weight.period"] = cfg.period;
    j["weight.mu"] = cfg.mu;
    if (!cfg.weight_table.empty()) j["weight.table"] = cfg.weight_table;
    j["nonlinearity.kind"] = cfg.g_kind;
    j["nonlinearity.params"] = cfg.g_params;
    j["k"] = cfg.k;
    j["friction.c"] = cfg.friction_c;
    j["tol.integration"] = cfg.tol_integration;
    j["tol.newton"] = cfg.tol_newton;
    j["tol.dedup"] = cfg.tol_dedup;
    j["class.delta"] = cfg.class_delta;
    if (cfg.r_override) j["class.r"] = *cfg.r_override;
    if (cfg.R_override) j["class.R"] = *cfg.R_override;
    j["escape"] = cfg.escape;
    return j;
}

}  // namespace

RunResult run_experiment(const RunConfig& cfg) {
    validate_config(cfg);
    RunResult res;

    // ---- weight and nonlinearity
    if (cfg.weight_kind == "sin") {
        res.weight = WeightSpec::sinusoid(cfg.period, cfg.mu, cfg.weight_freq);
    } else {
        std::vector<double> t, v;
        if (cfg.weight_table.size() < 4 || cfg.weight_table.size() % 2 != 0)
            throw ConfigError("weight.table needs flattened t,v pairs");
        for (std::size_t i = 0; i < cfg.weight_table.size(); i += 2) {
            t.push_back(cfg.weight_table[i]);
            v.push_back(cfg.weight_table[i + 1]);
        }
        res.weight = WeightSpec::table(cfg.period, cfg.mu, t, v);
    }
    if (!res.weight.sign_changing())
        throw NoSignChangeError("run_experiment: the weight never changes sign; (q_*) fails");
    res.g = make_nonlinearity(cfg.g_kind, cfg.g_params);

    // ---- scalar analysis and the (q_#) gate
    res.hypotheses = check_hypotheses(res.g);
    res.mu_sharp_value = mu_sharp(res.weight);
    res.mean_value_one_period = mean_value(res.weight, 1);
    res.gate_q_sharp = res.mean_value_one_period < 0.0;

    // ---- search (k = 1 companion run first when hunting subharmonics)
    if (cfg.k > 1) {
        SolveOutcome ref = solve_instance(res.weight, res.g, cfg, 1, nullptr);
        res.reference_orbits = std::move(ref.orbits);
        res.reference_classes = std::move(ref.classes);
    }
    res.solve = solve_instance(res.weight, res.g, cfg, cfg.k, &res.reference_orbits);
    res.numerical_failure = res.solve.orbits.empty();

    // ---- diagnostics on every accepted orbit
    auto attach_nc = [&](std::vector<PeriodicOrbit>& orbits) {
        for (PeriodicOrbit& o : orbits) {
            const auto [r1, r2] = necessary_condition_residuals(o, res.weight, res.g);
            o.nc_residual_1 = r1;
            o.nc_residual_2 = r2;
        }
    };
    attach_nc(res.solve.orbits);
    attach_nc(res.reference_orbits);

    SpectralOptions sopt;
    sopt.integrate_tol = std::max(cfg.tol_integration * 1e-2, 1e-13);
    for (PeriodicOrbit& o : res.reference_orbits)
        o.lambda0 = verify_morse(o, res.weight, res.g, sopt).first;
    if (cfg.k == 1) {
        for (PeriodicOrbit& o : res.solve.orbits)
            o.lambda0 = verify_morse(o, res.weight, res.g, sopt).first;
    } else {
        // non-minimal orbits that are genuinely T-periodic get their
        // linearization eigenvalue through a k = 1 re-shoot
        ShootOptions one;
        one.newton_tol = std::max(cfg.tol_newton * 1e-2, 1e-12);
        one.integrate_tol = std::max(cfg.tol_integration * 1e-2, 1e-13);
        one.classify_tol = std::max(cfg.tol_integration * 1e-3, 1e-13);
        one.escape = cfg.escape;
        const ExtendedField f = ExtendedField::from_weight(res.weight, res.g, std::nullopt,
                                                           cfg.friction_c);
        for (PeriodicOrbit& o : res.solve.orbits) {
            if (o.minimal) continue;
            double drift = 0.0;
            for (int i = 0; i < 512; ++i) {
                const double t = o.period() * i / 512.0;
                drift = std::max(drift, std::abs(o.u_at(t) - o.u_at(t + res.weight.period())));
            }
            if (drift > 10.0 * cfg.tol_newton) continue;  // some longer sub-period
            ShootResult sr = newton_shoot(f, o.y0, 1, one);
            if (sr.status == ShootStatus::converged)
                o.lambda0 = verify_morse(sr.orbit, res.weight, res.g, sopt).first;
        }
    }

    // ---- Dirichlet eigenvalues per positive hump
    for (int i = 1; i <= res.weight.num_positive_humps(); ++i)
        res.dirichlet_lambda1.push_back(dirichlet_eigenvalue(res.weight, i));

    // ---- oscillation diagnostics
    auto reps_of = [](const std::vector<PeriodicOrbit>& orbits,
                      const std::vector<PeriodicityClass>& classes) {
        std::vector<const PeriodicOrbit*> reps;
        for (const PeriodicityClass& c : classes) reps.push_back(&orbits[c.representative]);
        return reps;
    };
    const auto k_reps = reps_of(res.solve.orbits, res.solve.classes);
    if (cfg.k == 1) {
        for (const PeriodicOrbit* a : k_reps)
            for (const PeriodicOrbit* b : k_reps) {
                if (a == b) continue;
                try {
                    OscillationReport rep = count_zeros_diff(*a, *b);
                    rep.winding_turns = winding(*a, *b);
                    res.oscillation.push_back(rep);
                } catch (const Error& e) {
                    res.solve.warnings.push_back(std::string("oscillation: ") + e.what());
                }
            }
    } else {
        const auto refs = reps_of(res.reference_orbits, res.reference_classes);
        for (const PeriodicOrbit* a : k_reps) {
            if (!a->minimal) continue;  // references themselves reappear as k-extensions
            for (const PeriodicOrbit* r : refs) {
                try {
                    OscillationReport rep = count_zeros_diff(*a, *r);
                    rep.winding_turns = winding(*a, *r);
                    res.oscillation.push_back(rep);
                } catch (const Error& e) {
                    res.solve.warnings.push_back(std::string("oscillation: ") + e.what());
                }
            }
        }
    }

    // ---- manifest
    const double expected_det = std::exp(-cfg.friction_c * cfg.k * cfg.period);
    nlohmann::json man;
    man["schema_version"] = kManifestSchemaVersion;
    man["config"] = config_json(cfg);
    {
        nlohmann::json wj;
        wj["kind"] = cfg.weight_kind;
        wj["period"] = res.weight.period();
        wj["mu"] = res.weight.mu();
        wj["m"] = res.weight.num_positive_humps();
        wj["mu_sharp"] = res.mu_sharp_value;
        wj["mean_value_one_period"] = res.mean_value_one_period;
        wj["gate_q_sharp"] = res.gate_q_sharp;
        nlohmann::json humps = nlohmann::json::array();
        for (const SignedInterval& s : res.weight.humps())
            humps.push_back({{"lo", s.lo}, {"hi", s.hi}, {"sign", s.sign}, {"index_i", s.index_i}});
        wj["humps"] = humps;
        man["weight"] = wj;
    }
    {
        nlohmann::json hj;
        hj["positive"] = res.hypotheses.positive;
        hj["superlinear_at_zero"] = res.hypotheses.superlinear_at_zero;
        hj["convex"] = res.hypotheses.convex;
        hj["superlinear_at_infinity"] = res.hypotheses.superlinear_at_infinity;
        hj["liminf_proxy"] = res.hypotheses.liminf_proxy;
        hj["dg0_estimate"] = res.hypotheses.dg0_estimate;
        man["hypotheses"] = hj;
    }
    man["k"] = cfg.k;
    man["thresholds"] = {{"r", res.solve.thresholds.r}, {"R", res.solve.thresholds.R}};
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const PeriodicOrbit& o : res.solve.orbits) arr.push_back(orbit_json(o, expected_det));
        man["orbits"] = arr;
        man["classes"] = classes_json(res.solve.classes);
    }
    if (cfg.k > 1) {
        nlohmann::json arr = nlohmann::json::array();
        const double ref_det = std::exp(-cfg.friction_c * cfg.period);
        for (const PeriodicOrbit& o : res.reference_orbits) arr.push_back(orbit_json(o, ref_det));
        man["reference_orbits"] = arr;
        man["reference_classes"] = classes_json(res.reference_classes);
        if (res.weight.num_positive_humps() <= 11)
            man["witt_lower_bound"] =
                predicted_subharmonic_count(res.weight.num_positive_humps(), cfg.k);
    }
    man["dirichlet_lambda1"] = res.dirichlet_lambda1;
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const OscillationReport& r : res.oscillation) {
            nlohmann::json j;
            j["orbit_class"] = r.orbit_class_id;
            j["reference_class"] = r.reference_class_id;
            j["zero_count"] = r.zero_count;
            j["winding"] = r.winding_turns;
            if (r.j_index) j["j"] = *r.j_index;
            j["tangencies"] = r.tangencies;
            arr.push_back(j);
        }
        man["oscillation"] = arr;
    }
    {
        nlohmann::json d;
        d["seeds_tried"] = res.solve.seeds_tried;
        d["seeds_converged"] = res.solve.seeds_converged;
        d["seeds_blown_up"] = res.solve.seeds_blown_up;
        d["seeds_retried_truncated"] = res.solve.seeds_retried_truncated;
        d["seeds_no_convergence"] = res.solve.seeds_no_convergence;
        d["seeds_singular"] = res.solve.seeds_singular;
        d["warnings"] = res.solve.warnings;
        man["diagnostics"] = d;
    }
    res.manifest = std::move(man);
    return res;
}

void export_csv(const PeriodicOrbit& orbit, const std::string& path, double stride) {
    if (stride <= 0.0) throw ConfigError("export_csv: stride must be positive");
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw Error("export_csv: cannot open " + path);
    std::fputs("t,u,up\n", f);
    const double kT = orbit.period();
    const long n = static_cast<long>(std::floor(kT / stride));
    for (long i = 0; i <= n; ++i) {
        const double t = stride * static_cast<double>(i);
        const PlanarState y = orbit.trajectory.eval(std::min(t, kT));
        std::fprintf(f, "%.12g,%.12g,%.12g\n", t, y[0], y[1]);
    }
    std::fclose(f);
}

}  // namespace subh
