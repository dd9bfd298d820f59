#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "subh/experiment.hpp"

using namespace subh;

namespace {

/// A one-hump instance small enough for unit tests: sin(2 pi t) on [0, 1],
/// mu = 2, g = 100(s^2 + s^3), k = 1.
RunConfig tiny_config() {
    RunConfig cfg;
    cfg.weight_kind = "sin";
    cfg.weight_freq = 1.0;
    cfg.period = 1.0;
    cfg.mu = 2.0;
    cfg.g_kind = "polymix";
    cfg.g_params = {100.0, 100.0};
    cfg.k = 1;
    cfg.seed_amplitudes = {0.1, 0.5, 2.0};
    cfg.seed_epsilons = {0.05};
    cfg.seed_grid_u = {0.1, 1.0};
    cfg.seed_grid_v = {-1.0, 0.0, 1.0};
    cfg.max_seed_rounds = 2;
    return cfg;
}

}  // namespace

TEST_SUITE_BEGIN("experiment");

TEST_CASE("config parsing, presets, and overrides") {
    const RunConfig f1 = preset_config("fig1");
    CHECK(f1.weight_freq == 3.0);
    CHECK(f1.period == 1.0);
    CHECK(f1.mu == 10.0);
    CHECK(f1.g_kind == "atan");
    CHECK(f1.k == 1);

    const RunConfig f2 = preset_config("fig2");
    CHECK(f2.mu == 6.0);
    CHECK(f2.g_kind == "polymix");
    CHECK(f2.k == 2);
    CHECK_THROWS_AS(preset_config("fig3"), ConfigError);

    RunConfig cfg = parse_config_text(
        "# comment\n"
        "weight.kind = sin\n"
        "weight.mu = 7.5\n"
        "nonlinearity.params = 1.0, 2.0, 3.0\n"
        "k = 3\n");
    CHECK(cfg.mu == 7.5);
    CHECK(cfg.g_params == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(cfg.k == 3);

    apply_config_override(cfg, "tol.newton", "1e-7");
    CHECK(cfg.tol_newton == 1e-7);
    CHECK_THROWS_AS(apply_config_override(cfg, "nope", "1"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("k: 3\n"), ConfigError);

    cfg.k = 0;
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("csv export: stride, values, byte determinism") {
    ExtendedField F;
    F.q = [](double t) { return std::cos(t) / (2.0 + std::cos(t)); };
    Nonlinearity lin;
    lin.kind = "lin";
    lin.g = [](double s) { return s; };
    lin.dg = [](double) { return 1.0; };
    lin.ddg = [](double) { return 0.0; };
    F.base = lin;
    F.period_T = 2.0 * std::numbers::pi;
    F.raw = true;
    PeriodicOrbit o;
    o.y0 = {3.0, 0.0};
    o.order_k = 1;
    o.trajectory = integrate(F, o.y0, 0.0, F.period_T, {.tol = 1e-12});

    const std::string path = "/tmp/subh_test_orbit.csv";
    const double stride = 0.01;
    export_csv(o, path, stride);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,u,up");
    int rows = 0;
    std::string line;
    double worst = 0.0;
    while (std::getline(in, line)) {
        double t, u, up;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &u, &up) == 3);
        worst = std::max(worst, std::abs(u - (2.0 + std::cos(t))));
        ++rows;
    }
    CHECK(rows == static_cast<int>(std::floor(F.period_T / stride)) + 1);
    CHECK(worst < 1e-8);

    // re-export must be byte identical
    std::ostringstream first;
    first << std::ifstream(path).rdbuf();
    export_csv(o, path, stride);
    std::ostringstream second;
    second << std::ifstream(path).rdbuf();
    CHECK(first.str() == second.str());
}

TEST_CASE("tiny instance: solve finds the one-hump solution") {
    const RunConfig cfg = tiny_config();
    const RunResult res = run_experiment(cfg);
    CHECK(res.gate_q_sharp);  // mu = 2 > mu_sharp = 1
    CHECK(res.mu_sharp_value == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(!res.solve.orbits.empty());
    REQUIRE(!res.solve.classes.empty());
    CHECK(res.solve.classes.front().canonical.str() == "1");
    for (const PeriodicOrbit& o : res.solve.orbits) {
        CHECK(o.residual < cfg.tol_newton);
        CHECK(o.min_u > 0.0);
        CHECK(o.nc_residual_1 < 1e-5);
    }
    CHECK(res.manifest["schema_version"] == kManifestSchemaVersion);
}

namespace {

void check_finite_numbers(const nlohmann::json& j) {
    if (j.is_number_float()) CHECK(std::isfinite(j.get<double>()));
    if (j.is_object() || j.is_array())
        for (const auto& item : j) check_finite_numbers(item);
}

}  // namespace

TEST_CASE("manifest numbers are finite and classes survive a tolerance refinement") {
    RunConfig cfg = tiny_config();
    const RunResult base = run_experiment(cfg);
    check_finite_numbers(base.manifest);

    RunConfig tight = cfg;
    tight.tol_newton = cfg.tol_newton / 10.0;
    tight.tol_integration = cfg.tol_integration / 10.0;
    const RunResult refined = run_experiment(tight);

    REQUIRE(base.solve.classes.size() == refined.solve.classes.size());
    for (std::size_t i = 0; i < base.solve.classes.size(); ++i) {
        CHECK(base.solve.classes[i].canonical.str() == refined.solve.classes[i].canonical.str());
        const PeriodicOrbit& a = base.solve.orbits[base.solve.classes[i].representative];
        const PeriodicOrbit& b = refined.solve.orbits[refined.solve.classes[i].representative];
        const double drift = std::hypot(a.y0[0] - b.y0[0], a.y0[1] - b.y0[1]);
        CHECK(drift < 100.0 * cfg.tol_newton);
    }
}

TEST_CASE("manifest is deterministic and thread-count independent") {
    RunConfig a = tiny_config();
    a.threads = 1;
    RunConfig b = tiny_config();
    b.threads = 4;
    const std::string ma = run_experiment(a).manifest.dump();
    const std::string mb = run_experiment(b).manifest.dump();
    // thread count is not part of the manifest; outputs must agree exactly
    CHECK(ma == mb);
}

TEST_CASE("gate flag raised but run proceeds when mu < mu_sharp") {
    RunConfig cfg = tiny_config();
    cfg.mu = 0.5;
    cfg.max_seed_rounds = 1;
    const RunResult res = run_experiment(cfg);
    CHECK(!res.gate_q_sharp);
    CHECK(res.mean_value_one_period > 0.0);
}

TEST_SUITE_END();
