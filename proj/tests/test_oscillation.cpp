#include <cmath>
#include <numbers>

#include "doctest.h"
#include "subh/oscillation.hpp"

using namespace subh;

namespace {

constexpr double kPi = std::numbers::pi;

Nonlinearity linear_g() {
    Nonlinearity n;
    n.kind = "custom-linear";
    n.g = [](double s) { return s; };
    n.dg = [](double) { return 1.0; };
    n.ddg = [](double) { return 0.0; };
    return n;
}

/// u = 2 + cos t as a stored orbit (manufactured coefficient).
PeriodicOrbit shifted_cos_orbit() {
    ExtendedField F;
    F.q = [](double t) { return std::cos(t) / (2.0 + std::cos(t)); };
    F.base = linear_g();
    F.period_T = 2.0 * kPi;
    F.raw = true;
    PeriodicOrbit o;
    o.y0 = {3.0, 0.0};
    o.order_k = 1;
    o.class_id = 1;
    o.trajectory = integrate(F, o.y0, 0.0, 2.0 * kPi, {.tol = 1e-12});
    return o;
}

/// u identically 2 (free particle at rest).
PeriodicOrbit constant_orbit() {
    ExtendedField F;
    F.q = [](double) { return 0.0; };
    F.base = linear_g();
    F.period_T = 2.0 * kPi;
    F.raw = true;
    PeriodicOrbit o;
    o.y0 = {2.0, 0.0};
    o.order_k = 1;
    o.class_id = 0;
    o.trajectory = integrate(F, o.y0, 0.0, 2.0 * kPi);
    return o;
}

}  // namespace

TEST_SUITE_BEGIN("oscillation");

TEST_CASE("winding of closed-form curves") {
    CHECK(winding_of([](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
                     0.0, 2.0 * kPi) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(winding_of([](double t) { return std::sin(3.0 * t); },
                     [](double t) { return 3.0 * std::cos(3.0 * t); }, 0.0,
                     2.0 * kPi) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("origin hit is detected") {
    // d = 1 - cos t has d = d' = 0 at t = 0
    CHECK_THROWS_AS(winding_of([](double t) { return 1.0 - std::cos(t); },
                               [](double t) { return std::sin(t); }, 0.0, 2.0 * kPi),
                    OriginHitError);
}

TEST_CASE("zero count of a cosine difference") {
    const PeriodicOrbit a = shifted_cos_orbit();
    const PeriodicOrbit ref = constant_orbit();
    const OscillationReport rep = count_zeros_diff(a, ref);
    CHECK(rep.zero_count == 2);
    REQUIRE(rep.j_index.has_value());
    CHECK(*rep.j_index == 1);
    CHECK(rep.orbit_class_id == 1);
    CHECK(rep.reference_class_id == 0);

    CHECK(winding(a, ref) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("zero locations are stable under tolerance refinement") {
    ExtendedField F;
    F.q = [](double t) { return std::cos(t) / (2.0 + std::cos(t)); };
    F.base = linear_g();
    F.period_T = 2.0 * kPi;
    F.raw = true;
    const PeriodicOrbit ref = constant_orbit();
    std::vector<double> first;
    for (double tol : {1e-10, 1e-11}) {
        PeriodicOrbit o;
        o.y0 = {3.0, 0.0};
        o.order_k = 1;
        o.trajectory = integrate(F, o.y0, 0.0, 2.0 * kPi, {.tol = tol});
        const OscillationReport rep = count_zeros_diff(o, ref);
        REQUIRE(rep.zeros.size() == 2);
        // d = cos t vanishes at pi/2 and 3 pi/2
        CHECK(rep.zeros[0] == doctest::Approx(kPi / 2.0).epsilon(1e-8));
        CHECK(rep.zeros[1] == doctest::Approx(3.0 * kPi / 2.0).epsilon(1e-8));
        if (first.empty())
            first = rep.zeros;
        else
            for (std::size_t i = 0; i < first.size(); ++i)
                CHECK(std::abs(first[i] - rep.zeros[i]) < 1e-6);
    }
}

TEST_CASE("identical orbits are a degenerate difference") {
    const PeriodicOrbit a = shifted_cos_orbit();
    CHECK_THROWS_AS(count_zeros_diff(a, a), DegenerateDifferenceError);
}

TEST_CASE("winding equals half the zero count for periodic differences") {
    // compare u = 2 + cos t against u = 2 + 1.5 cos(3t): the fast term
    // dominates and d = cos t - 1.5 cos(3t) crosses zero six times
    ExtendedField F;
    F.q = [](double t) { return 9.0 * 1.5 * std::cos(3.0 * t) / (2.0 + 1.5 * std::cos(3.0 * t)); };
    F.base = linear_g();
    F.period_T = 2.0 * kPi;
    F.raw = true;
    PeriodicOrbit b;
    b.y0 = {3.5, 0.0};
    b.order_k = 1;
    b.trajectory = integrate(F, b.y0, 0.0, 2.0 * kPi, {.tol = 1e-12});

    const PeriodicOrbit a = shifted_cos_orbit();
    const OscillationReport rep = count_zeros_diff(a, b);
    CHECK(rep.zero_count == 6);
    CHECK(rep.zero_count % 2 == 0);
    CHECK(winding(a, b) == doctest::Approx(rep.zero_count / 2.0).epsilon(1e-6));
}

TEST_SUITE_END();
