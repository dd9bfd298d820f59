#include <cmath>
#include <numbers>

#include "doctest.h"
#include "subh/nonlinearity.hpp"

using namespace subh;

namespace {

ExtendedField const_field(double qval, Nonlinearity n, std::optional<double> R = std::nullopt,
                          double c = 0.0) {
    ExtendedField F;
    F.q = [qval](double) { return qval; };
    F.base = std::move(n);
    F.truncation_R = R;
    F.friction_c = c;
    F.period_T = 1.0;
    return F;
}

}  // namespace

TEST_SUITE_BEGIN("nonlinearity");

TEST_CASE("preset values") {
    CHECK(make_nonlinearity("power", {2.0}).g(3.0) == doctest::Approx(9.0).epsilon(1e-15));
    CHECK(make_nonlinearity("polymix", {100.0, 100.0}).g(1.0) ==
          doctest::Approx(200.0).epsilon(1e-15));
    CHECK(make_nonlinearity("atan", {400.0}).g(1.0) ==
          doctest::Approx(400.0 * std::numbers::pi / 4.0).epsilon(1e-14));
}

TEST_CASE("table nonlinearity interpolates and extrapolates linearly") {
    const Nonlinearity n = make_nonlinearity("table", {0.0, 0.0, 1.0, 2.0, 2.0, 3.0});
    CHECK(n.g(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(n.g(1.5) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(n.g(4.0) == doctest::Approx(5.0).epsilon(1e-15));  // last slope continues
    CHECK(n.dg(0.5) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(n.dg(1.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(make_nonlinearity("table", {0.5, 1.0, 1.0, 2.0}), BadParamsError);
}

TEST_CASE("bad parameters are rejected") {
    CHECK_THROWS_AS(make_nonlinearity("power", {1.0}), BadParamsError);
    CHECK_THROWS_AS(make_nonlinearity("power", {0.5}), BadParamsError);
    CHECK_THROWS_AS(make_nonlinearity("polymix", {-1.0, 2.0}), BadParamsError);
    CHECK_THROWS_AS(make_nonlinearity("atan", {0.0}), BadParamsError);
    CHECK_THROWS_AS(make_nonlinearity("cubic", {1.0}), BadParamsError);
}

TEST_CASE("derivatives match central finite differences on a log grid") {
    for (const auto& n : {make_nonlinearity("power", {2.0}), make_nonlinearity("power", {3.5}),
                          make_nonlinearity("polymix", {100.0, 100.0}),
                          make_nonlinearity("atan", {400.0})}) {
        for (double s = 1e-3; s < 1e3; s *= 10.0) {
            const double h = 1e-6 * s;
            const double fd1 = (n.g(s + h) - n.g(s - h)) / (2.0 * h);
            CHECK(n.dg(s) == doctest::Approx(fd1).epsilon(1e-6));
            const double fd2 = (n.dg(s + h) - n.dg(s - h)) / (2.0 * h);
            CHECK(n.ddg(s) == doctest::Approx(fd2).epsilon(1e-5));
        }
    }
}

TEST_CASE("hypothesis report: power p = 2") {
    const HypothesisReport rep = check_hypotheses(make_nonlinearity("power", {2.0}));
    CHECK(rep.positive);
    CHECK(rep.superlinear_at_zero);
    CHECK(rep.convex);
    CHECK(rep.superlinear_at_infinity);
    CHECK(rep.liminf_proxy > 1e2);  // g(s)/s unbounded on the grid
}

TEST_CASE("hypothesis report: the atan preset is not superlinear at infinity") {
    const HypothesisReport rep = check_hypotheses(make_nonlinearity("atan", {400.0}));
    CHECK(rep.positive);
    CHECK(rep.superlinear_at_zero);
    CHECK(rep.convex);
    CHECK(!rep.superlinear_at_infinity);
    // g(s)/s -> 400 pi/2 ~ 628.3; the grid proxy sits just below
    CHECK(rep.liminf_proxy > 600.0);
    CHECK(rep.liminf_proxy < 400.0 * std::numbers::pi / 2.0 + 1e-9);
}

TEST_CASE("hypothesis report: polymix convexity from the closed form") {
    const Nonlinearity n = make_nonlinearity("polymix", {100.0, 100.0});
    CHECK(check_hypotheses(n).convex);
    CHECK(n.ddg(0.5) == doctest::Approx(200.0 + 600.0 * 0.5).epsilon(1e-15));
}

TEST_CASE("extension continuity at the junctions") {
    const Nonlinearity g2 = make_nonlinearity("power", {2.0});
    const ExtendedField f = const_field(1.0, g2);
    CHECK(std::abs(f.force(0.0, 1e-13) - f.force(0.0, -1e-13)) < 1e-12);

    const ExtendedField h = const_field(1.0, g2, 1.0);
    CHECK(std::abs(h.force(0.0, 1.0 + 1e-13) - h.force(0.0, 1.0 - 1e-13)) < 1e-12);
    CHECK(std::abs(h.force(0.0, 1e-13) - h.force(0.0, -1e-13)) < 1e-12);
}

TEST_CASE("field_eval branches") {
    const Nonlinearity g2 = make_nonlinearity("power", {2.0});

    // f extension below zero: f(t, -2) = +2, so the second component
    // -c u' - f comes out -2 (negative minima are impossible this way)
    const ExtendedField f = const_field(7.0, g2);
    CHECK(f.force(0.3, -2.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(field_eval(f, 0.3, -2.0, 0.0).second == doctest::Approx(-2.0).epsilon(1e-15));

    // h truncation above R: affine branch g(R) + g'(R) (s - R)
    const ExtendedField h = const_field(1.0, g2, 1.0);
    CHECK(field_eval(h, 0.0, 3.0, 0.0).second == doctest::Approx(-5.0).epsilon(1e-15));
    CHECK(h.force(0.0, -0.5) == 0.0);

    // friction term
    ExtendedField fr = const_field(1.0, g2);
    fr.friction_c = 1.0;
    CHECK(field_eval(fr, 0.0, 0.0, 2.0).second == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("truncated field has globally linear growth") {
    const Nonlinearity g2 = make_nonlinearity("power", {2.0});
    const double R = 2.0, qmax = 6.0;
    ExtendedField h = const_field(-qmax, g2, R);
    const double A = qmax * g2.g(R);
    const double B = qmax * g2.dg(R);
    for (double s = 0.0; s < 1e6; s = 2.0 * s + 0.5)
        CHECK(std::abs(h.force(0.0, s)) <= A + B * s + 1e-9);
}

TEST_SUITE_END();
