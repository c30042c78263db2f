#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "ptk/coeffs.hpp"

using namespace ptk;

namespace {

/// Central-difference partial derivative of a scalar function.
template <typename F>
double numericalPartial(F&& f, Point x, int axis, double eps = 1e-6) {
  Point xp = x, xm = x;
  xp[axis] += eps;
  xm[axis] -= eps;
  return (f(xp) - f(xm)) / (2.0 * eps);
}

const Point kSamples[] = {{0.13, 0.57, 0.29}, {0.91, 0.08, 0.66}, {0.4, 0.4, 0.4}};

}  // namespace

TEST_CASE("unknown family and ellipticity violations are rejected") {
  CHECK_THROWS_AS(builtinField("bogus", {}, 1.0), std::invalid_argument);
  CHECK_THROWS_WITH_AS(builtinField("smooth-var", {{"eps", 1.0}}, 1.0), "ellipticity violated",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(builtinField("smooth-var", {{"eps", -0.1}}, 1.0), "ellipticity violated",
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(builtinField("aniso-diag", {{"a3", -1.0}}, 1.0), "ellipticity violated",
                       std::invalid_argument);
}

TEST_CASE("laplace and aniso-diag are constant diagonal fields") {
  const CoefficientField lap = builtinField("laplace", {}, 1.0);
  const CoefficientField aniso = builtinField("aniso-diag", {}, 1.0);
  for (const Point& x : kSamples) {
    CHECK(lap.a(x)(0, 0) == 1.0);
    CHECK(lap.a(x)(1, 2) == 0.0);
    CHECK(lap.b(x)[0] == 0.0);
    CHECK(aniso.a(x)(0, 0) == 2.0);
    CHECK(aniso.a(x)(1, 1) == 1.0);
    CHECK(aniso.a(x)(2, 2) == 0.5);
  }
  CHECK(aniso.ellipticityBound == doctest::Approx(0.5));
}

TEST_CASE("smooth-var divergence matches numerical differentiation") {
  const CoefficientField f = builtinField("smooth-var", {{"eps", 0.5}}, 1.0);
  for (const Point& x : kSamples) {
    const Point div = f.aDivergence(x);
    for (int i = 0; i < 3; ++i) {
      const double numeric =
          numericalPartial([&](const Point& p) { return f.a(p)(i, i); }, x, i);
      CHECK(div[i] == doctest::Approx(numeric).epsilon(1e-6));
    }
  }
}

TEST_CASE("drift families are divergence free or gradients as declared") {
  const CoefficientField rot = builtinField("rotation-drift", {{"strength", 2.0}}, 1.0);
  const CoefficientField shear = builtinField("shear-drift", {}, 1.0);
  const CoefficientField grad = builtinField("gradient-drift", {{"strength", 1.5}}, 1.0);
  for (const Point& x : kSamples) {
    double divRot = 0.0, divShear = 0.0;
    for (int i = 0; i < 3; ++i) {
      divRot += numericalPartial([&](const Point& p) { return rot.b(p)[i]; }, x, i);
      divShear += numericalPartial([&](const Point& p) { return shear.b(p)[i]; }, x, i);
    }
    CHECK(divRot == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(divShear == doctest::Approx(0.0).epsilon(1e-8));

    // b = grad V for the gradient family.
    REQUIRE(static_cast<bool>(grad.potential));
    const Point b = grad.b(x);
    for (int i = 0; i < 3; ++i) {
      const double numeric = numericalPartial(grad.potential, x, i);
      CHECK(b[i] == doctest::Approx(numeric).epsilon(1e-6));
    }
  }
}

TEST_CASE("fields are periodic with the torus period") {
  const CoefficientField f = builtinField("smooth-var", {}, 2.0);
  const CoefficientField rot = builtinField("rotation-drift", {}, 2.0);
  const Point x{0.3, 0.7, 1.1};
  const Point shifted{x[0] + 2.0, x[1] - 2.0, x[2] + 4.0};
  CHECK(f.a(x)(0, 0) == doctest::Approx(f.a(shifted)(0, 0)).epsilon(1e-12));
  CHECK(rot.b(x)[0] == doctest::Approx(rot.b(shifted)[0]).epsilon(1e-12));
}

TEST_CASE("ellipticity check confirms the declared bounds") {
  const TorusGrid grid(3, 16, 1.0);
  for (const char* name : {"laplace", "aniso-diag", "smooth-var", "rotation-drift",
                           "shear-drift", "gradient-drift"}) {
    const CoefficientField f = builtinField(name, {}, 1.0);
    const EllipticityReport rep = ellipticityCheck(f, grid, 500);
    CHECK(rep.pass);
    CHECK(rep.minQuadraticForm >= f.ellipticityBound - 1e-12);
  }
  CHECK_THROWS_AS(ellipticityCheck(builtinField("laplace", {}, 1.0), grid, 0),
                  std::invalid_argument);
}
