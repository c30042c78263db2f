#include <cmath>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "ptk/conditions.hpp"

using namespace ptk;

namespace {

Point snappedCenter(const TorusGrid& grid) {
  return grid.cellCenter(grid.cellContaining({0.5, 0.5, 0.5}));
}

}  // namespace

TEST_CASE("condition (G) reproduces the newtonian kernel constant") {
  const TorusGrid grid(3, 64, 1.0);
  const GeneratorMatrix M = assembleGenerator(builtinField("laplace", {}, 1.0), grid);
  const Point c = snappedCenter(grid);
  const std::vector<BallSpec> balls{{c, 0.1}, {c, 0.15}, {c, 0.2}, {c, 0.25}};
  const ConditionReport rep = checkG(M, balls, 2.0);

  CHECK(rep.pass);
  // g_B(y, x0) <= |x0-y|^{2-d}/(4 pi): the worst constant approaches 1/(4 pi).
  const double newton = 1.0 / (4.0 * std::numbers::pi);
  CHECK(std::fabs(rep.worstUpper - newton) / newton < 0.10);
  CHECK(rep.worstLower > 0.0);
  // Rows come back ordered by radius regardless of input order.
  const std::vector<BallSpec> shuffled{{c, 0.25}, {c, 0.1}, {c, 0.2}, {c, 0.15}};
  const ConditionReport rep2 = checkG(M, shuffled, 2.0);
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    CHECK(rep2.rows[i].ball.radius == rep.rows[i].ball.radius);
    CHECK(rep2.rows[i].cUpper == rep.rows[i].cUpper);
  }
}

TEST_CASE("condition (G) needs at least three dimensions") {
  const TorusGrid grid(2, 16, 1.0);
  const GeneratorMatrix M = assembleGenerator(builtinField("laplace", {}, 1.0), grid);
  CHECK_THROWS_WITH_AS(checkG(M, {{snappedCenter(grid), 0.2}}, 2.0),
                       "kernel undefined in this dimension", std::invalid_argument);
}

TEST_CASE("condition (G) constants are radius-stable for rotation drift") {
  const TorusGrid grid(3, 32, 1.0);
  const GeneratorMatrix M =
      assembleGenerator(builtinField("rotation-drift", {{"strength", 2.0}}, 1.0), grid);
  const Point c = snappedCenter(grid);
  const ConditionReport rep = checkG(M, {{c, 0.15}, {c, 0.2}, {c, 0.25}}, 2.0);
  CHECK(rep.pass);
  for (const BallResult& row : rep.rows) {
    CHECK(row.cUpper >= rep.worstUpper / 1.3);
    if (row.lowerDefined) CHECK(row.cLower >= rep.worstLower / 1.3);
  }
}

TEST_CASE("condition (E) reproduces the exit-time closed forms") {
  const TorusGrid grid(3, 64, 1.0);
  const GeneratorMatrix M = assembleGenerator(builtinField("laplace", {}, 1.0), grid);
  const Point c = snappedCenter(grid);
  const ConditionReport rep = checkE(M, {{c, 0.2}}, 0.5);
  CHECK(rep.pass);
  // sup_B E[T_B] = R^2/6 and inf over B/2 is R^2(1 - 1/4)/6, so the constants
  // approach 1/6 and 8. The lower constant carries the O(h) boundary bias of
  // the exit time twice (measured 0.065 relative at n=64).
  CHECK(std::fabs(rep.worstUpper - 1.0 / 6.0) * 6.0 < 0.05);
  CHECK(std::fabs(rep.worstLower - 8.0) / 8.0 < 0.08);
  CHECK_THROWS_AS(checkE(M, {{c, 0.2}}, 1.5), std::invalid_argument);
}

TEST_CASE("condition (E) on the dual generator stays bounded") {
  const TorusGrid grid(3, 32, 1.0);
  const GeneratorMatrix M = assembleGenerator(builtinField("shear-drift", {}, 1.0), grid);
  const InvariantDensity density = invariantDensity(M);
  const GeneratorMatrix dual = discreteAdjoint(M, density);
  const Point c = snappedCenter(grid);
  const ConditionReport rep = checkE(dual, {{c, 0.1}, {c, 0.15}, {c, 0.2}, {c, 0.25}}, 0.5);
  CHECK(rep.pass);
  for (const BallResult& row : rep.rows) {
    CHECK(row.cUpper >= rep.worstUpper / 1.3);
    CHECK(row.cLower >= rep.worstLower / 1.3);
  }
}

TEST_CASE("condition (C) ratio approaches 6 for the laplacian condenser") {
  const TorusGrid grid(3, 64, 1.0);
  const GeneratorMatrix M = assembleGenerator(builtinField("laplace", {}, 1.0), grid);
  const InvariantDensity density = invariantDensity(M);
  const Point c = snappedCenter(grid);
  const ConditionReport rep = checkC(M, density, {{c, 0.1}, {c, 0.15}, {c, 0.2}}, 2.0);
  CHECK(rep.pass);
  // Continuum value: cap * R^2 / mu(B) = 6; sanity envelope from the spec.
  CHECK(rep.worstUpper <= 10.0);
  CHECK(rep.worstLower <= 10.0);
  for (const BallResult& row : rep.rows) CHECK(std::fabs(row.cUpper - 6.0) / 6.0 < 0.10);
  CHECK_THROWS_AS(checkC(M, density, {{c, 0.2}}, 1.0), std::invalid_argument);
  CHECK_THROWS_WITH_AS(checkC(M, density, {{c, 0.3}}, 2.0), "wrapping ball",
                       std::invalid_argument);
}

TEST_CASE("harnack ratios are small and exactly 1 for constant data") {
  const TorusGrid grid(3, 16, 1.0);
  const GeneratorMatrix M = assembleGenerator(builtinField("laplace", {}, 1.0), grid);
  const Point c = snappedCenter(grid);

  // trials = 1 runs only the constant-data trial; the ratio must be 1.
  const ConditionReport constant = checkHarnack(M, {{c, 0.25}}, 0.5, 1);
  CHECK(constant.rows[0].cUpper == doctest::Approx(1.0).epsilon(1e-9));

  const ConditionReport rep = checkHarnack(M, {{c, 0.2}, {c, 0.25}}, 0.5, 40);
  CHECK(rep.pass);
  CHECK(rep.worstUpper < 3.5);  // classical Harnack envelope at delta = 1/2
  CHECK(rep.worstUpper > 1.0);
}

TEST_CASE("harnack ratios of the dual are comparable to the primal") {
  const TorusGrid grid(3, 16, 1.0);
  const GeneratorMatrix M =
      assembleGenerator(builtinField("rotation-drift", {{"strength", 2.0}}, 1.0), grid);
  const InvariantDensity density = invariantDensity(M);
  const GeneratorMatrix dual = discreteAdjoint(M, density);
  const Point c = snappedCenter(grid);
  const ConditionReport primal = checkHarnack(M, {{c, 0.25}}, 0.5, 30);
  const ConditionReport adjoint = checkHarnack(dual, {{c, 0.25}}, 0.5, 30);
  CHECK(primal.pass);
  CHECK(adjoint.pass);
  CHECK(adjoint.worstUpper < 2.0 * primal.worstUpper);
  CHECK(primal.worstUpper < 2.0 * adjoint.worstUpper);
}

TEST_CASE("capacity exit-time sandwich holds on condensers") {
  for (const char* family : {"laplace", "rotation-drift"}) {
    const TorusGrid grid(3, 16, 1.0);
    const GeneratorMatrix M =
        assembleGenerator(builtinField(family, {{"strength", 2.0}}, 1.0), grid);
    const InvariantDensity density = invariantDensity(M);
    const Point c = snappedCenter(grid);
    const RegionMask A = makeBallMask(grid, {c, 0.15});
    const RegionMask B = complementMask(makeBallMask(grid, {c, 0.35}));
    const IdentityReport rep = checkSandwich(M, density, A, B);
    CHECK(rep.pass);
    CHECK(rep.details.at("lower_bound") <= rep.details.at("inverse_capacity"));
    CHECK(rep.details.at("inverse_capacity") <= rep.details.at("upper_bound"));
  }
}

TEST_CASE("sandwich survives a degenerate single-cell plate") {
  const TorusGrid grid(3, 16, 1.0);
  const GeneratorMatrix M = assembleGenerator(builtinField("laplace", {}, 1.0), grid);
  const InvariantDensity density = invariantDensity(M);
  const Point c = snappedCenter(grid);
  std::vector<std::uint8_t> member(grid.cellCount(), 0);
  member[grid.cellContaining(c)] = 1;
  const RegionMask A = maskFromMembership(grid, std::move(member));
  const RegionMask B = complementMask(makeBallMask(grid, {c, 0.35}));
  const IdentityReport rep = checkSandwich(M, density, A, B);
  CHECK(rep.pass);
}

TEST_CASE("equivalence suite passes for laplace at coarse resolution") {
  const TorusGrid grid(3, 32, 1.0);
  const CoefficientField field = builtinField("laplace", {}, 1.0);
  const Point c{0.5, 0.5, 0.5};
  const std::vector<BallSpec> balls{{c, 0.15}, {c, 0.2}};
  const EquivalenceReport rep = equivalenceSuite(field, grid, balls, 2.0);
  CHECK(rep.verdict);
  CHECK(rep.stabilityFactor <= 1.4);
  CHECK(rep.coarseC.pass);
  CHECK(rep.coarseG.pass);
  CHECK(rep.coarseE.pass);
  CHECK(rep.coarseE.parameter == doctest::Approx(0.5));  // delta = 1/K
}
