#pragma once

#include <string>
#include <vector>

#include "ptk/potential.hpp"

namespace ptk {

/// Per-ball empirical constants for one condition scan.
struct BallResult {
  BallSpec ball;
  double cUpper = 0.0;
  double cLower = 0.0;
  /// False when the shrunken-ball test set is empty at this resolution (for
  /// (G), everything inside the 2h exclusion radius); the row then counts
  /// only toward the upper constant.
  bool lowerDefined = true;
};

/// Empirical-constant evidence for one of the conditions (G), (E), (C), (Har).
struct ConditionReport {
  std::string condition;     // "G", "E", "C", "Har"
  std::string generatorTag;  // field family of the scanned generator
  double parameter = 0.0;    // K for (G)/(C), delta for (E)/(Har)
  std::uint64_t seed = 0;    // Harnack boundary-data seed, 0 otherwise
  std::vector<BallResult> rows;
  double worstUpper = 0.0;  // max over rows of cUpper
  double worstLower = 0.0;  // max over rows of cLower
  bool pass = false;        // constants finite and positive on the family
};

/// Conditions (C), (G) on the primal and (E) on the dual generator at two
/// resolutions, with the refinement-stability verdict of the theorem check.
struct EquivalenceReport {
  ConditionReport coarseC, coarseG, coarseE;
  ConditionReport fineC, fineG, fineE;
  double stabilityFactor = 0.0;  // worst coarse/fine constant ratio
  bool verdict = false;
};

/// Green-kernel comparability: per ball B(x0,R), C_upper bounds
/// g_B(y,x0) |y-x0|^{d-2} over B and C_lower bounds the reciprocal on the
/// shrunken ball (1/K)B. Cells within 2h of the source are excluded.
/// Throws "kernel undefined in this dimension" when d < 3.
ConditionReport checkG(const GeneratorMatrix& M, const std::vector<BallSpec>& balls, double K);

/// Exit-time comparability: C_upper = max_B E[T_B]/R^2, C_lower = max over
/// the shrunken ball deltaB of R^2/E[T_B].
ConditionReport checkE(const GeneratorMatrix& M, const std::vector<BallSpec>& balls,
                       double delta);

/// Capacity comparability: rho = cap(B, (KB)^c) R^2 / pi(B) per ball; reports
/// max rho (upper) and max 1/rho (lower).
ConditionReport checkC(const GeneratorMatrix& M, const InvariantDensity& density,
                       const std::vector<BallSpec>& balls, double K);

/// Harnack scan: random positive Dirichlet data on each ball, sup/inf ratio
/// of the solution over the shrunken ball deltaB; cUpper is the worst ratio.
ConditionReport checkHarnack(const GeneratorMatrix& M, const std::vector<BallSpec>& balls,
                             double delta, int trials, std::uint64_t seed = 7777);

/// Two-sided capacity/exit-time sandwich on a condenser (A, B), evaluated
/// with dual exit times on the complement of B. Details carry all four
/// quantities; pass means both inequalities hold.
IdentityReport checkSandwich(const GeneratorMatrix& M, const InvariantDensity& density,
                             const RegionMask& A, const RegionMask& B);

/// Runs (C), (G) on the primal and (E) on the dual (delta = 1/K) at n and 2n
/// and checks every worst constant moves by at most a factor 1.4.
EquivalenceReport equivalenceSuite(const CoefficientField& field, const TorusGrid& grid,
                                   const std::vector<BallSpec>& balls, double K,
                                   double stabilityFactor = 1.4);

}  // namespace ptk
