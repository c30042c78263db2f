#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ptk/coeffs.hpp"
#include "ptk/grid.hpp"
#include "ptk/sparse.hpp"

namespace ptk {

enum class Scheme { Upwind, Central };

std::string schemeName(Scheme s);

/// Sparse Markov-generator discretization of div(a grad) + b.grad (or of a
/// killed restriction of it). `cells` maps local row indices to global cell
/// ids; for a full-torus matrix it is the identity map.
struct GeneratorMatrix {
  CsrMatrix mat;
  const TorusGrid* grid = nullptr;
  Scheme scheme = Scheme::Upwind;
  std::string fieldFamily;
  std::vector<Index> cells;

  bool isKilled() const { return static_cast<Index>(cells.size()) != grid->cellCount(); }
};

/// Finite-volume assembly: diffusion as face-flux differences with the face
/// coefficient evaluated at the face midpoint; drift by first-order upwind
/// (default) or second-order central differences. Row sums vanish
/// identically. Only diagonal a(x) is supported.
GeneratorMatrix assembleGenerator(const CoefficientField& field, const TorusGrid& grid,
                                  Scheme scheme = Scheme::Upwind);

/// Variant with a tabulated per-cell drift (used by the analytic dual).
GeneratorMatrix assembleGeneratorWithDrift(const CoefficientField& field,
                                           const TorusGrid& grid, Scheme scheme,
                                           const std::vector<Point>& driftPerCell,
                                           const std::string& familyTag);

/// Rows/columns restricted to cells of D; couplings to the outside dropped
/// (absorption). Throws "degenerate domain" if D is empty or the whole torus.
GeneratorMatrix killedSubmatrix(const GeneratorMatrix& M, const RegionMask& D);

struct InvariantDensity {
  std::vector<double> pi;  // per-cell probabilities, sum 1
  std::vector<double> mu;  // density pi / h^d
  double stationarityResidual = 0.0;
  int powerIterations = 0;
};

/// Solves M^T pi = 0, sum pi = 1, pi > 0 by shifted inverse power iteration.
/// Requires the upwind scheme (irreducible CTMC generator on the torus).
InvariantDensity invariantDensity(const GeneratorMatrix& M, double residualTol = 1e-10,
                                  int maxPowerIterations = 200, double shift = -1.0);

enum class DualMode { DiscreteAdjoint, Analytic };

/// M* = diag(pi)^-1 M^T diag(pi); exact discrete duality partner of M.
GeneratorMatrix discreteAdjoint(const GeneratorMatrix& M, const InvariantDensity& density);

/// Dual generator. DiscreteAdjoint: M* = diag(pi)^-1 M^T diag(pi) (exact
/// discrete duality). Analytic: assembly of div(a grad) + ((2/mu) a grad mu - b).grad
/// with grad mu by central differences (cross-check only).
GeneratorMatrix dualGenerator(const GeneratorMatrix& M, const CoefficientField& field,
                              const InvariantDensity& density, DualMode mode);

/// Matrix Market coordinate text format (1-based indices).
void writeMatrixMarket(const CsrMatrix& A, std::ostream& out);

}  // namespace ptk
