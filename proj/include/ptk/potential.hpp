#pragma once

#include <map>
#include <string>
#include <vector>

#include "ptk/generator.hpp"
#include "ptk/grid.hpp"

namespace ptk {

/// E_x[T_D] on D, zero outside. Values are stored on the full grid.
struct ExitTimeField {
  RegionMask domain;
  std::vector<double> values;
  std::string provenance;  // "primal" or "dual"
  SolveReport solve;
};

/// Green column g_D(., y) as a continuum density (chain occupation time of y
/// divided by h^d), stored on the full grid, zero outside D.
struct GreenColumn {
  RegionMask domain;
  Index source = -1;
  std::vector<double> density;     // g_D(., y)
  std::vector<double> occupation;  // chain quantity N(., y) = density * h^d
  SolveReport solve;
};

/// h_{A,B}: 1 on A, 0 on B, generator-harmonic in between. Full grid.
struct HarmonicExtension {
  RegionMask regionA;
  RegionMask regionB;
  std::vector<double> values;
  SolveReport solve;
};

struct CapacityResult {
  double energy = 0.0;  // -<h, M h>_pi
  double flux = 0.0;    // sum_{x in A} (-M h)(x) pi(x)
  double relativeMismatch = 0.0;
};

struct EquilibriumMeasure {
  RegionMask support;           // region A
  std::vector<double> weights;  // full grid, nonzero only on A
  double mass = 0.0;
};

struct IdentityReport {
  std::string name;
  double maxResidual = 0.0;
  bool pass = false;
  std::map<std::string, double> details;
};

ExitTimeField exitTime(const GeneratorMatrix& killed, const RegionMask& D,
                       const std::string& provenance = "primal");

/// Throws "source outside domain" if sourceCell is not in D.
GreenColumn greenColumn(const GeneratorMatrix& killed, const RegionMask& D, Index sourceCell);

/// Throws "regions not separated" when A, B overlap or touch (no empty cell
/// layer between them).
HarmonicExtension harmonicExtension(const GeneratorMatrix& M, const RegionMask& A,
                                    const RegionMask& B);

CapacityResult capacity(const GeneratorMatrix& M, const InvariantDensity& density,
                        const HarmonicExtension& h);
CapacityResult capacity(const GeneratorMatrix& M, const InvariantDensity& density,
                        const RegionMask& A, const RegionMask& B);

EquilibriumMeasure equilibriumMeasure(const GeneratorMatrix& M, const InvariantDensity& density,
                                      const HarmonicExtension& h);

/// Verifies h(x) = sum_y G_{B^c}(x,y) nu(y)/pi(y): equals h off A u B and 1 on A.
IdentityReport representationCheck(const EquilibriumMeasure& nu, const HarmonicExtension& h,
                                   const GeneratorMatrix& M, const InvariantDensity& density);

/// Extremal locations of a Green column over nested regions U inside V.
IdentityReport annulusExtremaCheck(const GreenColumn& g, const RegionMask& U,
                                   const RegionMask& V);

/// Random-Dirichlet-data maximum principle scan on D.
IdentityReport maximumPrincipleCheck(const GeneratorMatrix& M, const RegionMask& D,
                                     int trials, std::uint64_t seed = 2024);

/// Solves the Dirichlet problem M u = 0 in D with u = data on the outer
/// boundary layer (full-grid data vector; only outerBoundary entries are
/// read). Returns a full-grid vector: u in D, data on outerBoundary, zero
/// elsewhere.
std::vector<double> solveDirichlet(const GeneratorMatrix& M, const RegionMask& D,
                                   const std::vector<double>& boundaryData,
                                   SolveReport* reportOut = nullptr);

}  // namespace ptk
