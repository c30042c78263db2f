#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "ptk/grid.hpp"

namespace ptk {

/// Symmetric d x d coefficient matrix, stored dense 3x3 (row major).
struct Mat3 {
  std::array<double, 9> m{};
  double& operator()(int i, int j) { return m[3 * i + j]; }
  double operator()(int i, int j) const { return m[3 * i + j]; }
  static Mat3 identity() {
    Mat3 a;
    a(0, 0) = a(1, 1) = a(2, 2) = 1.0;
    return a;
  }
};

/// Analytic coefficient pair (a, b) of the operator div(a grad) + b.grad,
/// periodic with the torus period. Pure function object; safe to evaluate
/// concurrently.
struct CoefficientField {
  std::function<Mat3(const Point&)> a;
  std::function<Point(const Point&)> b;
  /// Row divergence sum_j d_j a_ij, in closed form (used by the SDE sampler).
  std::function<Point(const Point&)> aDivergence;
  /// Potential V with b = grad V, when the family has one (gradient-drift);
  /// empty otherwise.
  std::function<double(const Point&)> potential;
  double ellipticityBound = 1.0;  // declared lambda
  double period = 1.0;            // torus side length the field is periodic with
  std::string family;
  std::map<std::string, double> params;
};

/// Named families: laplace, aniso-diag, smooth-var, rotation-drift,
/// shear-drift, gradient-drift. `period` is the torus side length.
/// Throws on unknown tags and on parameters violating ellipticity.
CoefficientField builtinField(const std::string& name,
                              const std::map<std::string, double>& params,
                              double period);

struct EllipticityReport {
  double minQuadraticForm = 0.0;
  bool pass = false;
};

/// Min over sampled (cell center, random unit v) of v.a(x)v, compared
/// against the declared bound.
EllipticityReport ellipticityCheck(const CoefficientField& field, const TorusGrid& grid,
                                   int samples, std::uint64_t seed = 12345);

}  // namespace ptk
