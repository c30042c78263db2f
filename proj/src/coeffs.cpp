#include "ptk/coeffs.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace ptk {

namespace {

double getParam(const std::map<std::string, double>& params, const std::string& key,
                double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

CoefficientField builtinField(const std::string& name,
                              const std::map<std::string, double>& params,
                              double period) {
  CoefficientField f;
  f.family = name;
  f.params = params;
  f.period = period;
  const double w = kTwoPi / period;

  if (name == "laplace") {
    f.a = [](const Point&) { return Mat3::identity(); };
    f.b = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
    f.aDivergence = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
    f.ellipticityBound = 1.0;
  } else if (name == "aniso-diag") {
    const double a1 = getParam(params, "a1", 2.0);
    const double a2 = getParam(params, "a2", 1.0);
    const double a3 = getParam(params, "a3", 0.5);
    if (a1 <= 0 || a2 <= 0 || a3 <= 0) throw std::invalid_argument("ellipticity violated");
    f.a = [a1, a2, a3](const Point&) {
      Mat3 a;
      a(0, 0) = a1;
      a(1, 1) = a2;
      a(2, 2) = a3;
      return a;
    };
    f.b = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
    f.aDivergence = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
    f.ellipticityBound = std::min(a1, std::min(a2, a3));
    f.params["a1"] = a1;
    f.params["a2"] = a2;
    f.params["a3"] = a3;
  } else if (name == "smooth-var") {
    const double eps = getParam(params, "eps", 0.5);
    if (eps >= 1.0 || eps < 0.0) throw std::invalid_argument("ellipticity violated");
    // a(x) = (1 + eps * prod_k sin(w x_k)) I  over the active dimensions;
    // the product runs over all three coordinates, trailing ones fixed at 0
    // contribute sin(0)=0 only in 2-d, so restrict to the first two there.
    // We use all three coordinates; for 2-d grids the third coordinate is 0
    // and the field degenerates to a = I, still elliptic.
    f.a = [eps, w](const Point& x) {
      const double c = 1.0 + eps * std::sin(w * x[0]) * std::sin(w * x[1]) * std::sin(w * x[2]);
      Mat3 a;
      a(0, 0) = a(1, 1) = a(2, 2) = c;
      return a;
    };
    f.b = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
    f.aDivergence = [eps, w](const Point& x) {
      const double s0 = std::sin(w * x[0]), s1 = std::sin(w * x[1]), s2 = std::sin(w * x[2]);
      const double c0 = std::cos(w * x[0]), c1 = std::cos(w * x[1]), c2 = std::cos(w * x[2]);
      return Point{eps * w * c0 * s1 * s2, eps * w * s0 * c1 * s2, eps * w * s0 * s1 * c2};
    };
    f.ellipticityBound = 1.0 - eps;
    f.params["eps"] = eps;
  } else if (name == "rotation-drift") {
    const double s = getParam(params, "strength", 1.0);
    // Divergence-free rotational drift with each component independent of its
    // own coordinate, so the uniform density is exactly stationary for the
    // upwind discretization as well.
    f.a = [](const Point&) { return Mat3::identity(); };
    f.b = [s, w](const Point& x) {
      return Point{-s * std::sin(w * x[1]), s * std::sin(w * x[0]), 0.0};
    };
    f.aDivergence = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
    f.ellipticityBound = 1.0;
    f.params["strength"] = s;
  } else if (name == "shear-drift") {
    const double s = getParam(params, "strength", 1.0);
    f.a = [](const Point&) { return Mat3::identity(); };
    f.b = [s, w](const Point& x) { return Point{s * std::sin(w * x[1]), 0.0, 0.0}; };
    f.aDivergence = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
    f.ellipticityBound = 1.0;
    f.params["strength"] = s;
  } else if (name == "gradient-drift") {
    const double s = getParam(params, "strength", 1.0);
    // V(x) = s cos(w x1) cos(w x2); b = grad V; invariant density ~ exp(V).
    f.a = [](const Point&) { return Mat3::identity(); };
    f.b = [s, w](const Point& x) {
      return Point{-s * w * std::sin(w * x[0]) * std::cos(w * x[1]),
                   -s * w * std::cos(w * x[0]) * std::sin(w * x[1]), 0.0};
    };
    f.aDivergence = [](const Point&) { return Point{0.0, 0.0, 0.0}; };
    f.potential = [s, w](const Point& x) { return s * std::cos(w * x[0]) * std::cos(w * x[1]); };
    f.ellipticityBound = 1.0;
    f.params["strength"] = s;
  } else {
    throw std::invalid_argument("unknown coefficient family: " + name);
  }
  return f;
}

EllipticityReport ellipticityCheck(const CoefficientField& field, const TorusGrid& grid,
                                   int samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> cellDist(0, grid.cellCount() - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double minQuad = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const Point x = grid.cellCenter(cellDist(rng));
    Point v{0.0, 0.0, 0.0};
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (int k = 0; k < grid.dim; ++k) {
        v[k] = gauss(rng);
        norm2 += v[k] * v[k];
      }
    } while (norm2 < 1e-12);
    const double inv = 1.0 / std::sqrt(norm2);
    for (int k = 0; k < grid.dim; ++k) v[k] *= inv;
    const Mat3 a = field.a(x);
    double quad = 0.0;
    for (int i = 0; i < grid.dim; ++i)
      for (int j = 0; j < grid.dim; ++j) quad += v[i] * a(i, j) * v[j];
    minQuad = std::min(minQuad, quad);
  }
  EllipticityReport rep;
  rep.minQuadraticForm = minQuad;
  rep.pass = minQuad >= field.ellipticityBound - 1e-12;
  return rep;
}

}  // namespace ptk
