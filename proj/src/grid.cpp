#include "ptk/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace ptk {

TorusGrid::TorusGrid(int d, int n, double length)
    : dim(d), cellsPerSide(n), sideLength(length), spacing(length / n) {
  if (d < 2 || d > 3) throw std::invalid_argument("dimension must be 2 or 3");
  if (n < 8) throw std::invalid_argument("cells per side must be >= 8");
  if (!(length > 0.0)) throw std::invalid_argument("side length must be positive");
  cells_ = 1;
  for (int k = 0; k < d; ++k) cells_ *= n;
}

std::array<int, 3> TorusGrid::multiIndex(Index cell) const {
  const Index n = cellsPerSide;
  std::array<int, 3> m{0, 0, 0};
  m[0] = static_cast<int>(cell % n);
  m[1] = static_cast<int>((cell / n) % n);
  if (dim == 3) m[2] = static_cast<int>(cell / (n * n));
  return m;
}

Index TorusGrid::linearIndex(int i, int j, int k) const {
  const int n = cellsPerSide;
  auto wrap = [n](int v) {
    v %= n;
    return v < 0 ? v + n : v;
  };
  Index lin = wrap(i) + Index(n) * wrap(j);
  if (dim == 3) lin += Index(n) * n * wrap(k);
  return lin;
}

Point TorusGrid::cellCenter(Index cell) const {
  const auto m = multiIndex(cell);
  Point p{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) p[k] = (m[k] + 0.5) * spacing;
  return p;
}

Index TorusGrid::neighbor(Index cell, int axis, int step) const {
  auto m = multiIndex(cell);
  m[axis] += step;
  return linearIndex(m[0], m[1], m[2]);
}

Index TorusGrid::cellContaining(const Point& p) const {
  std::array<int, 3> m{0, 0, 0};
  for (int k = 0; k < dim; ++k) {
    double x = std::fmod(p[k], sideLength);
    if (x < 0.0) x += sideLength;
    m[k] = static_cast<int>(x / spacing);
    if (m[k] >= cellsPerSide) m[k] = cellsPerSide - 1;
  }
  return linearIndex(m[0], m[1], m[2]);
}

double torusDistance(const Point& p, const Point& q, const TorusGrid& grid) {
  double sum = 0.0;
  for (int k = 0; k < grid.dim; ++k) {
    double d = std::fabs(p[k] - q[k]);
    d = std::fmod(d, grid.sideLength);
    d = std::min(d, grid.sideLength - d);
    sum += d * d;
  }
  return std::sqrt(sum);
}

RegionMask maskFromMembership(const TorusGrid& grid, std::vector<std::uint8_t> member) {
  RegionMask mask;
  mask.grid = &grid;
  mask.member = std::move(member);
  const Index total = grid.cellCount();
  for (Index c = 0; c < total; ++c) {
    bool inside = mask.member[static_cast<std::size_t>(c)] != 0;
    bool touchesOther = false;
    for (int axis = 0; axis < grid.dim && !touchesOther; ++axis) {
      for (int step : {-1, 1}) {
        const Index nb = grid.neighbor(c, axis, step);
        if ((mask.member[static_cast<std::size_t>(nb)] != 0) != inside) {
          touchesOther = true;
          break;
        }
      }
    }
    if (inside) {
      mask.cells.push_back(c);
      if (touchesOther) mask.innerBoundary.push_back(c);
    } else if (touchesOther) {
      mask.outerBoundary.push_back(c);
    }
  }
  return mask;
}

RegionMask makeBallMask(const TorusGrid& grid, const BallSpec& ball) {
  if (ball.radius < 2.0 * grid.spacing)
    throw std::invalid_argument("under-resolved region");
  if (ball.radius >= 0.5 * grid.sideLength)
    throw std::invalid_argument("wrapping ball");
  std::vector<std::uint8_t> member(static_cast<std::size_t>(grid.cellCount()), 0);
  const Index total = grid.cellCount();
  for (Index c = 0; c < total; ++c) {
    if (torusDistance(grid.cellCenter(c), ball.center, grid) < ball.radius)
      member[static_cast<std::size_t>(c)] = 1;
  }
  return maskFromMembership(grid, std::move(member));
}

RegionMask complementMask(const RegionMask& mask) {
  std::vector<std::uint8_t> member(mask.member.size());
  for (std::size_t i = 0; i < member.size(); ++i) member[i] = mask.member[i] ? 0 : 1;
  return maskFromMembership(*mask.grid, std::move(member));
}

}  // namespace ptk
