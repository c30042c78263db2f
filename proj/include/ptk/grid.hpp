#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ptk {

using Index = std::int64_t;

/// A point in the periodic box [0,l)^d. Only the first `dim` entries of a
/// grid's points are meaningful; trailing entries are zero.
using Point = std::array<double, 3>;

/// Cell-centered periodic lattice on the torus [0,l)^d.
/// Immutable after construction; safe to share across threads.
struct TorusGrid {
  int dim;            // 2 or 3
  int cellsPerSide;   // n >= 8
  double sideLength;  // l > 0
  double spacing;     // h = l / n (derived)

  TorusGrid(int d, int n, double length);

  Index cellCount() const { return cells_; }

  std::array<int, 3> multiIndex(Index cell) const;
  /// Linear index from a (possibly out-of-range) multi-index; wraps periodically.
  Index linearIndex(int i, int j, int k = 0) const;
  Point cellCenter(Index cell) const;
  /// Neighbor across one face; step is +1 or -1 along `axis`.
  Index neighbor(Index cell, int axis, int step) const;
  /// Cell whose box contains p (coordinates wrapped into [0,l)).
  Index cellContaining(const Point& p) const;

 private:
  Index cells_;
};

/// Euclidean length of the minimum-image displacement between p and q.
double torusDistance(const Point& p, const Point& q, const TorusGrid& grid);

struct BallSpec {
  Point center{};
  double radius = 0.0;
};

/// Cell subset of a TorusGrid with its one-cell-thick discrete boundary layers.
struct RegionMask {
  const TorusGrid* grid = nullptr;
  std::vector<std::uint8_t> member;  // size cellCount()
  std::vector<Index> cells;          // member cells, ascending
  std::vector<Index> innerBoundary;  // member cells with >=1 outside neighbor
  std::vector<Index> outerBoundary;  // outside cells with >=1 inside neighbor

  bool contains(Index cell) const { return member[static_cast<std::size_t>(cell)] != 0; }
  Index size() const { return static_cast<Index>(cells.size()); }
};

/// Builds a RegionMask (cells, boundary layers) from a membership vector.
RegionMask maskFromMembership(const TorusGrid& grid, std::vector<std::uint8_t> member);

/// Cells whose centers lie within torus distance `radius` of the ball center.
/// Throws: "under-resolved region" if radius < 2h, "wrapping ball" if radius >= l/2.
RegionMask makeBallMask(const TorusGrid& grid, const BallSpec& ball);

RegionMask complementMask(const RegionMask& mask);

}  // namespace ptk
