#pragma once

#include <vector>

namespace mph {

// Element of the product lattice [m] x [n].
struct GridPoint {
  int x = 0;
  int y = 0;
  bool operator==(const GridPoint&) const = default;
};

// The finite lattice [m] x [n] = {0..m} x {0..n}; bottom (0,0), top (m,n).
struct GridLattice {
  int m = 0;
  int n = 0;
  bool operator==(const GridLattice&) const = default;
  bool contains(GridPoint p) const { return p.x >= 0 && p.x <= m && p.y >= 0 && p.y <= n; }
};

// Product support xs * ys of a lattice-convolution kernel; always holds the
// lattice's bottom and top coordinates.
struct KernelSupport {
  std::vector<int> xs;
  std::vector<int> ys;
  bool operator==(const KernelSupport&) const = default;
};

GridPoint meet(GridPoint a, GridPoint b);
GridPoint join(GridPoint a, GridPoint b);

// componentwise order
bool leq(GridPoint a, GridPoint b);

// Evenly spaced s-site support per axis: xs[i] = round(i*m/(s-1)) with half-up
// rounding, deduplicated. Requires 2 <= s <= min(m,n)+1.
KernelSupport kernel_support(const GridLattice& lat, int s);

}  // namespace mph
