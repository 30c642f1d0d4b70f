#include "mph/grid_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mph {

GridPoint meet(GridPoint a, GridPoint b) {
  return {std::min(a.x, b.x), std::min(a.y, b.y)};
}

GridPoint join(GridPoint a, GridPoint b) {
  return {std::max(a.x, b.x), std::max(a.y, b.y)};
}

bool leq(GridPoint a, GridPoint b) {
  return a.x <= b.x && a.y <= b.y;
}

namespace {

std::vector<int> spaced_sites(int max_index, int s) {
  std::vector<int> sites;
  sites.reserve(s);
  for (int i = 0; i < s; ++i) {
    double v = static_cast<double>(i) * max_index / (s - 1);
    sites.push_back(static_cast<int>(std::floor(v + 0.5)));
  }
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  return sites;
}

}  // namespace

KernelSupport kernel_support(const GridLattice& lat, int s) {
  if (s < 2) throw std::invalid_argument("kernel_support: s must be >= 2");
  if (s > std::min(lat.m, lat.n) + 1)
    throw std::invalid_argument("kernel_support: s exceeds lattice size");
  return {spaced_sites(lat.m, s), spaced_sites(lat.n, s)};
}

}  // namespace mph
