#pragma once

#include <cstdint>
#include <vector>

#include "mph/gf2.hpp"
#include "mph/mesh_io.hpp"

namespace mph {

// Symmetric non-negative metric with zero diagonal, row-major n x n.
struct DistanceMatrix {
  int n = 0;
  std::vector<double> d;
  double at(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
  double& at(int i, int j) { return d[static_cast<std::size_t>(i) * n + j]; }
};

// Codensity value per point; points with low rho enter the filtration first.
struct FilterValues {
  std::vector<double> rho;
};

// Discretization of the (r, t) parameter plane; both axes strictly increasing.
struct GridScales {
  std::vector<double> r_values;
  std::vector<double> t_values;
};

struct IntGrid {
  int rows = 0;
  int cols = 0;
  std::vector<int> v;
  IntGrid() = default;
  IntGrid(int r, int c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0) {}
  int& at(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
  int at(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }
  bool operator==(const IntGrid&) const = default;
};

struct BettiGrids {
  IntGrid xi0, xi1, xi2;
};

struct BifiltrationInvariants {
  IntGrid hilb, xi0, xi1, xi2;
  GridScales scales;
};

// Connected-component labels of the bifiltration graph at every grid cell.
// labels[cell(i,j)*n + v] is the smallest vertex index in v's component, or -1
// when v is not yet present (rho[v] > t_j).
struct ComponentLabelGrid {
  int rows = 0, cols = 0, n = 0;
  std::vector<std::int32_t> labels;
  const std::int32_t* cell(int i, int j) const {
    return labels.data() + (static_cast<std::size_t>(i) * cols + j) * n;
  }
  std::int32_t* cell(int i, int j) {
    return labels.data() + (static_cast<std::size_t>(i) * cols + j) * n;
  }
};

// A finite grid of GF(2) vector spaces with structure maps one step up each
// axis; cells below index 0 (and their maps) are implicitly zero. map_r at
// (i,j) is the matrix of M(i,j) -> M(i+1,j); map_t of M(i,j) -> M(i,j+1).
struct GridModule {
  int rows = 0, cols = 0;
  std::vector<int> dims;
  std::vector<Gf2Matrix> map_r;  // undefined content at i == rows-1
  std::vector<Gf2Matrix> map_t;  // undefined content at j == cols-1
  int dim(int i, int j) const {
    if (i < 0 || j < 0) return 0;
    return dims[static_cast<std::size_t>(i) * cols + j];
  }
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(i) * cols + j; }
};

DistanceMatrix pairwise_distances(const PointCloud& cloud);

// rho[x] = inverse mean distance to the k nearest other points; ties at the
// k-th distance break toward the lower point index.
FilterValues codensity(const DistanceMatrix& dmat, int k);

// r axis: bins_r even steps from 0 to the max pairwise distance; t axis:
// bins_t even steps over the codensity range (widened upward by an
// epsilon-scaled margin when the range has zero width).
GridScales grid_scales(const DistanceMatrix& dmat, const FilterValues& rho, int bins_r,
                       int bins_t);

ComponentLabelGrid component_labels(const DistanceMatrix& dmat, const FilterValues& rho,
                                    const GridScales& scales);

IntGrid hilbert_h0(const DistanceMatrix& dmat, const FilterValues& rho, const GridScales& scales);

// Multigraded Betti numbers from the three-term Koszul complex
//   0 -> M(a-e1-e2) -> M(a-e1) (+) M(a-e2) -> M(a) -> 0
// at every grading a, via GF(2) matrix ranks.
BettiGrids betti_h0(const DistanceMatrix& dmat, const FilterValues& rho, const GridScales& scales);

BettiGrids koszul_betti(const GridModule& module);
GridModule module_from_labels(const ComponentLabelGrid& lg);
IntGrid hilbert_from_labels(const ComponentLabelGrid& lg);

BifiltrationInvariants featurize(const PointCloud& cloud, int k, int bins_r, int bins_t);

namespace reference {

// Per-cell union-find from scratch; single-threaded baseline for the
// column-incremental parallel implementation above.
ComponentLabelGrid component_labels(const DistanceMatrix& dmat, const FilterValues& rho,
                                    const GridScales& scales);

// Serial sweep of the same per-cell Koszul computation.
BettiGrids koszul_betti(const GridModule& module);

}  // namespace reference

}  // namespace mph
