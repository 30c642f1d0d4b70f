#include "mph/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mph {

namespace {

struct UnionFind {
  std::vector<std::int32_t> parent;
  std::vector<std::int32_t> min_vertex;

  explicit UnionFind(int n) : parent(n), min_vertex(n) {
    std::iota(parent.begin(), parent.end(), 0);
    std::iota(min_vertex.begin(), min_vertex.end(), 0);
  }

  std::int32_t find(std::int32_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }

  void unite(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);  // keep the smaller root; no rank, paths stay short enough
    parent[b] = a;
    min_vertex[a] = std::min(min_vertex[a], min_vertex[b]);
  }
};

struct Edge {
  double d;
  std::int32_t u, v;
};

std::vector<Edge> sorted_edges(const DistanceMatrix& dmat) {
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(dmat.n) * (dmat.n - 1) / 2);
  for (std::int32_t i = 0; i < dmat.n; ++i)
    for (std::int32_t j = i + 1; j < dmat.n; ++j) edges.push_back({dmat.at(i, j), i, j});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.u != b.u) return a.u < b.u;
    return a.v < b.v;
  });
  return edges;
}

void check_filtration_inputs(const DistanceMatrix& dmat, const FilterValues& rho,
                             const GridScales& scales) {
  if (static_cast<int>(rho.rho.size()) != dmat.n)
    throw std::invalid_argument("filtration: rho size does not match point count");
  if (scales.r_values.size() < 1 || scales.t_values.size() < 1)
    throw std::invalid_argument("filtration: empty grid scales");
}

// One t-column: fixed vertex set, union-find grown incrementally along r.
void label_column(const DistanceMatrix& dmat, const FilterValues& rho,
                  const GridScales& scales, const std::vector<Edge>& edges, int j,
                  ComponentLabelGrid& out) {
  const int n = dmat.n;
  const int rows = static_cast<int>(scales.r_values.size());
  const double t = scales.t_values[static_cast<std::size_t>(j)];
  std::vector<char> active(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) active[static_cast<std::size_t>(v)] = rho.rho[static_cast<std::size_t>(v)] <= t;

  UnionFind uf(n);
  std::size_t ptr = 0;
  for (int i = 0; i < rows; ++i) {
    const double r = scales.r_values[static_cast<std::size_t>(i)];
    while (ptr < edges.size() && edges[ptr].d <= r) {
      const Edge& e = edges[ptr];
      if (active[static_cast<std::size_t>(e.u)] && active[static_cast<std::size_t>(e.v)])
        uf.unite(e.u, e.v);
      ++ptr;
    }
    std::int32_t* cell = out.cell(i, j);
    for (std::int32_t v = 0; v < n; ++v)
      cell[v] = active[static_cast<std::size_t>(v)] ? uf.min_vertex[uf.find(v)] : -1;
  }
}

}  // namespace

DistanceMatrix pairwise_distances(const PointCloud& cloud) {
  const int n = static_cast<int>(cloud.points.size());
  if (n == 0) throw std::invalid_argument("pairwise_distances: empty point cloud");
  for (const auto& p : cloud.points)
    for (double c : p)
      if (!std::isfinite(c)) throw std::runtime_error("pairwise_distances: non-finite coordinate");
  DistanceMatrix dmat;
  dmat.n = n;
  dmat.d.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const auto& a = cloud.points[static_cast<std::size_t>(i)];
      const auto& b = cloud.points[static_cast<std::size_t>(j)];
      const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
      const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
      dmat.at(i, j) = dist;
      dmat.at(j, i) = dist;
    }
  }
  return dmat;
}

FilterValues codensity(const DistanceMatrix& dmat, int k) {
  if (k < 1) throw std::invalid_argument("codensity: k must be positive");
  if (k > dmat.n - 1)
    throw std::invalid_argument("codensity: k must be < point count");
  FilterValues fv;
  fv.rho.resize(static_cast<std::size_t>(dmat.n));
  std::vector<std::pair<double, int>> near;
  near.reserve(static_cast<std::size_t>(dmat.n) - 1);
  for (int x = 0; x < dmat.n; ++x) {
    near.clear();
    for (int y = 0; y < dmat.n; ++y)
      if (y != x) near.emplace_back(dmat.at(x, y), y);
    std::sort(near.begin(), near.end());  // ties break toward the lower index
    double sum = 0.0;
    for (int i = 0; i < k; ++i) sum += near[static_cast<std::size_t>(i)].first;
    const double mean = sum / k;
    if (mean <= 0.0)
      throw std::runtime_error("degenerate codensity: duplicate points in the cloud");
    fv.rho[static_cast<std::size_t>(x)] = 1.0 / mean;
  }
  return fv;
}

GridScales grid_scales(const DistanceMatrix& dmat, const FilterValues& rho, int bins_r,
                       int bins_t) {
  if (bins_r < 2 || bins_t < 2) throw std::invalid_argument("grid_scales: bins must be >= 2");
  if (static_cast<int>(rho.rho.size()) != dmat.n)
    throw std::invalid_argument("grid_scales: rho size does not match point count");

  double max_d = 0.0;
  for (double v : dmat.d) max_d = std::max(max_d, v);
  double t_lo = rho.rho[0], t_hi = rho.rho[0];
  for (double v : rho.rho) {
    t_lo = std::min(t_lo, v);
    t_hi = std::max(t_hi, v);
  }

  // zero-width ranges are widened upward so the low endpoint (and the points
  // that realize it) stay inside the window
  const double eps = std::numeric_limits<double>::epsilon();
  if (max_d <= 0.0) max_d = 1024.0 * eps;
  if (t_hi <= t_lo) t_hi = t_lo + std::max(1.0, std::abs(t_lo)) * 1024.0 * eps;

  GridScales s;
  s.r_values.resize(static_cast<std::size_t>(bins_r));
  s.t_values.resize(static_cast<std::size_t>(bins_t));
  for (int i = 0; i < bins_r; ++i)
    s.r_values[static_cast<std::size_t>(i)] = max_d * i / (bins_r - 1);
  s.r_values.front() = 0.0;
  s.r_values.back() = max_d;
  for (int j = 0; j < bins_t; ++j)
    s.t_values[static_cast<std::size_t>(j)] = t_lo + (t_hi - t_lo) * j / (bins_t - 1);
  s.t_values.front() = t_lo;
  s.t_values.back() = t_hi;

  for (std::size_t i = 1; i < s.r_values.size(); ++i)
    if (!(s.r_values[i] > s.r_values[i - 1]))
      throw std::runtime_error("grid_scales: r axis not strictly increasing");
  for (std::size_t j = 1; j < s.t_values.size(); ++j)
    if (!(s.t_values[j] > s.t_values[j - 1]))
      throw std::runtime_error("grid_scales: t axis not strictly increasing");
  return s;
}

ComponentLabelGrid component_labels(const DistanceMatrix& dmat, const FilterValues& rho,
                                    const GridScales& scales) {
  check_filtration_inputs(dmat, rho, scales);
  ComponentLabelGrid lg;
  lg.rows = static_cast<int>(scales.r_values.size());
  lg.cols = static_cast<int>(scales.t_values.size());
  lg.n = dmat.n;
  lg.labels.assign(static_cast<std::size_t>(lg.rows) * lg.cols * lg.n, -1);

  const std::vector<Edge> edges = sorted_edges(dmat);

#pragma omp parallel for schedule(static)
  for (int j = 0; j < lg.cols; ++j) label_column(dmat, rho, scales, edges, j, lg);
  return lg;
}

IntGrid hilbert_from_labels(const ComponentLabelGrid& lg) {
  IntGrid grid(lg.rows, lg.cols);
  for (int i = 0; i < lg.rows; ++i)
    for (int j = 0; j < lg.cols; ++j) {
      const std::int32_t* cell = lg.cell(i, j);
      int count = 0;
      for (int v = 0; v < lg.n; ++v)
        if (cell[v] == v) ++count;  // canonical label == own index marks one component
      grid.at(i, j) = count;
    }
  return grid;
}

IntGrid hilbert_h0(const DistanceMatrix& dmat, const FilterValues& rho, const GridScales& scales) {
  return hilbert_from_labels(component_labels(dmat, rho, scales));
}

namespace {

// Sorted distinct component labels of one cell.
std::vector<std::int32_t> cell_components(const std::int32_t* cell, int n) {
  std::vector<std::int32_t> comps;
  for (int v = 0; v < n; ++v)
    if (cell[v] == v) comps.push_back(v);
  return comps;
}

int comp_index(const std::vector<std::int32_t>& comps, std::int32_t label) {
  return static_cast<int>(std::lower_bound(comps.begin(), comps.end(), label) - comps.begin());
}

// Matrix of "component containing it" from the cell at `from` into `to`.
Gf2Matrix component_map(const std::vector<std::int32_t>& from_comps, const std::int32_t* to_cell,
                        const std::vector<std::int32_t>& to_comps) {
  Gf2Matrix m(static_cast<int>(to_comps.size()), static_cast<int>(from_comps.size()));
  for (std::size_t c = 0; c < from_comps.size(); ++c) {
    const std::int32_t rep = from_comps[c];  // min vertex, still present upward
    m.set(comp_index(to_comps, to_cell[rep]), static_cast<int>(c));
  }
  return m;
}

Gf2Matrix hconcat(const Gf2Matrix& a, const Gf2Matrix& b, int rows) {
  Gf2Matrix m(rows, a.cols() + b.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (a.get(r, c)) m.set(r, c);
  for (int r = 0; r < b.rows(); ++r)
    for (int c = 0; c < b.cols(); ++c)
      if (b.get(r, c)) m.set(r, a.cols() + c);
  return m;
}

Gf2Matrix vconcat(const Gf2Matrix& a, const Gf2Matrix& b, int cols) {
  Gf2Matrix m(a.rows() + b.rows(), cols);
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c)
      if (a.get(r, c)) m.set(r, c);
  for (int r = 0; r < b.rows(); ++r)
    for (int c = 0; c < b.cols(); ++c)
      if (b.get(r, c)) m.set(a.rows() + r, c);
  return m;
}

// Koszul homology dimensions at one grading.
void koszul_cell(const GridModule& mod, int i, int j, int& xi0, int& xi1, int& xi2) {
  const int dim_a = mod.dim(i, j);
  const int dim_b1 = mod.dim(i - 1, j);
  const int dim_b2 = mod.dim(i, j - 1);
  const int dim_c = mod.dim(i - 1, j - 1);

  // d1: M(a-e1) (+) M(a-e2) -> M(a)
  Gf2Matrix d1(dim_a, dim_b1 + dim_b2);
  if (dim_b1 > 0) {
    const Gf2Matrix& mr = mod.map_r[mod.idx(i - 1, j)];
    if (dim_b2 > 0)
      d1 = hconcat(mr, mod.map_t[mod.idx(i, j - 1)], dim_a);
    else
      d1 = mr;
  } else if (dim_b2 > 0) {
    d1 = mod.map_t[mod.idx(i, j - 1)];
  }

  // d2: M(a-e1-e2) -> M(a-e1) (+) M(a-e2); in GF(2) the sign on the second
  // block vanishes
  Gf2Matrix d2(dim_b1 + dim_b2, dim_c);
  if (dim_c > 0)
    d2 = vconcat(mod.map_t[mod.idx(i - 1, j - 1)], mod.map_r[mod.idx(i - 1, j - 1)],
                 dim_c);

  const int r1 = d1.rank();
  const int r2 = d2.rank();
  xi0 = dim_a - r1;
  xi1 = (dim_b1 + dim_b2 - r1) - r2;
  xi2 = dim_c - r2;
}

}  // namespace

GridModule module_from_labels(const ComponentLabelGrid& lg) {
  GridModule mod;
  mod.rows = lg.rows;
  mod.cols = lg.cols;
  mod.dims.assign(static_cast<std::size_t>(lg.rows) * lg.cols, 0);
  mod.map_r.resize(mod.dims.size());
  mod.map_t.resize(mod.dims.size());

  std::vector<std::vector<std::int32_t>> comps(mod.dims.size());
  for (int i = 0; i < lg.rows; ++i)
    for (int j = 0; j < lg.cols; ++j) {
      comps[mod.idx(i, j)] = cell_components(lg.cell(i, j), lg.n);
      mod.dims[mod.idx(i, j)] = static_cast<int>(comps[mod.idx(i, j)].size());
    }

#pragma omp parallel for collapse(2) schedule(static)
  for (int i = 0; i < lg.rows; ++i)
    for (int j = 0; j < lg.cols; ++j) {
      if (i + 1 < lg.rows)
        mod.map_r[mod.idx(i, j)] =
            component_map(comps[mod.idx(i, j)], lg.cell(i + 1, j), comps[mod.idx(i + 1, j)]);
      if (j + 1 < lg.cols)
        mod.map_t[mod.idx(i, j)] =
            component_map(comps[mod.idx(i, j)], lg.cell(i, j + 1), comps[mod.idx(i, j + 1)]);
    }
  return mod;
}

BettiGrids koszul_betti(const GridModule& module) {
  BettiGrids b{IntGrid(module.rows, module.cols), IntGrid(module.rows, module.cols),
               IntGrid(module.rows, module.cols)};
#pragma omp parallel for collapse(2) schedule(dynamic)
  for (int i = 0; i < module.rows; ++i)
    for (int j = 0; j < module.cols; ++j) {
      int xi0, xi1, xi2;
      koszul_cell(module, i, j, xi0, xi1, xi2);
      b.xi0.at(i, j) = xi0;
      b.xi1.at(i, j) = xi1;
      b.xi2.at(i, j) = xi2;
    }
  return b;
}

BettiGrids betti_h0(const DistanceMatrix& dmat, const FilterValues& rho,
                    const GridScales& scales) {
  return koszul_betti(module_from_labels(component_labels(dmat, rho, scales)));
}

BifiltrationInvariants featurize(const PointCloud& cloud, int k, int bins_r, int bins_t) {
  if (static_cast<int>(cloud.points.size()) <= k)
    throw std::invalid_argument("featurize: k must be < point count");
  const DistanceMatrix dmat = pairwise_distances(cloud);
  const FilterValues rho = codensity(dmat, k);
  const GridScales scales = grid_scales(dmat, rho, bins_r, bins_t);
  const ComponentLabelGrid labels = component_labels(dmat, rho, scales);
  BifiltrationInvariants inv;
  inv.hilb = hilbert_from_labels(labels);
  BettiGrids betti = koszul_betti(module_from_labels(labels));
  inv.xi0 = std::move(betti.xi0);
  inv.xi1 = std::move(betti.xi1);
  inv.xi2 = std::move(betti.xi2);
  inv.scales = scales;
  return inv;
}

namespace reference {

ComponentLabelGrid component_labels(const DistanceMatrix& dmat, const FilterValues& rho,
                                    const GridScales& scales) {
  check_filtration_inputs(dmat, rho, scales);
  ComponentLabelGrid lg;
  lg.rows = static_cast<int>(scales.r_values.size());
  lg.cols = static_cast<int>(scales.t_values.size());
  lg.n = dmat.n;
  lg.labels.assign(static_cast<std::size_t>(lg.rows) * lg.cols * lg.n, -1);

  for (int i = 0; i < lg.rows; ++i) {
    for (int j = 0; j < lg.cols; ++j) {
      const double r = scales.r_values[static_cast<std::size_t>(i)];
      const double t = scales.t_values[static_cast<std::size_t>(j)];
      UnionFind uf(lg.n);
      for (std::int32_t u = 0; u < lg.n; ++u) {
        if (rho.rho[static_cast<std::size_t>(u)] > t) continue;
        for (std::int32_t v = u + 1; v < lg.n; ++v) {
          if (rho.rho[static_cast<std::size_t>(v)] > t) continue;
          if (dmat.at(u, v) <= r) uf.unite(u, v);
        }
      }
      std::int32_t* cell = lg.cell(i, j);
      for (std::int32_t v = 0; v < lg.n; ++v)
        cell[v] = rho.rho[static_cast<std::size_t>(v)] <= t ? uf.min_vertex[uf.find(v)] : -1;
    }
  }
  return lg;
}

BettiGrids koszul_betti(const GridModule& module) {
  BettiGrids b{IntGrid(module.rows, module.cols), IntGrid(module.rows, module.cols),
               IntGrid(module.rows, module.cols)};
  for (int i = 0; i < module.rows; ++i)
    for (int j = 0; j < module.cols; ++j) {
      int xi0, xi1, xi2;
      koszul_cell(module, i, j, xi0, xi1, xi2);
      b.xi0.at(i, j) = xi0;
      b.xi1.at(i, j) = xi1;
      b.xi2.at(i, j) = xi2;
    }
  return b;
}

}  // namespace reference

}  // namespace mph
