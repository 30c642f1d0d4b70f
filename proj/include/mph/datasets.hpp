#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mph/mesh_io.hpp"
#include "mph/persistence.hpp"

namespace mph {

enum class SyntheticClass { sphere, torus, clusters, line };

std::optional<SyntheticClass> synthetic_class_from_name(const std::string& name);
std::string synthetic_class_name(SyntheticClass cls);

// sphere: uniform directions on the unit sphere; torus: uniform angles on a
// torus with radii R=1, r=0.35; clusters: equal-size draws from three
// sigma=0.15 Gaussian blobs at fixed well-separated centers; line: uniform on
// a length-2 segment. Isotropic Gaussian noise of the given sigma is added on
// top of each class. Deterministic per seed.
PointCloud make_synthetic(SyntheticClass cls, int n_points, double noise_sigma,
                          std::uint64_t seed);

struct DatasetItem {
  BifiltrationInvariants invariants;
  int label = 0;
  bool test = false;
  std::string filename;  // set when the dataset was persisted/loaded
};

struct LabeledDataset {
  std::vector<DatasetItem> items;
  std::vector<std::string> class_names;
  std::uint64_t split_seed = 0;
};

struct DatasetParams {
  int per_class = 20;
  int n_points = 160;
  double noise_sigma = 0.02;
  int k = 20;
  int bins_r = 20;
  int bins_t = 20;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
};

// Generates and featurizes per_class clouds per class and applies a
// stratified train/test split. Per-item seeds derive from (seed, class, item)
// so the result is independent of execution order; items may be featurized in
// parallel. Featurization failures are reported to stderr with the item's
// seed and the item is dropped.
LabeledDataset build_dataset(const std::vector<std::string>& classes, const DatasetParams& params);

// Directory of MPHGRID v1 files plus a manifest:
//   MPHMANIFEST v1 classes=<comma-separated names>
//   <filename> <label> <train|test>
void save_dataset(const std::string& dir, const LabeledDataset& ds);
LabeledDataset load_dataset(const std::string& dir);

}  // namespace mph
