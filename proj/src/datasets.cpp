#include "mph/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mph/mphgrid_io.hpp"
#include "mph/rng.hpp"

namespace mph {

std::optional<SyntheticClass> synthetic_class_from_name(const std::string& name) {
  if (name == "sphere") return SyntheticClass::sphere;
  if (name == "torus") return SyntheticClass::torus;
  if (name == "clusters") return SyntheticClass::clusters;
  if (name == "line") return SyntheticClass::line;
  return std::nullopt;
}

std::string synthetic_class_name(SyntheticClass cls) {
  switch (cls) {
    case SyntheticClass::sphere: return "sphere";
    case SyntheticClass::torus: return "torus";
    case SyntheticClass::clusters: return "clusters";
    case SyntheticClass::line: return "line";
  }
  return "?";
}

namespace {

constexpr double kTau = 2.0 * 3.14159265358979323846;

Vec3 unit_direction(Rng& rng) {
  for (;;) {
    Vec3 v = {rng.gauss(), rng.gauss(), rng.gauss()};
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (norm > 1e-12) return {v[0] / norm, v[1] / norm, v[2] / norm};
  }
}

}  // namespace

PointCloud make_synthetic(SyntheticClass cls, int n_points, double noise_sigma,
                          std::uint64_t seed) {
  if (n_points < 16) throw std::invalid_argument("make_synthetic: need at least 16 points");
  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(n_points));

  static const Vec3 kCenters[3] = {{0.0, 0.0, 0.0}, {2.5, 0.0, 0.0}, {0.0, 2.5, 0.0}};

  for (int i = 0; i < n_points; ++i) {
    Vec3 p{};
    switch (cls) {
      case SyntheticClass::sphere:
        p = unit_direction(rng);
        break;
      case SyntheticClass::torus: {
        const double u = rng.uniform(0.0, kTau);
        const double v = rng.uniform(0.0, kTau);
        const double ring = 1.0 + 0.35 * std::cos(v);
        p = {ring * std::cos(u), ring * std::sin(u), 0.35 * std::sin(v)};
        break;
      }
      case SyntheticClass::clusters: {
        const Vec3& c = kCenters[i % 3];  // equal-size round robin
        p = {c[0] + 0.15 * rng.gauss(), c[1] + 0.15 * rng.gauss(), c[2] + 0.15 * rng.gauss()};
        break;
      }
      case SyntheticClass::line: {
        const double t = rng.uniform();
        p = {2.0 * t, 0.0, 0.0};
        break;
      }
    }
    if (noise_sigma > 0.0) {
      p[0] += noise_sigma * rng.gauss();
      p[1] += noise_sigma * rng.gauss();
      p[2] += noise_sigma * rng.gauss();
    }
    cloud.points.push_back(p);
  }
  return cloud;
}

LabeledDataset build_dataset(const std::vector<std::string>& classes,
                             const DatasetParams& params) {
  if (params.per_class < 2) throw std::invalid_argument("build_dataset: per_class must be >= 2");
  if (params.test_fraction < 0.0 || params.test_fraction > 1.0)
    throw std::invalid_argument("build_dataset: test_fraction must be in [0,1]");
  std::vector<SyntheticClass> kinds;
  for (const auto& name : classes) {
    auto cls = synthetic_class_from_name(name);
    if (!cls) throw std::invalid_argument("unknown class '" + name + "'");
    kinds.push_back(*cls);
  }

  const int total = static_cast<int>(classes.size()) * params.per_class;
  std::vector<DatasetItem> slots(static_cast<std::size_t>(total));
  std::vector<char> ok(static_cast<std::size_t>(total), 0);

#pragma omp parallel for schedule(dynamic)
  for (int idx = 0; idx < total; ++idx) {
    const int c = idx / params.per_class;
    const int i = idx % params.per_class;
    const std::uint64_t item_seed = mix_seed(params.seed, static_cast<std::uint64_t>(c),
                                             static_cast<std::uint64_t>(i));
    try {
      PointCloud cloud = make_synthetic(kinds[static_cast<std::size_t>(c)], params.n_points,
                                        params.noise_sigma, item_seed);
      DatasetItem item;
      item.invariants = featurize(cloud, params.k, params.bins_r, params.bins_t);
      item.label = c;
      slots[static_cast<std::size_t>(idx)] = std::move(item);
      ok[static_cast<std::size_t>(idx)] = 1;
    } catch (const std::exception& e) {
#pragma omp critical
      std::cerr << "featurization failed for class " << classes[static_cast<std::size_t>(c)]
                << " item " << i << " (seed " << item_seed << "): " << e.what() << '\n';
    }
  }

  LabeledDataset ds;
  ds.class_names = classes;
  ds.split_seed = params.seed;
  for (int idx = 0; idx < total; ++idx)
    if (ok[static_cast<std::size_t>(idx)])
      ds.items.push_back(std::move(slots[static_cast<std::size_t>(idx)]));

  // stratified split: per class, round(count * test_fraction) items, chosen by
  // a seeded shuffle of that class's item positions
  for (std::size_t c = 0; c < classes.size(); ++c) {
    std::vector<std::size_t> positions;
    for (std::size_t t = 0; t < ds.items.size(); ++t)
      if (ds.items[t].label == static_cast<int>(c)) positions.push_back(t);
    const int n_test = static_cast<int>(
        std::floor(static_cast<double>(positions.size()) * params.test_fraction + 0.5));
    Rng rng(mix_seed(params.seed, static_cast<std::uint64_t>(c), 0xFFFFFFFFull));
    for (std::size_t i = 0; i + 1 < positions.size(); ++i) {
      const std::size_t j = i + rng.below(positions.size() - i);
      std::swap(positions[i], positions[j]);
    }
    for (int i = 0; i < n_test && i < static_cast<int>(positions.size()); ++i)
      ds.items[positions[static_cast<std::size_t>(i)]].test = true;
  }
  return ds;
}

void save_dataset(const std::string& dir, const LabeledDataset& ds) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::string names;
  for (std::size_t c = 0; c < ds.class_names.size(); ++c) {
    if (c) names += ',';
    names += ds.class_names[c];
  }
  std::ofstream manifest(fs::path(dir) / "manifest.txt", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot write manifest in '" + dir + "'");
  manifest << "MPHMANIFEST v1 classes=" << names << '\n';
  for (std::size_t t = 0; t < ds.items.size(); ++t) {
    const auto& item = ds.items[t];
    char buf[64];
    std::snprintf(buf, sizeof buf, "item_%04zu_%s.mphgrid", t,
                  ds.class_names[static_cast<std::size_t>(item.label)].c_str());
    write_mphgrid_file((fs::path(dir) / buf).string(), item.invariants);
    manifest << buf << ' ' << item.label << ' ' << (item.test ? "test" : "train") << '\n';
  }
  if (!manifest) throw std::runtime_error("manifest write failed in '" + dir + "'");
}

LabeledDataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream manifest(fs::path(dir) / "manifest.txt", std::ios::binary);
  if (!manifest) throw std::runtime_error("cannot open manifest in '" + dir + "'");
  std::string line;
  if (!std::getline(manifest, line) || line.rfind("MPHMANIFEST v1 classes=", 0) != 0)
    throw std::runtime_error("bad manifest header in '" + dir + "'");

  LabeledDataset ds;
  {
    std::string names = line.substr(std::string("MPHMANIFEST v1 classes=").size());
    std::istringstream ss(names);
    std::string name;
    while (std::getline(ss, name, ','))
      if (!name.empty()) ds.class_names.push_back(name);
  }
  if (ds.class_names.empty()) throw std::runtime_error("manifest lists no classes");

  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string fname, tag;
    int label;
    if (!(ss >> fname >> label >> tag) || (tag != "train" && tag != "test"))
      throw std::runtime_error("bad manifest line '" + line + "'");
    if (label < 0 || label >= static_cast<int>(ds.class_names.size()))
      throw std::runtime_error("manifest label out of range in '" + line + "'");
    DatasetItem item;
    item.invariants = read_mphgrid_file((fs::path(dir) / fname).string());
    item.label = label;
    item.test = tag == "test";
    item.filename = fname;
    ds.items.push_back(std::move(item));
  }
  if (ds.items.empty()) throw std::runtime_error("manifest lists no items");
  return ds;
}

}  // namespace mph
