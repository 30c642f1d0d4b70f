#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "mph/checkpoint.hpp"
#include "mph/datasets.hpp"
#include "mph/mesh_io.hpp"
#include "mph/mphgrid_io.hpp"
#include "mph/persistence.hpp"
#include "mph/train.hpp"

namespace {

struct BinSpec {
  int rows = 40;
  int cols = 40;
};

BinSpec parse_bins(const std::string& s) {
  BinSpec b;
  char sep = 0;
  std::istringstream ss(s);
  if (!(ss >> b.rows >> sep >> b.cols) || (sep != 'x' && sep != 'X') || b.rows < 2 || b.cols < 2 ||
      !ss.eof())
    throw CLI::ValidationError("--bins", "expected <R>x<T> with R,T >= 2, got '" + s + "'");
  return b;
}

void set_threads(int n) {
#ifdef _OPENMP
  omp_set_num_threads(n > 0 ? n : 1);
#else
  (void)n;
#endif
}

bool looks_like_off(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto i = line.find_first_not_of(" \t\r");
    if (i == std::string::npos) continue;
    if (line[i] == '#') continue;
    std::istringstream ss(line);
    std::string tok;
    ss >> tok;
    return tok == "OFF";
  }
  return false;
}

int run_featurize(const std::string& input, int k, const BinSpec& bins, const std::string& out,
                  bool normalize, int samples, const std::string& sample_mode,
                  std::uint64_t seed) {
  mph::PointCloud cloud;
  if (looks_like_off(input)) {
    mph::Mesh mesh = mph::parse_off_file(input);
    mph::SampleMode mode;
    if (sample_mode == "vertices")
      mode = mph::SampleMode::vertices;
    else if (sample_mode == "surface")
      mode = mph::SampleMode::surface;
    else  // auto: vertices when the mesh is large enough, else surface
      mode = static_cast<int>(mesh.vertices.size()) >= samples ? mph::SampleMode::vertices
                                                               : mph::SampleMode::surface;
    cloud = mph::sample_points(mesh, samples, mode, seed);
  } else {
    cloud = mph::parse_xyz_file(input);
  }
  if (normalize) cloud = mph::normalize_to_unit_box(cloud);
  if (k >= static_cast<int>(cloud.points.size()))
    throw std::runtime_error("k must be < point count (" +
                             std::to_string(cloud.points.size()) + " points)");

  const mph::BifiltrationInvariants inv = mph::featurize(cloud, k, bins.rows, bins.cols);
  mph::write_mphgrid_file(out, inv);

  int hilb_max = 0;
  long long xi0_sum = 0, xi1_sum = 0, xi2_sum = 0;
  for (int v : inv.hilb.v) hilb_max = std::max(hilb_max, v);
  for (int v : inv.xi0.v) xi0_sum += v;
  for (int v : inv.xi1.v) xi1_sum += v;
  for (int v : inv.xi2.v) xi2_sum += v;
  std::cout << "hilb_max=" << hilb_max << " xi0_sum=" << xi0_sum << " xi1_sum=" << xi1_sum
            << " xi2_sum=" << xi2_sum << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bifiltration invariants and lattice-convolution classifiers"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  int threads = 1;
  app.add_option("--threads", threads, "worker threads for parallel featurization")
      ->capture_default_str();

  // featurize
  auto* feat = app.add_subcommand("featurize", "compute invariant grids for one input");
  std::string feat_input, feat_out, feat_mode = "auto", feat_bins = "40x40";
  int feat_k = 100, feat_samples = 3000;
  std::uint64_t feat_seed = 0;
  bool feat_normalize = false;
  feat->add_option("--input", feat_input, "OFF mesh or xyz point cloud")->required();
  feat->add_option("--k", feat_k, "codensity neighbor count")->capture_default_str();
  feat->add_option("--bins", feat_bins, "grid size RxT")->capture_default_str();
  feat->add_option("--out", feat_out, "output MPHGRID file")->required();
  feat->add_flag("--normalize", feat_normalize, "scale the cloud into the unit box");
  feat->add_option("--samples", feat_samples, "points sampled from a mesh")
      ->capture_default_str();
  feat->add_option("--sample-mode", feat_mode, "auto|vertices|surface")
      ->check(CLI::IsMember({"auto", "vertices", "surface"}))
      ->capture_default_str();
  feat->add_option("--seed", feat_seed, "sampling seed")->capture_default_str();

  // synth
  auto* synth = app.add_subcommand("synth", "generate a labeled synthetic dataset");
  std::string synth_classes = "sphere,torus,clusters", synth_bins = "20x20", synth_out;
  mph::DatasetParams dp;
  synth->add_option("--classes", synth_classes, "comma-separated class names")
      ->capture_default_str();
  synth->add_option("--per-class", dp.per_class, "items per class")->capture_default_str();
  synth->add_option("--k", dp.k, "codensity neighbor count")->capture_default_str();
  synth->add_option("--bins", synth_bins, "grid size RxT")->capture_default_str();
  synth->add_option("--seed", dp.seed, "root seed")->capture_default_str();
  synth->add_option("--out", synth_out, "output dataset directory")->required();
  synth->add_option("--points", dp.n_points, "points per cloud")->capture_default_str();
  synth->add_option("--noise", dp.noise_sigma, "added Gaussian noise sigma")
      ->capture_default_str();
  synth->add_option("--test-fraction", dp.test_fraction, "held-out fraction per class")
      ->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "train a classifier on a dataset directory");
  mph::TrainConfig tc;
  std::string train_variant = "lattice";
  train->add_option("--data", tc.data_dir, "dataset directory")->required();
  train->add_option("--variant", train_variant, "lattice|standard")
      ->check(CLI::IsMember({"lattice", "standard"}))
      ->capture_default_str();
  train->add_option("--alpha", tc.alpha, "meet/join mix weight in [0,1]")->capture_default_str();
  train->add_option("--lr", tc.lr, "Adam learning rate")->capture_default_str();
  train->add_option("--epochs", tc.epochs, "training epochs")->capture_default_str();
  train->add_option("--batch", tc.batch, "minibatch size")->capture_default_str();
  train->add_option("--seed", tc.seed, "training seed")->capture_default_str();
  train->add_option("--curves", tc.curves_csv, "learning-curve CSV path");
  train->add_option("--checkpoint", tc.checkpoint_path, "checkpoint output path");
  train->add_flag("--verbose", tc.verbose, "per-step loss logging to stderr");

  // eval
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset's test split");
  std::string eval_ckpt, eval_data;
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint path")->required();
  eval->add_option("--data", eval_data, "dataset directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  set_threads(threads);
  try {
    if (feat->parsed())
      return run_featurize(feat_input, feat_k, parse_bins(feat_bins), feat_out, feat_normalize,
                           feat_samples, feat_mode, feat_seed);
    if (synth->parsed()) {
      const BinSpec bins = parse_bins(synth_bins);
      dp.bins_r = bins.rows;
      dp.bins_t = bins.cols;
      std::vector<std::string> classes;
      std::istringstream ss(synth_classes);
      std::string name;
      while (std::getline(ss, name, ','))
        if (!name.empty()) classes.push_back(name);
      mph::LabeledDataset ds = mph::build_dataset(classes, dp);
      mph::save_dataset(synth_out, ds);
      int train_n = 0, test_n = 0;
      for (const auto& item : ds.items) (item.test ? test_n : train_n)++;
      std::cout << "items=" << ds.items.size() << " train=" << train_n << " test=" << test_n
                << '\n';
      return 0;
    }
    if (train->parsed()) {
      tc.variant = mph::variant_from_name(train_variant);
      const mph::TrainResult r = mph::train_run(tc);
      std::cout << "epochs=" << r.epochs_run
                << " train_loss=" << mph::format_double(r.final_train_loss)
                << " train_acc=" << mph::format_double(r.final_train_acc)
                << " test_acc=" << mph::format_double(r.final_test_acc) << '\n';
      return 0;
    }
    if (eval->parsed()) {
      const mph::Checkpoint ck = mph::load_checkpoint(eval_ckpt);
      const mph::LabeledDataset ds = mph::load_dataset(eval_data);
      const mph::EvalResult r = mph::evaluate(ck, ds);
      std::cout << "confusion (rows: true, cols: predicted)\n";
      for (int i = 0; i < r.confusion.rows; ++i) {
        std::cout << "  " << r.class_names[static_cast<std::size_t>(i)] << ':';
        for (int j = 0; j < r.confusion.cols; ++j) std::cout << ' ' << r.confusion.at(i, j);
        std::cout << '\n';
      }
      std::cout << "test_acc=" << mph::format_double(r.accuracy) << '\n';
      return 0;
    }
  } catch (const mph::TrainDiverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
