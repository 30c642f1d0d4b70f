// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Expects the CLI binary path as argv[1] (used by the
// determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "mph/datasets.hpp"
#include "mph/layers.hpp"
#include "mph/network.hpp"
#include "mph/persistence.hpp"
#include "mph/rng.hpp"
#include "mph/train.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what, const std::string& detail = "") {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.empty() ? "" : " — ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct OracleInstance {
  mph::DistanceMatrix dmat;
  mph::FilterValues rho;
  mph::GridScales scales;
};

std::vector<OracleInstance> make_oracle_instances(int count, std::uint64_t seed) {
  mph::Rng rng(seed);
  std::vector<OracleInstance> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    const int n = 2 + static_cast<int>(rng.below(11));  // 2..12
    mph::PointCloud cloud;
    const bool clustered = rng.uniform() < 0.4;
    for (int i = 0; i < n; ++i) {
      double cx = 0.0, cy = 0.0;
      if (clustered && i % 2 == 1) cx = 3.0, cy = 2.0;
      cloud.points.push_back({cx + rng.uniform(-1, 1), cy + rng.uniform(-1, 1),
                              rng.uniform(-1, 1)});
    }
    OracleInstance inst;
    inst.dmat = mph::pairwise_distances(cloud);
    const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
    inst.rho = mph::codensity(inst.dmat, k);
    inst.scales = mph::grid_scales(inst.dmat, inst.rho, 2 + static_cast<int>(rng.below(5)),
                                   2 + static_cast<int>(rng.below(5)));
    out.push_back(std::move(inst));
  }
  return out;
}

bool euler_holds(const mph::BifiltrationInvariants& inv) {
  auto h = [&](int i, int j) { return (i < 0 || j < 0) ? 0 : inv.hilb.at(i, j); };
  for (int i = 0; i < inv.hilb.rows; ++i)
    for (int j = 0; j < inv.hilb.cols; ++j) {
      const int delta = h(i, j) - h(i - 1, j) - h(i, j - 1) + h(i - 1, j - 1);
      if (inv.xi0.at(i, j) - inv.xi1.at(i, j) + inv.xi2.at(i, j) != delta) return false;
    }
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args + " > /dev/null 2>&1";
  return WEXITSTATUS(std::system(cmd.c_str()));
}

// fixed configuration of the desk-scale experiment
constexpr int kPerClass = 20;
constexpr int kPoints = 160;
constexpr double kNoise = 0.02;
constexpr int kNeighbors = 20;
constexpr int kBins = 20;
constexpr std::uint64_t kDataSeed = 42;
constexpr std::uint64_t kTrainSeed = 7;

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const fs::path work = fs::temp_directory_path() / "mph_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  // ---- criteria 1 and 2: homology and Betti oracles on shared instances ----
  {
    const auto t0 = Clock::now();
    const std::vector<OracleInstance> instances = make_oracle_instances(200, 0xACCE57);
    int hilb_bad = 0;
    for (const auto& inst : instances) {
      const mph::IntGrid got = mph::hilbert_h0(inst.dmat, inst.rho, inst.scales);
      const mph::IntGrid want = oracle::hilbert_by_boundary_rank(inst.dmat, inst.rho, inst.scales);
      if (!(got == want)) ++hilb_bad;
    }
    const double hilb_time = seconds_since(t0);
    {
      char detail[128];
      std::snprintf(detail, sizeof detail, "%zu instances, %d mismatches, %.1fs",
                    instances.size(), hilb_bad, hilb_time);
      report(1, hilb_bad == 0 && hilb_time < 60.0, "hilbert_h0 equals the boundary-rank oracle",
             detail);
    }

    int betti_bad = 0;
    for (const auto& inst : instances) {
      const mph::BettiGrids got = mph::betti_h0(inst.dmat, inst.rho, inst.scales);
      const oracle::BettiTriple want =
          oracle::betti_by_dense_matrices(inst.dmat, inst.rho, inst.scales);
      if (!(got.xi0 == want.xi0 && got.xi1 == want.xi1 && got.xi2 == want.xi2)) ++betti_bad;
    }

    // residue-field module: ((1); (1,1); (1)) at the four corner gradings
    bool residue_ok = true;
    {
      mph::GridModule mod;
      mod.rows = mod.cols = 3;
      mod.dims.assign(9, 0);
      mod.dims[0] = 1;
      mod.map_r.resize(9);
      mod.map_t.resize(9);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          if (i < 2) mod.map_r[mod.idx(i, j)] = mph::Gf2Matrix(mod.dim(i + 1, j), mod.dim(i, j));
          if (j < 2) mod.map_t[mod.idx(i, j)] = mph::Gf2Matrix(mod.dim(i, j + 1), mod.dim(i, j));
        }
      const mph::BettiGrids b = mph::koszul_betti(mod);
      int total = 0;
      for (int v : b.xi0.v) total += v;
      for (int v : b.xi1.v) total += v;
      for (int v : b.xi2.v) total += v;
      residue_ok = b.xi0.at(0, 0) == 1 && b.xi1.at(1, 0) == 1 && b.xi1.at(0, 1) == 1 &&
                   b.xi2.at(1, 1) == 1 && total == 4;
    }
    {
      char detail[128];
      std::snprintf(detail, sizeof detail, "%d mismatches, residue-field pattern %s", betti_bad,
                    residue_ok ? "ok" : "wrong");
      report(2, betti_bad == 0 && residue_ok,
             "xi0/xi1/xi2 equal the dense Koszul oracle", detail);
    }
  }

  // ---- desk-scale dataset (used by criteria 3 and 7) ----
  const auto data_t0 = Clock::now();
  mph::DatasetParams dp;
  dp.per_class = kPerClass;
  dp.n_points = kPoints;
  dp.noise_sigma = kNoise;
  dp.k = kNeighbors;
  dp.bins_r = kBins;
  dp.bins_t = kBins;
  dp.test_fraction = 0.1;
  dp.seed = kDataSeed;
  const mph::LabeledDataset desk = mph::build_dataset({"sphere", "torus", "clusters"}, dp);
  const fs::path desk_dir = work / "desk";
  mph::save_dataset(desk_dir.string(), desk);
  const double data_time = seconds_since(data_t0);

  // ---- criterion 3: Euler identity everywhere ----
  {
    const std::vector<OracleInstance> instances = make_oracle_instances(60, 0xE07E5);
    bool ok = true;
    for (const auto& inst : instances) {
      mph::BifiltrationInvariants inv;
      inv.hilb = mph::hilbert_h0(inst.dmat, inst.rho, inst.scales);
      const mph::BettiGrids b = mph::betti_h0(inst.dmat, inst.rho, inst.scales);
      inv.xi0 = b.xi0;
      inv.xi1 = b.xi1;
      inv.xi2 = b.xi2;
      ok = ok && euler_holds(inv);
    }
    for (const auto& item : desk.items) ok = ok && euler_holds(item.invariants);
    char detail[128];
    std::snprintf(detail, sizeof detail, "60 random instances + %zu desk items",
                  desk.items.size());
    report(3, ok, "Euler identity xi0-xi1+xi2 = DDHilb at every cell", detail);
  }

  // ---- criterion 4: gradient checks, >=100 instances per layer type ----
  {
    using gradcheck::LayerKind;
    bool ok = true;
    std::string detail;
    const std::pair<LayerKind, std::uint64_t> kinds[] = {
        {LayerKind::meet, 11}, {LayerKind::join, 12},           {LayerKind::mixed, 13},
        {LayerKind::standard, 14}, {LayerKind::pool, 15},        {LayerKind::fully_connected, 16},
        {LayerKind::softmax_ce, 17}};
    for (const auto& [kind, seed] : kinds) {
      const double worst = gradcheck::sweep(kind, 100, seed);
      char buf[64];
      std::snprintf(buf, sizeof buf, "%s %.2e  ", gradcheck::layer_kind_name(kind), worst);
      detail += buf;
      ok = ok && worst < 1e-4;
    }
    report(4, ok, "analytic gradients within 1e-4 of central differences", detail);
  }

  // ---- criterion 5: neutral-kernel identities ----
  {
    mph::Rng rng(0x1DE);
    const mph::GridLattice lat{39, 39};
    const mph::KernelSupport support = mph::kernel_support(lat, 4);
    mph::Tensor f({3, 40, 40});
    for (double& v : f.data) v = rng.uniform(-1, 1);
    mph::Tensor w_meet({3, 3, 4, 4}), w_join({3, 3, 4, 4});
    for (int j = 0; j < 3; ++j) {
      w_meet.at(j, j, 3, 3) = 1.0;  // delta at the top (m,n)
      w_join.at(j, j, 0, 0) = 1.0;  // delta at the bottom (0,0)
    }
    const bool meet_ok = mph::meet_conv(f, w_meet, support, mph::Tensor{}).data == f.data;
    const bool join_ok = mph::join_conv(f, w_join, support, mph::Tensor{}).data == f.data;
    report(5, meet_ok && join_ok, "delta-at-top meet and delta-at-bottom join are identities",
           std::string("meet ") + (meet_ok ? "exact" : "WRONG") + ", join " +
               (join_ok ? "exact" : "WRONG"));
  }

  // ---- criterion 6: architecture conformance ----
  {
    bool ok = true;
    std::string detail;
    for (const mph::Variant variant : {mph::Variant::lattice, mph::Variant::standard}) {
      const mph::Network net = mph::build_network(variant, 4, 10, 40, 40, 0.5, 1);
      const auto shapes = net.output_shapes();
      ok = ok && shapes[0] == std::vector<int>{16, 40, 40};
      ok = ok && shapes[2] == std::vector<int>{16, 20, 20};
      ok = ok && shapes[5] == std::vector<int>{16, 10, 10};
      ok = ok && shapes[6] == std::vector<int>{8, 10, 10};
      ok = ok && shapes[8] == std::vector<int>{800};
      ok = ok && shapes[9] == std::vector<int>{32};
      ok = ok && shapes[11] == std::vector<int>{10};
      const std::int64_t conv1 = net.layer_parameter_count(0);
      const std::int64_t expected = variant == mph::Variant::lattice ? 2064 : 1040;
      ok = ok && conv1 == expected;
      detail += mph::variant_name(variant) + " conv1=" + std::to_string(conv1) + " ";
    }
    report(6, ok, "layer shapes 16x40x40 -> 16x20x20 -> 8x10x10 -> 800 -> 32 -> 10", detail);
  }

  // ---- criterion 7: desk-scale experiment, both variants ----
  {
    const auto train_t0 = Clock::now();
    double acc_lattice = 0.0, acc_standard = 0.0;
    bool trained = true;
    std::string err;
    try {
      mph::TrainConfig tc;
      tc.data_dir = desk_dir.string();
      tc.lr = 2e-4;
      tc.epochs = 100;
      tc.batch = 16;
      tc.alpha = 0.5;
      tc.seed = kTrainSeed;

      tc.variant = mph::Variant::lattice;
      tc.curves_csv = "acceptance_curves_lattice.csv";
      tc.checkpoint_path = (work / "lattice.ckpt").string();
      acc_lattice = mph::train_run(tc).final_test_acc;

      tc.variant = mph::Variant::standard;
      tc.curves_csv = "acceptance_curves_standard.csv";
      tc.checkpoint_path = (work / "standard.ckpt").string();
      acc_standard = mph::train_run(tc).final_test_acc;
    } catch (const std::exception& e) {
      trained = false;
      err = e.what();
    }
    const double total_time = data_time + seconds_since(train_t0);
    char detail[256];
    if (trained)
      std::snprintf(detail, sizeof detail,
                    "lattice %.0f%%, standard %.0f%%, %.0fs total (featurize+train), curves in "
                    "acceptance_curves_{lattice,standard}.csv",
                    100 * acc_lattice, 100 * acc_standard, total_time);
    else
      std::snprintf(detail, sizeof detail, "training failed: %s", err.c_str());
    report(7,
           trained && acc_lattice >= 0.9 && acc_standard >= 0.9 && total_time < 600.0,
           "both variants reach >=90% test accuracy on the 3-class desk dataset", detail);
  }

  // ---- criterion 8: CLI determinism ----
  {
    bool ok = !cli.empty();
    std::string detail = cli.empty() ? "no CLI path given" : "";
    if (ok) {
      const std::string synth_args =
          "synth --classes sphere,torus,clusters --per-class 4 --points 48 --k 8 --bins 16x16 "
          "--seed 77 --out ";
      const fs::path d1 = work / "det1", d2 = work / "det2";
      ok = run_cli(cli, synth_args + d1.string()) == 0 &&
           run_cli(cli, synth_args + d2.string()) == 0;
      if (ok) {
        int files = 0;
        for (const auto& entry : fs::directory_iterator(d1)) {
          ++files;
          const fs::path other = d2 / entry.path().filename();
          if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
            ok = false;
            detail = "synth mismatch at " + entry.path().filename().string();
            break;
          }
        }
        if (ok && files < 13) {
          ok = false;
          detail = "synth produced too few files";
        }
      }
      if (ok) {
        const std::string train_args = " --variant lattice --epochs 5 --batch 8 --seed 123";
        const fs::path c1 = work / "c1.csv", c2 = work / "c2.csv";
        ok = run_cli(cli, "train --data " + d1.string() + train_args + " --curves " +
                              c1.string()) == 0 &&
             run_cli(cli, "train --data " + d2.string() + train_args + " --curves " +
                              c2.string()) == 0;
        if (ok && slurp(c1) != slurp(c2)) {
          ok = false;
          detail = "training curves differ between reruns";
        }
      }
      if (ok && detail.empty()) detail = "MPHGRID files and CSV curves byte-identical";
    }
    report(8, ok, "rerunning synth + train with identical seeds is byte-identical", detail);
  }

  fs::remove_all(work);
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
