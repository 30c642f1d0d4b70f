// Timing comparison of the OpenMP kernels against their serial reference
// implementations: bifiltration component labeling, Koszul Betti grids, and
// the three convolution forwards/backwards.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mph/datasets.hpp"
#include "mph/layers.hpp"
#include "mph/persistence.hpp"
#include "mph/rng.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_of(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, seconds_of(t0, Clock::now()));
  }
  return best;
}

void report(const std::string& name, double serial, double parallel) {
  std::printf("%-28s serial %8.4fs   parallel %8.4fs   speedup %.2fx\n", name.c_str(), serial,
              parallel, serial / parallel);
}

mph::Tensor random_tensor(std::vector<int> shape, mph::Rng& rng) {
  mph::Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  int threads = 0;
  if (argc > 1) threads = std::atoi(argv[1]);
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
  std::printf("OpenMP, max threads %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both columns run serially\n");
#endif

  mph::Rng rng(7);

  {
    const mph::PointCloud cloud = mph::make_synthetic(mph::SyntheticClass::clusters, 400, 0.05, 3);
    const mph::DistanceMatrix dmat = mph::pairwise_distances(cloud);
    const mph::FilterValues rho = mph::codensity(dmat, 20);
    const mph::GridScales scales = mph::grid_scales(dmat, rho, 40, 40);

    mph::ComponentLabelGrid labels;
    const double s_serial = time_best_of(
        3, [&] { labels = mph::reference::component_labels(dmat, rho, scales); });
    const double s_par =
        time_best_of(3, [&] { labels = mph::component_labels(dmat, rho, scales); });
    report("component_labels 400x40x40", s_serial, s_par);

    const mph::GridModule module = mph::module_from_labels(labels);
    const double b_serial = time_best_of(3, [&] { (void)mph::reference::koszul_betti(module); });
    const double b_par = time_best_of(3, [&] { (void)mph::koszul_betti(module); });
    report("koszul_betti 40x40", b_serial, b_par);
  }

  {
    const mph::GridLattice lat{39, 39};
    const mph::KernelSupport support = mph::kernel_support(lat, 4);
    const mph::Tensor f = random_tensor({16, 40, 40}, rng);
    const mph::Tensor w = random_tensor({16, 16, 4, 4}, rng);
    const mph::Tensor bias = random_tensor({16}, rng);
    const mph::Tensor up = random_tensor({16, 40, 40}, rng);

    report("meet_conv 16x16x40x40",
           time_best_of(5, [&] { (void)mph::reference::meet_conv(f, w, support, bias); }),
           time_best_of(5, [&] { (void)mph::meet_conv(f, w, support, bias); }));
    report("join_conv_backward",
           time_best_of(5, [&] { (void)mph::reference::join_conv_backward(f, w, support, up, true); }),
           time_best_of(5, [&] { (void)mph::join_conv_backward(f, w, support, up, true); }));
    report("standard_conv 16x16x40x40",
           time_best_of(5, [&] { (void)mph::reference::standard_conv(f, w, bias); }),
           time_best_of(5, [&] { (void)mph::standard_conv(f, w, bias); }));
    report("standard_conv_backward",
           time_best_of(5, [&] { (void)mph::reference::standard_conv_backward(f, w, up, true); }),
           time_best_of(5, [&] { (void)mph::standard_conv_backward(f, w, up, true); }));
  }

  return 0;
}
