#include <doctest.h>

#include <cmath>

#include "mph/layers.hpp"
#include "mph/rng.hpp"

using namespace mph;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.data) v = rng.uniform(-1.0, 1.0);
  return t;
}

// weights 1 at the two diagonal support sites of a 2x2 support, 0 elsewhere
Tensor diagonal_kernel() {
  Tensor w({1, 1, 2, 2});
  w.at(0, 0, 0, 0) = 1.0;
  w.at(0, 0, 1, 1) = 1.0;
  return w;
}

const KernelSupport kFull2x2{{0, 1}, {0, 1}};

Tensor square_1234() {
  Tensor f({1, 2, 2});
  f.data = {1, 2, 3, 4};
  return f;
}

}  // namespace

TEST_CASE("meet_conv worked example on the [1]x[1] lattice") {
  const Tensor out = meet_conv(square_1234(), diagonal_kernel(), kFull2x2, Tensor{});
  // out(x,y) = f(0,0) + f(x,y)
  CHECK(out.at(0, 0, 0) == 2.0);
  CHECK(out.at(0, 0, 1) == 3.0);
  CHECK(out.at(0, 1, 0) == 4.0);
  CHECK(out.at(0, 1, 1) == 5.0);
}

TEST_CASE("join_conv worked example on the [1]x[1] lattice") {
  const Tensor out = join_conv(square_1234(), diagonal_kernel(), kFull2x2, Tensor{});
  // out(x,y) = f(x,y) + f(1,1)
  CHECK(out.at(0, 0, 0) == 5.0);
  CHECK(out.at(0, 0, 1) == 6.0);
  CHECK(out.at(0, 1, 0) == 7.0);
  CHECK(out.at(0, 1, 1) == 8.0);
}

TEST_CASE("neutral kernels reproduce the input exactly") {
  Rng rng(5);
  const GridLattice lat{5, 7};
  const KernelSupport support = kernel_support(lat, 3);
  const Tensor f = random_tensor({2, 6, 8}, rng);

  // meet: delta at the top (m,n)
  Tensor w_meet({2, 2, static_cast<int>(support.xs.size()), static_cast<int>(support.ys.size())});
  for (int j = 0; j < 2; ++j)
    w_meet.at(j, j, static_cast<int>(support.xs.size()) - 1,
              static_cast<int>(support.ys.size()) - 1) = 1.0;
  const Tensor out_meet = meet_conv(f, w_meet, support, Tensor{});
  CHECK(out_meet.data == f.data);

  // join: delta at the bottom (0,0)
  Tensor w_join(w_meet.shape);
  for (int j = 0; j < 2; ++j) w_join.at(j, j, 0, 0) = 1.0;
  const Tensor out_join = join_conv(f, w_join, support, Tensor{});
  CHECK(out_join.data == f.data);
}

TEST_CASE("constant input scales by the kernel weight sum") {
  Rng rng(6);
  const GridLattice lat{4, 4};
  const KernelSupport support = kernel_support(lat, 3);
  Tensor f({1, 5, 5});
  f.fill(2.5);
  const Tensor w = random_tensor({1, 1, 3, 3}, rng);
  double wsum = 0.0;
  for (double v : w.data) wsum += v;
  for (const bool use_meet : {true, false}) {
    const Tensor out = use_meet ? meet_conv(f, w, support, Tensor{})
                                : join_conv(f, w, support, Tensor{});
    for (double v : out.data) CHECK(v == doctest::Approx(2.5 * wsum).epsilon(1e-12));
  }
}

TEST_CASE("join_conv degenerates to a scalar multiple above the kernel support") {
  // support strictly below the probed points except (0,0)
  const KernelSupport low{{0, 1}, {0, 1}};
  Rng rng(7);
  const Tensor f = random_tensor({1, 4, 4}, rng);

  // only g(0,0) nonzero: every output is g(0,0) * f(x,y)
  Tensor w_delta({1, 1, 2, 2});
  w_delta.at(0, 0, 0, 0) = 1.75;
  const Tensor out_delta = join_conv(f, w_delta, low, Tensor{});
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) CHECK(out_delta.at(0, x, y) == 1.75 * f.at(0, x, y));

  // full random weights: at (x,y) >= every support site the output collapses
  // to (sum of weights) * f(x,y), exactly
  const Tensor w = random_tensor({1, 1, 2, 2}, rng);
  const double wsum = w.data[0] + w.data[1] + w.data[2] + w.data[3];
  const Tensor out = join_conv(f, w, low, Tensor{});
  for (int x = 1; x < 4; ++x)
    for (int y = 1; y < 4; ++y) {
      const double direct = f.at(0, x, y) * w.data[0] + f.at(0, x, y) * w.data[1] +
                            f.at(0, x, y) * w.data[2] + f.at(0, x, y) * w.data[3];
      CHECK(out.at(0, x, y) == direct);
      CHECK(out.at(0, x, y) == doctest::Approx(wsum * f.at(0, x, y)).epsilon(1e-12));
    }
}

TEST_CASE("lattice convolution is linear in the signal") {
  Rng rng(8);
  const GridLattice lat{5, 5};
  const KernelSupport support = kernel_support(lat, 4);
  const Tensor f1 = random_tensor({2, 6, 6}, rng);
  const Tensor f2 = random_tensor({2, 6, 6}, rng);
  const Tensor w = random_tensor({3, 2, 4, 4}, rng);
  const Tensor bias = random_tensor({3}, rng);
  Tensor sum({2, 6, 6});
  for (std::int64_t i = 0; i < sum.numel(); ++i) sum[i] = f1[i] + f2[i];

  for (const bool use_meet : {true, false}) {
    auto conv = [&](const Tensor& f) {
      return use_meet ? meet_conv(f, w, support, bias) : join_conv(f, w, support, bias);
    };
    const Tensor lhs = conv(sum);
    const Tensor a = conv(f1), b = conv(f2);
    for (std::int64_t i = 0; i < lhs.numel(); ++i) {
      const int j = static_cast<int>(i / 36);
      CHECK(lhs[i] == doctest::Approx(a[i] + b[i] - bias[j]).epsilon(1e-12));
    }
  }
}

TEST_CASE("mixed layer interpolates between meet and join") {
  Rng rng(9);
  const GridLattice lat{3, 3};
  const KernelSupport support = kernel_support(lat, 2);
  const Tensor f = random_tensor({2, 4, 4}, rng);
  const Tensor wm = random_tensor({2, 2, 2, 2}, rng);
  const Tensor wj = random_tensor({2, 2, 2, 2}, rng);
  const Tensor bias = random_tensor({2}, rng);

  const Tensor at1 = mixed_lattice_conv(f, wm, wj, support, 1.0, bias);
  const Tensor meet_alone = meet_conv(f, wm, support, bias);
  for (std::int64_t i = 0; i < at1.numel(); ++i)
    CHECK(at1[i] == doctest::Approx(meet_alone[i]).epsilon(1e-14));

  const Tensor at0 = mixed_lattice_conv(f, wm, wj, support, 0.0, bias);
  const Tensor join_alone = join_conv(f, wj, support, bias);
  for (std::int64_t i = 0; i < at0.numel(); ++i)
    CHECK(at0[i] == doctest::Approx(join_alone[i]).epsilon(1e-14));

  // both kernels identity deltas at alpha=1/2: output = input
  Tensor id_m({2, 2, 2, 2}), id_j({2, 2, 2, 2});
  for (int j = 0; j < 2; ++j) {
    id_m.at(j, j, 1, 1) = 1.0;
    id_j.at(j, j, 0, 0) = 1.0;
  }
  const Tensor half = mixed_lattice_conv(f, id_m, id_j, support, 0.5, Tensor{});
  for (std::int64_t i = 0; i < half.numel(); ++i)
    CHECK(half[i] == doctest::Approx(f[i]).epsilon(1e-14));

  CHECK_THROWS_AS(mixed_lattice_conv(f, wm, wj, support, 1.5, bias), std::invalid_argument);
}

TEST_CASE("standard_conv matches the nested-loop reference exactly") {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const int c_in = 1 + static_cast<int>(rng.below(3));
    const int c_out = 1 + static_cast<int>(rng.below(3));
    const int h = 3 + static_cast<int>(rng.below(6));
    const int w = 3 + static_cast<int>(rng.below(6));
    const Tensor f = random_tensor({c_in, h, w}, rng);
    const Tensor weights = random_tensor({c_out, c_in, 4, 4}, rng);
    const Tensor bias = random_tensor({c_out}, rng);
    const Tensor got = standard_conv(f, weights, bias);
    const Tensor want = reference::standard_conv(f, weights, bias);
    CHECK(got.data == want.data);
  }
}

TEST_CASE("lattice convs match their reference implementations exactly") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const int h = 4 + static_cast<int>(rng.below(4));
    const int w = 4 + static_cast<int>(rng.below(4));
    const KernelSupport support = kernel_support({h - 1, w - 1}, 3);
    const Tensor f = random_tensor({2, h, w}, rng);
    const Tensor weights = random_tensor({2, 2, 3, 3}, rng);
    const Tensor bias = random_tensor({2}, rng);
    CHECK(meet_conv(f, weights, support, bias).data ==
          reference::meet_conv(f, weights, support, bias).data);
    CHECK(join_conv(f, weights, support, bias).data ==
          reference::join_conv(f, weights, support, bias).data);
  }
}

TEST_CASE("conv backward matches the reference implementation") {
  Rng rng(12);
  const KernelSupport support = kernel_support({5, 5}, 3);
  const Tensor f = random_tensor({2, 6, 6}, rng);
  const Tensor w = random_tensor({3, 2, 3, 3}, rng);
  const Tensor up = random_tensor({3, 6, 6}, rng);

  const ConvGrads a = meet_conv_backward(f, w, support, up, true);
  const ConvGrads b = reference::meet_conv_backward(f, w, support, up, true);
  CHECK(a.dweights.data == b.dweights.data);
  CHECK(a.dbias.data == b.dbias.data);
  for (std::int64_t i = 0; i < a.dinput.numel(); ++i)
    CHECK(a.dinput[i] == doctest::Approx(b.dinput[i]).epsilon(1e-12));

  const Tensor w4 = random_tensor({3, 2, 4, 4}, rng);
  const ConvGrads c = standard_conv_backward(f, w4, up, true);
  const ConvGrads d = reference::standard_conv_backward(f, w4, up, true);
  CHECK(c.dweights.data == d.dweights.data);
  CHECK(c.dbias.data == d.dbias.data);
  for (std::int64_t i = 0; i < c.dinput.numel(); ++i)
    CHECK(c.dinput[i] == doctest::Approx(d.dinput[i]).epsilon(1e-12));
}

TEST_CASE("standard_conv shifted-tap and window-sum examples") {
  // single tap at kernel position (2,2) (the zero-offset tap) copies the input
  Tensor f({1, 5, 5});
  for (std::int64_t i = 0; i < f.numel(); ++i) f[i] = static_cast<double>(i);
  Tensor w({1, 1, 4, 4});
  w.at(0, 0, 2, 2) = 1.0;
  const Tensor id = standard_conv(f, w, Tensor{});
  CHECK(id.data == f.data);

  // tap at (3,3) shifts the input up-left with zero fill
  Tensor w_shift({1, 1, 4, 4});
  w_shift.at(0, 0, 3, 3) = 1.0;
  const Tensor shifted = standard_conv(f, w_shift, Tensor{});
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y)
      CHECK(shifted.at(0, x, y) == (x + 1 < 5 && y + 1 < 5 ? f.at(0, x + 1, y + 1) : 0.0));

  // all-ones kernel over constant-1 input sums the full window in the interior
  Tensor ones({1, 1, 4, 4});
  ones.fill(1.0);
  Tensor const1({1, 8, 8});
  const1.fill(1.0);
  const Tensor summed = standard_conv(const1, ones, Tensor{});
  CHECK(summed.at(0, 4, 4) == 16.0);
  CHECK(summed.at(0, 0, 0) == 4.0);  // corner sees a 2x2 valid window
}

TEST_CASE("max_pool_2x2 basics") {
  Tensor f({1, 2, 2});
  f.data = {1, 2, 3, 4};
  std::vector<int> argmax;
  const Tensor out = max_pool_2x2(f, &argmax);
  CHECK(out.shape == std::vector<int>{1, 1, 1});
  CHECK(out[0] == 4.0);
  CHECK(argmax[0] == 3);

  Tensor c({3, 40, 40});
  c.fill(7.0);
  const Tensor pooled = max_pool_2x2(c);
  CHECK(pooled.shape == std::vector<int>{3, 20, 20});
  for (double v : pooled.data) CHECK(v == 7.0);

  Tensor odd({1, 3, 4});
  CHECK_THROWS(max_pool_2x2(odd));
}

TEST_CASE("max_pool ties pick the first element in row-major block order") {
  Tensor f({1, 2, 4});
  f.data = {5, 5, 1, 5, 5, 5, 5, 5};
  std::vector<int> argmax;
  max_pool_2x2(f, &argmax);
  CHECK(argmax[0] == 0);  // (0,0) wins the all-5 block
  CHECK(argmax[1] == 3);  // (0,3) is the first 5 in its block
}

TEST_CASE("fully_connected basics") {
  Tensor x({3});
  x.data = {1, 2, 3};
  Tensor w({3, 3});
  for (int i = 0; i < 3; ++i) w.at(i, i) = 1.0;
  Tensor b({3});
  CHECK(fully_connected(x, w, b).data == x.data);

  // basis vector input picks a column of w plus the bias
  Rng rng(13);
  Tensor wr({4, 3});
  for (double& v : wr.data) v = rng.uniform(-1, 1);
  Tensor br({4});
  for (double& v : br.data) v = rng.uniform(-1, 1);
  Tensor e1({3});
  e1.data = {0, 1, 0};
  const Tensor out = fully_connected(e1, wr, br);
  for (int o = 0; o < 4; ++o) CHECK(out[o] == wr.at(o, 1) + br[o]);
}

TEST_CASE("softmax cross entropy values and stability") {
  Tensor uniform({10});
  const SoftmaxCrossEntropy u = softmax_cross_entropy(uniform, 3);
  CHECK(u.loss == doctest::Approx(std::log(10.0)).epsilon(1e-15));

  Tensor saturated({5});
  saturated.data = {0, 0, 1e6, 0, 0};
  const SoftmaxCrossEntropy s = softmax_cross_entropy(saturated, 2);
  CHECK(s.loss >= 0.0);
  CHECK(s.loss < 1e-12);
  for (double v : s.probs.data) CHECK(std::isfinite(v));

  CHECK_THROWS(softmax_cross_entropy(saturated, 7));
  Tensor one({1});
  CHECK_THROWS(softmax_cross_entropy(one, 0));
}

TEST_CASE("softmax probabilities sum to one") {
  Rng rng(14);
  Tensor logits({7});
  for (double& v : logits.data) v = rng.uniform(-5, 5);
  const SoftmaxCrossEntropy r = softmax_cross_entropy(logits, 4);
  double sum = 0.0;
  for (double v : r.probs.data) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  // gradient = probs - one_hot(label)
  for (int i = 0; i < 7; ++i)
    CHECK(r.dlogits[i] == doctest::Approx(r.probs[i] - (i == 4 ? 1.0 : 0.0)).epsilon(1e-15));
}

TEST_CASE("tensors reject non-finite values when checked") {
  Tensor t({2});
  t.data = {1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS(check_finite(t, "test"));
}
