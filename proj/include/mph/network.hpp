#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mph/grid_lattice.hpp"
#include "mph/layers.hpp"
#include "mph/tensor.hpp"

namespace mph {

enum class Variant { lattice, standard };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct MixedLatticeConvLayer {
  GridLattice lattice;  // lattice of the incoming signal
  KernelSupport support;
  double alpha = 0.5;
  Tensor w_meet, w_join, bias;
};

struct StandardConvLayer {
  Tensor w, bias;
};

struct ReluLayer {};
struct MaxPoolLayer {};
struct FlattenLayer {};

struct FullyConnectedLayer {
  Tensor w, bias;
};

using Layer = std::variant<MixedLatticeConvLayer, StandardConvLayer, ReluLayer, MaxPoolLayer,
                           FlattenLayer, FullyConnectedLayer>;

struct Network {
  Variant variant = Variant::lattice;
  double alpha = 0.5;
  int in_channels = 4;
  int classes = 10;
  int grid_h = 40;
  int grid_w = 40;
  std::vector<Layer> layers;

  std::vector<Tensor*> params();
  std::vector<const Tensor*> params() const;

  // learnable scalars in one conv/fc layer (0 for parameter-free layers)
  std::int64_t layer_parameter_count(std::size_t layer_index) const;

  // shape of each layer's output given the network input shape
  std::vector<std::vector<int>> output_shapes() const;
};

// conv(in->16) relu pool conv(16->16) relu pool conv(16->8) relu flatten
// fc(8*(h/4)*(w/4) -> 32) relu fc(32 -> classes); the lattice variant uses
// alpha-mixed meet/join convolutions on 4x4 evenly spaced supports recomputed
// on each layer's own lattice, the standard variant same-size padded 4x4
// kernels. Weights are Xavier-uniform from the given seed, biases zero.
Network build_network(Variant variant, int in_channels, int classes, int grid_h, int grid_w,
                      double alpha, std::uint64_t seed);

struct ForwardTrace {
  std::vector<Tensor> inputs;                  // input seen by each layer
  std::vector<std::vector<int>> pool_argmax;   // per layer; used by pool layers only
};

// Runs the layers in order; with a trace, caches what backward needs.
// Validates finiteness of every layer output.
Tensor forward(const Network& net, const Tensor& input, ForwardTrace* trace = nullptr);

// Gradient tensors aligned with Network::params().
struct Gradients {
  std::vector<Tensor> tensors;
};

Gradients make_gradients(const Network& net);
void zero_gradients(Gradients& g);

// Accumulates parameter gradients into `grads` and returns the input gradient.
Tensor backward(const Network& net, const ForwardTrace& trace, const Tensor& dlogits,
                Gradients& grads);

struct AdamState {
  std::int64_t step = 0;
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<Tensor> m, v;
};

AdamState make_adam(const Network& net, double lr);

// Standard bias-corrected Adam update applied in parameter order.
void adam_step(const std::vector<Tensor*>& params, const Gradients& grads, AdamState& state);

}  // namespace mph
