#pragma once

#include <vector>

#include "mph/grid_lattice.hpp"
#include "mph/tensor.hpp"

namespace mph {

// Signals are (C, H, W) tensors over the lattice [H-1] x [W-1]; the first
// spatial index is the lattice x coordinate. Kernel weights for lattice
// convolutions are (C_out, C_in, |xs|, |ys|) over the support sites; standard
// convolution weights are (C_out, C_in, kh, kw). A bias tensor may be empty,
// in which case no bias is added.

Tensor meet_conv(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                 const Tensor& bias);
Tensor join_conv(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                 const Tensor& bias);

// alpha * MeetConv + (1-alpha) * JoinConv with one shared bias added once
Tensor mixed_lattice_conv(const Tensor& f, const Tensor& w_meet, const Tensor& w_join,
                          const KernelSupport& support, double alpha, const Tensor& bias);

// Same-size zero-padded cross-correlation; pads k/2 before and k-1-k/2 after
// per axis (2 top/left and 1 bottom/right for the 4x4 kernels used here).
Tensor standard_conv(const Tensor& f, const Tensor& weights, const Tensor& bias);

struct ConvGrads {
  Tensor dinput;
  Tensor dweights;
  Tensor dbias;  // empty when the forward pass had no bias
};

ConvGrads meet_conv_backward(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                             const Tensor& upstream, bool with_bias);
ConvGrads join_conv_backward(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                             const Tensor& upstream, bool with_bias);
ConvGrads standard_conv_backward(const Tensor& f, const Tensor& weights, const Tensor& upstream,
                                 bool with_bias);

struct MixedConvGrads {
  Tensor dinput;
  Tensor dw_meet;
  Tensor dw_join;
  Tensor dbias;
};

MixedConvGrads mixed_lattice_conv_backward(const Tensor& f, const Tensor& w_meet,
                                           const Tensor& w_join, const KernelSupport& support,
                                           double alpha, const Tensor& upstream);

// 2x2 stride-2 max pooling; spatial dims must be even. argmax records, per
// output cell, the flat input index of the chosen element (first in row-major
// block order on ties).
Tensor max_pool_2x2(const Tensor& f, std::vector<int>* argmax = nullptr);
Tensor max_pool_2x2_backward(const std::vector<int>& argmax, const std::vector<int>& in_shape,
                             const Tensor& upstream);

Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& upstream);

// x: (d_in), w: (d_out, d_in), b: (d_out)
Tensor fully_connected(const Tensor& x, const Tensor& w, const Tensor& b);

struct FcGrads {
  Tensor dx;
  Tensor dw;
  Tensor db;
};

FcGrads fully_connected_backward(const Tensor& x, const Tensor& w, const Tensor& upstream);

struct SoftmaxCrossEntropy {
  double loss = 0.0;
  Tensor dlogits;
  Tensor probs;
};

// loss = -log softmax(logits)[label], max-subtracted for stability
SoftmaxCrossEntropy softmax_cross_entropy(const Tensor& logits, int label);

// Plain single-threaded versions of the convolution kernels, kept as the
// reference the parallel implementations are tested and benchmarked against.
namespace reference {

Tensor meet_conv(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                 const Tensor& bias);
Tensor join_conv(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                 const Tensor& bias);
Tensor standard_conv(const Tensor& f, const Tensor& weights, const Tensor& bias);

ConvGrads meet_conv_backward(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                             const Tensor& upstream, bool with_bias);
ConvGrads join_conv_backward(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                             const Tensor& upstream, bool with_bias);
ConvGrads standard_conv_backward(const Tensor& f, const Tensor& weights, const Tensor& upstream,
                                 bool with_bias);

}  // namespace reference

}  // namespace mph
