#include "mph/network.hpp"

#include <cmath>
#include <stdexcept>

#include "mph/rng.hpp"

namespace mph {

std::string variant_name(Variant v) {
  return v == Variant::lattice ? "lattice" : "standard";
}

Variant variant_from_name(const std::string& name) {
  if (name == "lattice") return Variant::lattice;
  if (name == "standard") return Variant::standard;
  throw std::invalid_argument("unknown variant '" + name + "' (expected lattice|standard)");
}

std::vector<Tensor*> Network::params() {
  std::vector<Tensor*> out;
  for (auto& layer : layers) {
    std::visit(
        [&](auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, MixedLatticeConvLayer>) {
            out.push_back(&l.w_meet);
            out.push_back(&l.w_join);
            out.push_back(&l.bias);
          } else if constexpr (std::is_same_v<T, StandardConvLayer> ||
                               std::is_same_v<T, FullyConnectedLayer>) {
            out.push_back(&l.w);
            out.push_back(&l.bias);
          }
        },
        layer);
  }
  return out;
}

std::vector<const Tensor*> Network::params() const {
  std::vector<const Tensor*> out;
  for (Tensor* t : const_cast<Network*>(this)->params()) out.push_back(t);
  return out;
}

std::int64_t Network::layer_parameter_count(std::size_t layer_index) const {
  std::int64_t count = 0;
  std::visit(
      [&](const auto& l) {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, MixedLatticeConvLayer>)
          count = l.w_meet.numel() + l.w_join.numel() + l.bias.numel();
        else if constexpr (std::is_same_v<T, StandardConvLayer> ||
                           std::is_same_v<T, FullyConnectedLayer>)
          count = l.w.numel() + l.bias.numel();
      },
      layers[layer_index]);
  return count;
}

std::vector<std::vector<int>> Network::output_shapes() const {
  std::vector<std::vector<int>> shapes;
  std::vector<int> cur = {in_channels, grid_h, grid_w};
  for (const auto& layer : layers) {
    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, MixedLatticeConvLayer>)
            cur = {l.w_meet.shape[0], cur[1], cur[2]};
          else if constexpr (std::is_same_v<T, StandardConvLayer>)
            cur = {l.w.shape[0], cur[1], cur[2]};
          else if constexpr (std::is_same_v<T, MaxPoolLayer>)
            cur = {cur[0], cur[1] / 2, cur[2] / 2};
          else if constexpr (std::is_same_v<T, FlattenLayer>)
            cur = {cur[0] * cur[1] * cur[2]};
          else if constexpr (std::is_same_v<T, FullyConnectedLayer>)
            cur = {l.w.shape[0]};
        },
        layer);
    shapes.push_back(cur);
  }
  return shapes;
}

namespace {

void xavier_fill(Tensor& t, int fan_in, int fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / (fan_in + fan_out));
  for (double& v : t.data) v = rng.uniform(-bound, bound);
}

Layer make_conv(Variant variant, int c_in, int c_out, int h, int w, double alpha, Rng& rng) {
  if (variant == Variant::lattice) {
    MixedLatticeConvLayer l;
    l.lattice = GridLattice{h - 1, w - 1};
    l.support = kernel_support(l.lattice, 4);
    l.alpha = alpha;
    const int sx = static_cast<int>(l.support.xs.size());
    const int sy = static_cast<int>(l.support.ys.size());
    l.w_meet = Tensor({c_out, c_in, sx, sy});
    l.w_join = Tensor({c_out, c_in, sx, sy});
    l.bias = Tensor({c_out});
    const int fan_in = c_in * sx * sy, fan_out = c_out * sx * sy;
    xavier_fill(l.w_meet, fan_in, fan_out, rng);
    xavier_fill(l.w_join, fan_in, fan_out, rng);
    return l;
  }
  StandardConvLayer l;
  l.w = Tensor({c_out, c_in, 4, 4});
  l.bias = Tensor({c_out});
  xavier_fill(l.w, c_in * 16, c_out * 16, rng);
  return l;
}

}  // namespace

Network build_network(Variant variant, int in_channels, int classes, int grid_h, int grid_w,
                      double alpha, std::uint64_t seed) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("build_network: alpha must be in [0,1]");
  if (grid_h % 4 != 0 || grid_w % 4 != 0)
    throw std::invalid_argument("build_network: grid dims must be divisible by 4");
  if (variant == Variant::lattice && (grid_h < 16 || grid_w < 16))
    throw std::invalid_argument(
        "build_network: lattice variant needs grid >= 16 for 4x4 kernel supports");
  if (classes < 2) throw std::invalid_argument("build_network: need at least 2 classes");

  Rng rng(seed);
  Network net;
  net.variant = variant;
  net.alpha = alpha;
  net.in_channels = in_channels;
  net.classes = classes;
  net.grid_h = grid_h;
  net.grid_w = grid_w;

  net.layers.push_back(make_conv(variant, in_channels, 16, grid_h, grid_w, alpha, rng));
  net.layers.push_back(ReluLayer{});
  net.layers.push_back(MaxPoolLayer{});
  net.layers.push_back(make_conv(variant, 16, 16, grid_h / 2, grid_w / 2, alpha, rng));
  net.layers.push_back(ReluLayer{});
  net.layers.push_back(MaxPoolLayer{});
  net.layers.push_back(make_conv(variant, 16, 8, grid_h / 4, grid_w / 4, alpha, rng));
  net.layers.push_back(ReluLayer{});
  net.layers.push_back(FlattenLayer{});

  const int flat = 8 * (grid_h / 4) * (grid_w / 4);
  FullyConnectedLayer fc1;
  fc1.w = Tensor({32, flat});
  fc1.bias = Tensor({32});
  xavier_fill(fc1.w, flat, 32, rng);
  net.layers.push_back(std::move(fc1));
  net.layers.push_back(ReluLayer{});

  FullyConnectedLayer fc2;
  fc2.w = Tensor({classes, 32});
  fc2.bias = Tensor({classes});
  xavier_fill(fc2.w, 32, classes, rng);
  net.layers.push_back(std::move(fc2));

  return net;
}

Tensor forward(const Network& net, const Tensor& input, ForwardTrace* trace) {
  if (input.shape != std::vector<int>{net.in_channels, net.grid_h, net.grid_w})
    throw std::invalid_argument("forward: input shape does not match network");
  if (trace) {
    trace->inputs.clear();
    trace->pool_argmax.assign(net.layers.size(), {});
  }
  Tensor cur = input;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    if (trace) trace->inputs.push_back(cur);
    Tensor next;
    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, MixedLatticeConvLayer>)
            next = mixed_lattice_conv(cur, l.w_meet, l.w_join, l.support, l.alpha, l.bias);
          else if constexpr (std::is_same_v<T, StandardConvLayer>)
            next = standard_conv(cur, l.w, l.bias);
          else if constexpr (std::is_same_v<T, ReluLayer>)
            next = relu(cur);
          else if constexpr (std::is_same_v<T, MaxPoolLayer>)
            next = max_pool_2x2(cur, trace ? &trace->pool_argmax[li] : nullptr);
          else if constexpr (std::is_same_v<T, FlattenLayer>) {
            next = cur;
            next.shape = {static_cast<int>(cur.numel())};
          } else if constexpr (std::is_same_v<T, FullyConnectedLayer>)
            next = fully_connected(cur, l.w, l.bias);
        },
        net.layers[li]);
    check_finite(next, "layer " + std::to_string(li) + " output");
    cur = std::move(next);
  }
  return cur;
}

Gradients make_gradients(const Network& net) {
  Gradients g;
  for (const Tensor* p : net.params()) g.tensors.push_back(Tensor(p->shape));
  return g;
}

void zero_gradients(Gradients& g) {
  for (auto& t : g.tensors) t.fill(0.0);
}

Tensor backward(const Network& net, const ForwardTrace& trace, const Tensor& dlogits,
                Gradients& grads) {
  if (trace.inputs.size() != net.layers.size())
    throw std::invalid_argument("backward: trace does not match network");

  // parameter slot of each layer within the flat gradient list
  std::vector<int> slot(net.layers.size(), -1);
  {
    int s = 0;
    for (std::size_t li = 0; li < net.layers.size(); ++li) {
      std::visit(
          [&](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, MixedLatticeConvLayer>) {
              slot[li] = s;
              s += 3;
            } else if constexpr (std::is_same_v<T, StandardConvLayer> ||
                                 std::is_same_v<T, FullyConnectedLayer>) {
              slot[li] = s;
              s += 2;
            }
          },
          net.layers[li]);
    }
  }

  Tensor up = dlogits;
  for (std::size_t k = net.layers.size(); k-- > 0;) {
    const Tensor& in = trace.inputs[k];
    Tensor down;
    std::visit(
        [&](const auto& l) {
          using T = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<T, MixedLatticeConvLayer>) {
            MixedConvGrads g =
                mixed_lattice_conv_backward(in, l.w_meet, l.w_join, l.support, l.alpha, up);
            auto& gs = grads.tensors;
            for (std::int64_t t = 0; t < g.dw_meet.numel(); ++t)
              gs[slot[k]][t] += g.dw_meet[t];
            for (std::int64_t t = 0; t < g.dw_join.numel(); ++t)
              gs[slot[k] + 1][t] += g.dw_join[t];
            for (std::int64_t t = 0; t < g.dbias.numel(); ++t) gs[slot[k] + 2][t] += g.dbias[t];
            down = std::move(g.dinput);
          } else if constexpr (std::is_same_v<T, StandardConvLayer>) {
            ConvGrads g = standard_conv_backward(in, l.w, up, true);
            for (std::int64_t t = 0; t < g.dweights.numel(); ++t)
              grads.tensors[slot[k]][t] += g.dweights[t];
            for (std::int64_t t = 0; t < g.dbias.numel(); ++t)
              grads.tensors[slot[k] + 1][t] += g.dbias[t];
            down = std::move(g.dinput);
          } else if constexpr (std::is_same_v<T, ReluLayer>) {
            down = relu_backward(in, up);
          } else if constexpr (std::is_same_v<T, MaxPoolLayer>) {
            down = max_pool_2x2_backward(trace.pool_argmax[k], in.shape, up);
          } else if constexpr (std::is_same_v<T, FlattenLayer>) {
            down = up;
            down.shape = in.shape;
          } else if constexpr (std::is_same_v<T, FullyConnectedLayer>) {
            FcGrads g = fully_connected_backward(in, l.w, up);
            for (std::int64_t t = 0; t < g.dw.numel(); ++t) grads.tensors[slot[k]][t] += g.dw[t];
            for (std::int64_t t = 0; t < g.db.numel(); ++t)
              grads.tensors[slot[k] + 1][t] += g.db[t];
            down = std::move(g.dx);
          }
        },
        net.layers[k]);
    check_finite(down, "layer " + std::to_string(k) + " gradient");
    up = std::move(down);
  }
  return up;
}

AdamState make_adam(const Network& net, double lr) {
  AdamState st;
  st.lr = lr;
  for (const Tensor* p : net.params()) {
    st.m.push_back(Tensor(p->shape));
    st.v.push_back(Tensor(p->shape));
  }
  return st;
}

void adam_step(const std::vector<Tensor*>& params, const Gradients& grads, AdamState& state) {
  if (params.size() != grads.tensors.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam_step: parameter/gradient/state size mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& w = *params[p];
    const Tensor& g = grads.tensors[p];
    Tensor& m = state.m[p];
    Tensor& v = state.v[p];
    if (!w.same_shape(g)) throw std::invalid_argument("adam_step: gradient shape mismatch");
    for (std::int64_t t = 0; t < w.numel(); ++t) {
      m[t] = state.beta1 * m[t] + (1.0 - state.beta1) * g[t];
      v[t] = state.beta2 * v[t] + (1.0 - state.beta2) * g[t] * g[t];
      const double m_hat = m[t] / bc1;
      const double v_hat = v[t] / bc2;
      w[t] -= state.lr * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

}  // namespace mph
