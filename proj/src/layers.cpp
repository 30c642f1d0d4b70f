#include "mph/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mph {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_lattice_conv_shapes(const Tensor& f, const Tensor& w, const KernelSupport& support,
                               const Tensor& bias) {
  require(f.shape.size() == 3, "lattice conv: input must be (C,H,W)");
  require(w.shape.size() == 4, "lattice conv: weights must be (C_out,C_in,sx,sy)");
  require(w.shape[1] == f.shape[0], "lattice conv: channel mismatch");
  require(w.shape[2] == static_cast<int>(support.xs.size()) &&
              w.shape[3] == static_cast<int>(support.ys.size()),
          "lattice conv: weights do not match support");
  require(!support.xs.empty() && !support.ys.empty(), "lattice conv: empty support");
  require(support.xs.back() <= f.shape[1] - 1 && support.ys.back() <= f.shape[2] - 1,
          "lattice conv: support outside input lattice");
  require(bias.numel() == 0 || (bias.shape.size() == 1 && bias.shape[0] == w.shape[0]),
          "lattice conv: bias shape mismatch");
}

void check_standard_conv_shapes(const Tensor& f, const Tensor& w, const Tensor& bias) {
  require(f.shape.size() == 3, "standard conv: input must be (C,H,W)");
  require(w.shape.size() == 4, "standard conv: weights must be (C_out,C_in,kh,kw)");
  require(w.shape[1] == f.shape[0], "standard conv: channel mismatch");
  require(f.shape[1] >= 1 && f.shape[2] >= 1, "standard conv: empty input");
  require(bias.numel() == 0 || (bias.shape.size() == 1 && bias.shape[0] == w.shape[0]),
          "standard conv: bias shape mismatch");
}

// Meet picks min(x,a); join picks max(x,a).
template <bool Meet>
inline int shift(int x, int a) {
  return Meet ? std::min(x, a) : std::max(x, a);
}

template <bool Meet>
Tensor lattice_conv_forward(const Tensor& f, const Tensor& w, const KernelSupport& support,
                            const Tensor& bias) {
  check_lattice_conv_shapes(f, w, support, bias);
  const int c_out = w.shape[0], c_in = w.shape[1];
  const int sx = w.shape[2], sy = w.shape[3];
  const int h = f.shape[1], wd = f.shape[2];
  Tensor out({c_out, h, wd});

#pragma omp parallel for collapse(2) schedule(static)
  for (int j = 0; j < c_out; ++j) {
    for (int x = 0; x < h; ++x) {
      double* orow = &out.at(j, x, 0);
      const double base = bias.numel() ? bias[j] : 0.0;
      for (int y = 0; y < wd; ++y) orow[y] = base;
      for (int i = 0; i < c_in; ++i) {
        for (int ai = 0; ai < sx; ++ai) {
          const int xa = shift<Meet>(x, support.xs[ai]);
          const double* frow = &f.at(i, xa, 0);
          for (int bi = 0; bi < sy; ++bi) {
            const double g = w.at(j, i, ai, bi);
            if (g == 0.0) continue;
            const int b = support.ys[bi];
            for (int y = 0; y < wd; ++y) orow[y] += frow[shift<Meet>(y, b)] * g;
          }
        }
      }
    }
  }
  return out;
}

template <bool Meet>
ConvGrads lattice_conv_backward(const Tensor& f, const Tensor& w, const KernelSupport& support,
                                const Tensor& upstream, bool with_bias) {
  check_lattice_conv_shapes(f, w, support, Tensor{});
  require(upstream.shape == std::vector<int>{w.shape[0], f.shape[1], f.shape[2]},
          "lattice conv backward: upstream shape mismatch");
  const int c_out = w.shape[0], c_in = w.shape[1];
  const int sx = w.shape[2], sy = w.shape[3];
  const int h = f.shape[1], wd = f.shape[2];

  ConvGrads g;
  g.dweights = Tensor(w.shape);
  g.dinput = Tensor(f.shape);

#pragma omp parallel for collapse(2) schedule(static)
  for (int j = 0; j < c_out; ++j) {
    for (int i = 0; i < c_in; ++i) {
      for (int ai = 0; ai < sx; ++ai) {
        for (int bi = 0; bi < sy; ++bi) {
          const int a = support.xs[ai], b = support.ys[bi];
          double acc = 0.0;
          for (int x = 0; x < h; ++x) {
            const double* urow = &upstream.at(j, x, 0);
            const double* frow = &f.at(i, shift<Meet>(x, a), 0);
            for (int y = 0; y < wd; ++y) acc += urow[y] * frow[shift<Meet>(y, b)];
          }
          g.dweights.at(j, i, ai, bi) = acc;
        }
      }
    }
  }

#pragma omp parallel for schedule(static)
  for (int i = 0; i < c_in; ++i) {
    for (int j = 0; j < c_out; ++j) {
      for (int ai = 0; ai < sx; ++ai) {
        for (int bi = 0; bi < sy; ++bi) {
          const double gw = w.at(j, i, ai, bi);
          if (gw == 0.0) continue;
          const int a = support.xs[ai], b = support.ys[bi];
          for (int x = 0; x < h; ++x) {
            const double* urow = &upstream.at(j, x, 0);
            double* grow = &g.dinput.at(i, shift<Meet>(x, a), 0);
            for (int y = 0; y < wd; ++y) grow[shift<Meet>(y, b)] += urow[y] * gw;
          }
        }
      }
    }
  }

  if (with_bias) {
    g.dbias = Tensor({c_out});
    for (int j = 0; j < c_out; ++j) {
      double acc = 0.0;
      const double* urow = &upstream.at(j, 0, 0);
      for (int t = 0; t < h * wd; ++t) acc += urow[t];
      g.dbias[j] = acc;
    }
  }
  return g;
}

}  // namespace

Tensor meet_conv(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                 const Tensor& bias) {
  return lattice_conv_forward<true>(f, weights, support, bias);
}

Tensor join_conv(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                 const Tensor& bias) {
  return lattice_conv_forward<false>(f, weights, support, bias);
}

ConvGrads meet_conv_backward(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                             const Tensor& upstream, bool with_bias) {
  return lattice_conv_backward<true>(f, weights, support, upstream, with_bias);
}

ConvGrads join_conv_backward(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                             const Tensor& upstream, bool with_bias) {
  return lattice_conv_backward<false>(f, weights, support, upstream, with_bias);
}

Tensor mixed_lattice_conv(const Tensor& f, const Tensor& w_meet, const Tensor& w_join,
                          const KernelSupport& support, double alpha, const Tensor& bias) {
  require(alpha >= 0.0 && alpha <= 1.0, "mixed lattice conv: alpha must be in [0,1]");
  Tensor m = meet_conv(f, w_meet, support, Tensor{});
  Tensor j = join_conv(f, w_join, support, Tensor{});
  const int c_out = m.shape[0];
  const std::int64_t plane = m.numel() / c_out;
  Tensor out(m.shape);
  for (int c = 0; c < c_out; ++c) {
    const double base = bias.numel() ? bias[c] : 0.0;
    for (std::int64_t t = 0; t < plane; ++t) {
      const std::int64_t idx = c * plane + t;
      out[idx] = base + alpha * m[idx] + (1.0 - alpha) * j[idx];
    }
  }
  return out;
}

MixedConvGrads mixed_lattice_conv_backward(const Tensor& f, const Tensor& w_meet,
                                           const Tensor& w_join, const KernelSupport& support,
                                           double alpha, const Tensor& upstream) {
  ConvGrads gm = meet_conv_backward(f, w_meet, support, upstream, false);
  ConvGrads gj = join_conv_backward(f, w_join, support, upstream, false);
  MixedConvGrads g;
  g.dw_meet = std::move(gm.dweights);
  g.dw_join = std::move(gj.dweights);
  for (double& v : g.dw_meet.data) v *= alpha;
  for (double& v : g.dw_join.data) v *= 1.0 - alpha;
  g.dinput = std::move(gm.dinput);
  for (std::int64_t t = 0; t < g.dinput.numel(); ++t)
    g.dinput[t] = alpha * g.dinput[t] + (1.0 - alpha) * gj.dinput[t];
  const int c_out = upstream.shape[0];
  const std::int64_t plane = upstream.numel() / c_out;
  g.dbias = Tensor({c_out});
  for (int c = 0; c < c_out; ++c) {
    double acc = 0.0;
    for (std::int64_t t = 0; t < plane; ++t) acc += upstream[c * plane + t];
    g.dbias[c] = acc;
  }
  return g;
}

Tensor standard_conv(const Tensor& f, const Tensor& weights, const Tensor& bias) {
  check_standard_conv_shapes(f, weights, bias);
  const int c_out = weights.shape[0], c_in = weights.shape[1];
  const int kh = weights.shape[2], kw = weights.shape[3];
  const int pad_t = kh / 2, pad_l = kw / 2;
  const int h = f.shape[1], wd = f.shape[2];
  Tensor out({c_out, h, wd});

#pragma omp parallel for collapse(2) schedule(static)
  for (int j = 0; j < c_out; ++j) {
    for (int x = 0; x < h; ++x) {
      double* orow = &out.at(j, x, 0);
      const double base = bias.numel() ? bias[j] : 0.0;
      for (int y = 0; y < wd; ++y) orow[y] = base;
      for (int i = 0; i < c_in; ++i) {
        for (int a = 0; a < kh; ++a) {
          const int xi = x + a - pad_t;
          if (xi < 0 || xi >= h) continue;
          const double* frow = &f.at(i, xi, 0);
          for (int b = 0; b < kw; ++b) {
            const double g = weights.at(j, i, a, b);
            if (g == 0.0) continue;
            const int y_lo = std::max(0, pad_l - b);
            const int y_hi = std::min(wd, wd + pad_l - b);
            for (int y = y_lo; y < y_hi; ++y) orow[y] += frow[y + b - pad_l] * g;
          }
        }
      }
    }
  }
  return out;
}

ConvGrads standard_conv_backward(const Tensor& f, const Tensor& weights, const Tensor& upstream,
                                 bool with_bias) {
  check_standard_conv_shapes(f, weights, Tensor{});
  require(upstream.shape == std::vector<int>{weights.shape[0], f.shape[1], f.shape[2]},
          "standard conv backward: upstream shape mismatch");
  const int c_out = weights.shape[0], c_in = weights.shape[1];
  const int kh = weights.shape[2], kw = weights.shape[3];
  const int pad_t = kh / 2, pad_l = kw / 2;
  const int h = f.shape[1], wd = f.shape[2];

  ConvGrads g;
  g.dweights = Tensor(weights.shape);
  g.dinput = Tensor(f.shape);

#pragma omp parallel for collapse(2) schedule(static)
  for (int j = 0; j < c_out; ++j) {
    for (int i = 0; i < c_in; ++i) {
      for (int a = 0; a < kh; ++a) {
        for (int b = 0; b < kw; ++b) {
          double acc = 0.0;
          for (int x = 0; x < h; ++x) {
            const int xi = x + a - pad_t;
            if (xi < 0 || xi >= h) continue;
            const double* urow = &upstream.at(j, x, 0);
            const double* frow = &f.at(i, xi, 0);
            const int y_lo = std::max(0, pad_l - b);
            const int y_hi = std::min(wd, wd + pad_l - b);
            for (int y = y_lo; y < y_hi; ++y) acc += urow[y] * frow[y + b - pad_l];
          }
          g.dweights.at(j, i, a, b) = acc;
        }
      }
    }
  }

#pragma omp parallel for collapse(2) schedule(static)
  for (int i = 0; i < c_in; ++i) {
    for (int p = 0; p < h; ++p) {
      double* grow = &g.dinput.at(i, p, 0);
      for (int j = 0; j < c_out; ++j) {
        for (int a = 0; a < kh; ++a) {
          const int x = p - a + pad_t;
          if (x < 0 || x >= h) continue;
          const double* urow = &upstream.at(j, x, 0);
          for (int b = 0; b < kw; ++b) {
            const double gw = weights.at(j, i, a, b);
            if (gw == 0.0) continue;
            const int q_lo = std::max(0, b - pad_l);
            const int q_hi = std::min(wd, wd + b - pad_l);
            for (int q = q_lo; q < q_hi; ++q) grow[q] += urow[q - b + pad_l] * gw;
          }
        }
      }
    }
  }

  if (with_bias) {
    g.dbias = Tensor({c_out});
    for (int j = 0; j < c_out; ++j) {
      double acc = 0.0;
      const double* urow = &upstream.at(j, 0, 0);
      for (int t = 0; t < h * wd; ++t) acc += urow[t];
      g.dbias[j] = acc;
    }
  }
  return g;
}

Tensor max_pool_2x2(const Tensor& f, std::vector<int>* argmax) {
  require(f.shape.size() == 3, "max pool: input must be (C,H,W)");
  const int c = f.shape[0], h = f.shape[1], wd = f.shape[2];
  require(h % 2 == 0 && wd % 2 == 0, "max pool: spatial dims must be even");
  Tensor out({c, h / 2, wd / 2});
  if (argmax) argmax->assign(out.data.size(), 0);
  for (int ch = 0; ch < c; ++ch) {
    for (int x = 0; x < h / 2; ++x) {
      for (int y = 0; y < wd / 2; ++y) {
        double best = -std::numeric_limits<double>::infinity();
        int best_idx = 0;
        for (int dx = 0; dx < 2; ++dx) {
          for (int dy = 0; dy < 2; ++dy) {
            const int xi = 2 * x + dx, yi = 2 * y + dy;
            const double v = f.at(ch, xi, yi);
            if (v > best) {
              best = v;
              best_idx = (ch * h + xi) * wd + yi;
            }
          }
        }
        out.at(ch, x, y) = best;
        if (argmax) (*argmax)[(static_cast<std::size_t>(ch) * (h / 2) + x) * (wd / 2) + y] = best_idx;
      }
    }
  }
  return out;
}

Tensor max_pool_2x2_backward(const std::vector<int>& argmax, const std::vector<int>& in_shape,
                             const Tensor& upstream) {
  require(static_cast<std::int64_t>(argmax.size()) == upstream.numel(),
          "max pool backward: argmax/upstream mismatch");
  Tensor din(in_shape);
  for (std::size_t t = 0; t < argmax.size(); ++t) din[argmax[t]] += upstream[t];
  return din;
}

Tensor relu(const Tensor& x) {
  Tensor out(x.shape);
  for (std::int64_t t = 0; t < x.numel(); ++t) out[t] = x[t] > 0.0 ? x[t] : 0.0;
  return out;
}

Tensor relu_backward(const Tensor& x, const Tensor& upstream) {
  require(x.shape == upstream.shape, "relu backward: shape mismatch");
  Tensor din(x.shape);
  for (std::int64_t t = 0; t < x.numel(); ++t) din[t] = x[t] > 0.0 ? upstream[t] : 0.0;
  return din;
}

Tensor fully_connected(const Tensor& x, const Tensor& w, const Tensor& b) {
  require(x.shape.size() == 1 && w.shape.size() == 2 && b.shape.size() == 1,
          "fully connected: expected x(d_in), w(d_out,d_in), b(d_out)");
  require(w.shape[1] == x.shape[0] && w.shape[0] == b.shape[0],
          "fully connected: shape mismatch");
  const int d_out = w.shape[0], d_in = w.shape[1];
  Tensor out({d_out});
  for (int o = 0; o < d_out; ++o) {
    double acc = b[o];
    const double* wrow = &w.at(o, 0);
    for (int i = 0; i < d_in; ++i) acc += wrow[i] * x[i];
    out[o] = acc;
  }
  return out;
}

FcGrads fully_connected_backward(const Tensor& x, const Tensor& w, const Tensor& upstream) {
  require(upstream.shape.size() == 1 && upstream.shape[0] == w.shape[0],
          "fully connected backward: upstream shape mismatch");
  const int d_out = w.shape[0], d_in = w.shape[1];
  FcGrads g;
  g.dw = Tensor(w.shape);
  g.dx = Tensor(x.shape);
  g.db = upstream;
  for (int o = 0; o < d_out; ++o) {
    const double u = upstream[o];
    const double* wrow = &w.at(o, 0);
    double* gwrow = &g.dw.at(o, 0);
    for (int i = 0; i < d_in; ++i) {
      gwrow[i] = u * x[i];
      g.dx[i] += u * wrow[i];
    }
  }
  return g;
}

SoftmaxCrossEntropy softmax_cross_entropy(const Tensor& logits, int label) {
  require(logits.shape.size() == 1 && logits.shape[0] >= 2,
          "softmax cross entropy: logits must be a vector with >= 2 classes");
  require(label >= 0 && label < logits.shape[0], "softmax cross entropy: label out of range");
  const int c = logits.shape[0];
  double mx = logits[0];
  for (int i = 1; i < c; ++i) mx = std::max(mx, logits[i]);
  double z = 0.0;
  SoftmaxCrossEntropy r;
  r.probs = Tensor({c});
  for (int i = 0; i < c; ++i) {
    r.probs[i] = std::exp(logits[i] - mx);
    z += r.probs[i];
  }
  for (int i = 0; i < c; ++i) r.probs[i] /= z;
  r.loss = -(logits[label] - mx - std::log(z));
  r.dlogits = r.probs;
  r.dlogits[label] -= 1.0;
  return r;
}

namespace reference {

namespace {

template <bool Meet>
inline int shift(int x, int a) {
  return Meet ? std::min(x, a) : std::max(x, a);
}

// Literal translation of the convolution sums, one output element at a time.
template <bool Meet>
Tensor lattice_conv_naive(const Tensor& f, const Tensor& w, const KernelSupport& support,
                          const Tensor& bias) {
  const int c_out = w.shape[0], c_in = w.shape[1];
  const int sx = w.shape[2], sy = w.shape[3];
  const int h = f.shape[1], wd = f.shape[2];
  Tensor out({c_out, h, wd});
  for (int j = 0; j < c_out; ++j)
    for (int x = 0; x < h; ++x)
      for (int y = 0; y < wd; ++y) {
        double acc = bias.numel() ? bias[j] : 0.0;
        for (int i = 0; i < c_in; ++i)
          for (int ai = 0; ai < sx; ++ai)
            for (int bi = 0; bi < sy; ++bi)
              acc += f.at(i, shift<Meet>(x, support.xs[ai]), shift<Meet>(y, support.ys[bi])) *
                     w.at(j, i, ai, bi);
        out.at(j, x, y) = acc;
      }
  return out;
}

template <bool Meet>
ConvGrads lattice_conv_backward_naive(const Tensor& f, const Tensor& w,
                                      const KernelSupport& support, const Tensor& upstream,
                                      bool with_bias) {
  const int c_out = w.shape[0], c_in = w.shape[1];
  const int sx = w.shape[2], sy = w.shape[3];
  const int h = f.shape[1], wd = f.shape[2];
  ConvGrads g;
  g.dweights = Tensor(w.shape);
  g.dinput = Tensor(f.shape);
  if (with_bias) g.dbias = Tensor({c_out});
  for (int j = 0; j < c_out; ++j)
    for (int x = 0; x < h; ++x)
      for (int y = 0; y < wd; ++y) {
        const double u = upstream.at(j, x, y);
        if (with_bias) g.dbias[j] += u;
        for (int i = 0; i < c_in; ++i)
          for (int ai = 0; ai < sx; ++ai)
            for (int bi = 0; bi < sy; ++bi) {
              const int xa = shift<Meet>(x, support.xs[ai]);
              const int yb = shift<Meet>(y, support.ys[bi]);
              g.dweights.at(j, i, ai, bi) += u * f.at(i, xa, yb);
              g.dinput.at(i, xa, yb) += u * w.at(j, i, ai, bi);
            }
      }
  return g;
}

}  // namespace

Tensor meet_conv(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                 const Tensor& bias) {
  return lattice_conv_naive<true>(f, weights, support, bias);
}

Tensor join_conv(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                 const Tensor& bias) {
  return lattice_conv_naive<false>(f, weights, support, bias);
}

ConvGrads meet_conv_backward(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                             const Tensor& upstream, bool with_bias) {
  return lattice_conv_backward_naive<true>(f, weights, support, upstream, with_bias);
}

ConvGrads join_conv_backward(const Tensor& f, const Tensor& weights, const KernelSupport& support,
                             const Tensor& upstream, bool with_bias) {
  return lattice_conv_backward_naive<false>(f, weights, support, upstream, with_bias);
}

Tensor standard_conv(const Tensor& f, const Tensor& weights, const Tensor& bias) {
  const int c_out = weights.shape[0], c_in = weights.shape[1];
  const int kh = weights.shape[2], kw = weights.shape[3];
  const int pad_t = kh / 2, pad_l = kw / 2;
  const int h = f.shape[1], wd = f.shape[2];
  Tensor out({c_out, h, wd});
  for (int j = 0; j < c_out; ++j)
    for (int x = 0; x < h; ++x)
      for (int y = 0; y < wd; ++y) {
        double acc = bias.numel() ? bias[j] : 0.0;
        for (int i = 0; i < c_in; ++i)
          for (int a = 0; a < kh; ++a)
            for (int b = 0; b < kw; ++b) {
              const int xi = x + a - pad_t, yi = y + b - pad_l;
              if (xi < 0 || xi >= h || yi < 0 || yi >= wd) continue;
              acc += f.at(i, xi, yi) * weights.at(j, i, a, b);
            }
        out.at(j, x, y) = acc;
      }
  return out;
}

ConvGrads standard_conv_backward(const Tensor& f, const Tensor& weights, const Tensor& upstream,
                                 bool with_bias) {
  const int c_out = weights.shape[0], c_in = weights.shape[1];
  const int kh = weights.shape[2], kw = weights.shape[3];
  const int pad_t = kh / 2, pad_l = kw / 2;
  const int h = f.shape[1], wd = f.shape[2];
  ConvGrads g;
  g.dweights = Tensor(weights.shape);
  g.dinput = Tensor(f.shape);
  if (with_bias) g.dbias = Tensor({c_out});
  for (int j = 0; j < c_out; ++j)
    for (int x = 0; x < h; ++x)
      for (int y = 0; y < wd; ++y) {
        const double u = upstream.at(j, x, y);
        if (with_bias) g.dbias[j] += u;
        for (int i = 0; i < c_in; ++i)
          for (int a = 0; a < kh; ++a)
            for (int b = 0; b < kw; ++b) {
              const int xi = x + a - pad_t, yi = y + b - pad_l;
              if (xi < 0 || xi >= h || yi < 0 || yi >= wd) continue;
              g.dweights.at(j, i, a, b) += u * f.at(i, xi, yi);
              g.dinput.at(i, xi, yi) += u * weights.at(j, i, a, b);
            }
      }
  return g;
}

}  // namespace reference

}  // namespace mph
