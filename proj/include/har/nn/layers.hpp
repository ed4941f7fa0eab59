#pragma once

// Layer kernels. Internally feature maps are time-major ([length][channels])
// so every convolution output is one contiguous dot product of length
// kernel * in_streams. The Tensor-level wrappers at the bottom take and return
// the stream-major [streams][length] layout.

#include "har/error.hpp"
#include "har/nn/model_spec.hpp"
#include "har/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace har::nn {

template <class Real>
inline Real activate(Real v, Activation a) {
  switch (a) {
    case Activation::relu:
      return v > Real(0) ? v : Real(0);
    case Activation::sigmoid:
      return Real(1) / (Real(1) + std::exp(-v));
    case Activation::identity:
      break;
  }
  return v;
}

/// Derivative of the activation expressed through its output y.
template <class Real>
inline Real activation_slope(Real y, Activation a) {
  switch (a) {
    case Activation::relu:
      return y > Real(0) ? Real(1) : Real(0);
    case Activation::sigmoid:
      return y * (Real(1) - y);
    case Activation::identity:
      break;
  }
  return Real(1);
}

/// Fixed-order dot product with four partial sums.
template <class Real>
inline Real dot(const Real* a, const Real* b, std::size_t n) {
  Real s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

template <class Real>
inline void axpy(Real alpha, const Real* x, Real* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// ---------------------------------------------------------------- dense

/// y[n] = act(sum_i w[n][i] x[i] + b[n]).
template <class Real>
void dense_forward(std::span<const Real> x, std::span<const Real> w, std::span<const Real> b,
                   Activation act, std::span<Real> y) {
  const std::size_t in = x.size();
  for (std::size_t n = 0; n < y.size(); ++n) {
    y[n] = activate(dot(w.data() + n * in, x.data(), in) + b[n], act);
  }
}

/// On entry `dy` holds dL/dy; it is overwritten with dL/d(pre-activation).
/// Accumulates into dw and db; writes dx when it is non-empty.
template <class Real>
void dense_backward(std::span<const Real> x, std::span<const Real> w, std::span<const Real> y,
                    Activation act, std::span<Real> dy, std::span<Real> dw, std::span<Real> db,
                    std::span<Real> dx) {
  const std::size_t in = x.size();
  for (std::size_t n = 0; n < y.size(); ++n) dy[n] *= activation_slope(y[n], act);
  if (!dx.empty()) std::fill(dx.begin(), dx.end(), Real(0));
  for (std::size_t n = 0; n < y.size(); ++n) {
    const Real d = dy[n];
    if (d == Real(0)) continue;
    db[n] += d;
    axpy(d, x.data(), dw.data() + n * in, in);
    if (!dx.empty()) axpy(d, w.data() + n * in, dx.data(), in);
  }
}

// ---------------------------------------------------------------- conv1d

/// Time-major valid convolution. x: [in_len][R], w: [F][m][R], y: [out_len][F].
/// y[s][n] = act(sum_i sum_r w[n][i][r] x[s*z + i][r] + b[n]).
template <class Real>
void conv1d_forward_tm(std::span<const Real> x, std::size_t in_len, std::size_t in_streams,
                       std::span<const Real> w, std::span<const Real> b, const ConvSpec& spec,
                       std::span<Real> y) {
  const std::size_t out_len = conv_output_length(in_len, spec.kernel, spec.stride);
  const std::size_t patch = spec.kernel * in_streams;
  for (std::size_t s = 0; s < out_len; ++s) {
    const Real* xs = x.data() + s * spec.stride * in_streams;
    Real* ys = y.data() + s * spec.filters;
    for (std::size_t n = 0; n < spec.filters; ++n) {
      ys[n] = activate(dot(w.data() + n * patch, xs, patch) + b[n], spec.activation);
    }
  }
}

/// `dy` ([out_len][F]) is converted in place to the pre-activation gradient.
/// Accumulates dw, db; writes dx ([in_len][R]) when non-empty.
template <class Real>
void conv1d_backward_tm(std::span<const Real> x, std::size_t in_len, std::size_t in_streams,
                        std::span<const Real> w, std::span<const Real> y, const ConvSpec& spec,
                        std::span<Real> dy, std::span<Real> dw, std::span<Real> db,
                        std::span<Real> dx) {
  const std::size_t out_len = conv_output_length(in_len, spec.kernel, spec.stride);
  const std::size_t patch = spec.kernel * in_streams;
  for (std::size_t i = 0; i < out_len * spec.filters; ++i) dy[i] *= activation_slope(y[i], spec.activation);
  if (!dx.empty()) std::fill(dx.begin(), dx.end(), Real(0));
  for (std::size_t s = 0; s < out_len; ++s) {
    const std::size_t base = s * spec.stride * in_streams;
    for (std::size_t n = 0; n < spec.filters; ++n) {
      const Real d = dy[s * spec.filters + n];
      if (d == Real(0)) continue;
      db[n] += d;
      axpy(d, x.data() + base, dw.data() + n * patch, patch);
      if (!dx.empty()) axpy(d, w.data() + n * patch, dx.data() + base, patch);
    }
  }
}

// ---------------------------------------------------------------- maxpool

/// Time-major non-overlapping max pooling. x: [len][F] -> y: [len / width][F].
/// argmax records the winning time index (first maximum on ties).
template <class Real>
void maxpool1d_forward_tm(std::span<const Real> x, std::size_t len, std::size_t channels,
                          std::size_t width, std::span<Real> y, std::span<std::uint32_t> argmax) {
  if (width == 0) throw ShapeError("maxpool1d: width must be >= 1");
  const std::size_t out_len = len / width;
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t f = 0; f < channels; ++f) {
      std::size_t best = t * width;
      Real v = x[best * channels + f];
      for (std::size_t k = 1; k < width; ++k) {
        const std::size_t idx = t * width + k;
        if (x[idx * channels + f] > v) {
          v = x[idx * channels + f];
          best = idx;
        }
      }
      y[t * channels + f] = v;
      argmax[t * channels + f] = static_cast<std::uint32_t>(best);
    }
  }
}

/// Routes dy back to the recorded argmax positions; dx is fully overwritten.
template <class Real>
void maxpool1d_backward_tm(std::span<const Real> dy, std::span<const std::uint32_t> argmax,
                           std::size_t out_len, std::size_t channels, std::span<Real> dx) {
  std::fill(dx.begin(), dx.end(), Real(0));
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t f = 0; f < channels; ++f) {
      dx[argmax[t * channels + f] * channels + f] += dy[t * channels + f];
    }
  }
}

// ---------------------------------------------------------------- loss

template <class Real>
struct LossResult {
  Real loss = 0;
  std::vector<Real> grad;
  std::vector<Real> probs;
};

/// Max-shifted softmax into `probs`; returns -log probs[label].
template <class Real>
Real softmax_xent(std::span<const Real> logits, std::size_t label, std::span<Real> probs) {
  Real top = logits[0];
  for (Real v : logits) top = std::max(top, v);
  Real sum = 0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    probs[c] = std::exp(logits[c] - top);
    sum += probs[c];
  }
  for (std::size_t c = 0; c < logits.size(); ++c) probs[c] /= sum;
  // log-sum-exp form stays finite even when probs[label] underflows.
  return std::log(sum) - (logits[label] - top);
}

/// Loss, gradient w.r.t. the logits (probs - onehot) and probabilities.
template <class Real>
LossResult<Real> softmax_cross_entropy(std::span<const Real> logits, std::size_t label) {
  if (label >= logits.size()) throw ShapeError("softmax_cross_entropy: label out of range");
  LossResult<Real> r;
  r.probs.resize(logits.size());
  r.loss = softmax_xent(logits, label, std::span<Real>(r.probs));
  r.grad = r.probs;
  r.grad[label] -= Real(1);
  return r;
}

// ---------------------------------------------------------------- wrappers

/// x: [M], w: [out][M], b: [out] -> [out].
template <class Real>
Tensor<Real> dense_forward(const Tensor<Real>& x, const DenseSpec& spec, const Tensor<Real>& w,
                           const Tensor<Real>& b) {
  require_rank(x, 1, "dense_forward input");
  require_rank(w, 2, "dense_forward weights");
  if (w.dim(0) != spec.units || w.dim(1) != x.dim(0) || b.size() != spec.units) {
    throw ShapeError("dense_forward: weights " + std::to_string(w.dim(0)) + "x" + std::to_string(w.dim(1)) +
                     " do not match input " + std::to_string(x.dim(0)) + " and " +
                     std::to_string(spec.units) + " units");
  }
  Tensor<Real> y({spec.units});
  dense_forward<Real>(x.data, w.data, b.data, spec.activation, y.data);
  return y;
}

/// x: [R][L_in], w: [F][m][R], b: [F] -> [F][L_out].
template <class Real>
Tensor<Real> conv1d_forward(const Tensor<Real>& x, const ConvSpec& spec, const Tensor<Real>& w,
                            const Tensor<Real>& b) {
  require_rank(x, 2, "conv1d_forward input");
  require_rank(w, 3, "conv1d_forward weights");
  const std::size_t r = x.dim(0);
  const std::size_t len = x.dim(1);
  if (w.dim(0) != spec.filters || w.dim(1) != spec.kernel || w.dim(2) != r || b.size() != spec.filters) {
    throw ShapeError("conv1d_forward: weight shape does not match spec and input streams");
  }
  const std::size_t out_len = conv_output_length(len, spec.kernel, spec.stride);
  std::vector<Real> xt(len * r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t t = 0; t < len; ++t) xt[t * r + i] = x(i, t);
  }
  std::vector<Real> yt(out_len * spec.filters);
  conv1d_forward_tm<Real>(xt, len, r, w.data, b.data, spec, yt);
  Tensor<Real> y({spec.filters, out_len});
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t n = 0; n < spec.filters; ++n) y(n, t) = yt[t * spec.filters + n];
  }
  return y;
}

template <class Real>
struct PoolResult {
  Tensor<Real> output;                 // [F][L / width]
  std::vector<std::uint32_t> argmax;  // [F][L / width], index into L
};

/// x: [F][L] -> [F][floor(L / width)]; trailing remainder dropped.
template <class Real>
PoolResult<Real> maxpool1d(const Tensor<Real>& x, std::size_t width) {
  require_rank(x, 2, "maxpool1d input");
  if (width == 0) throw ShapeError("maxpool1d: width must be >= 1");
  const std::size_t f = x.dim(0);
  const std::size_t len = x.dim(1);
  const std::size_t out_len = len / width;
  std::vector<Real> xt(len * f);
  for (std::size_t c = 0; c < f; ++c) {
    for (std::size_t t = 0; t < len; ++t) xt[t * f + c] = x(c, t);
  }
  std::vector<Real> yt(out_len * f);
  std::vector<std::uint32_t> at(out_len * f);
  maxpool1d_forward_tm<Real>(xt, len, f, width, yt, at);
  PoolResult<Real> r{Tensor<Real>({f, out_len}), std::vector<std::uint32_t>(out_len * f)};
  for (std::size_t t = 0; t < out_len; ++t) {
    for (std::size_t c = 0; c < f; ++c) {
      r.output(c, t) = yt[t * f + c];
      r.argmax[c * out_len + t] = at[t * f + c];
    }
  }
  return r;
}

}  // namespace har::nn
