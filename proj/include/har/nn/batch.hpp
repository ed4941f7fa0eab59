#pragma once

// Data-parallel kernels over samples. Every OpenMP kernel has a serial
// reference with the same floating-point operation order, so their results
// are bit-identical for any thread count; tests compare the two directly.

#include "har/features.hpp"
#include "har/nn/network.hpp"

#include <cstdint>
#include <span>
#include <type_traits>
#include <vector>

namespace har::nn {

/// Normalized network inputs for a whole split, one row per sample.
template <class Real>
struct SampleMatrix {
  std::size_t count = 0;
  std::size_t freq_dim = 0;   // streams x freq_bins
  std::size_t power_dim = 0;  // streams x power_bins
  std::vector<Real> freq;
  std::vector<Real> power;
  std::vector<std::uint8_t> labels;  // zero-based class index

  std::span<const Real> freq_row(std::size_t i) const {
    return std::span<const Real>(freq).subspan(i * freq_dim, freq_dim);
  }
  std::span<const Real> power_row(std::size_t i) const {
    return std::span<const Real>(power).subspan(i * power_dim, power_dim);
  }
};

/// Applies `stats` to every tensor and narrows to Real.
template <class Real>
SampleMatrix<Real> make_sample_matrix(const FeatureSet& set, const NormStats& stats) {
  SampleMatrix<Real> m;
  m.count = set.size();
  m.freq_dim = kNumStreams * set.freq_bins;
  m.power_dim = kNumStreams * set.power_bins;
  m.freq.reserve(m.count * m.freq_dim);
  m.power.reserve(m.count * m.power_dim);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto z = apply_normalizer(set.tensors[i], stats);
    for (double v : z.freq) m.freq.push_back(static_cast<Real>(v));
    for (double v : z.power) m.power.push_back(static_cast<Real>(v));
    m.labels.push_back(static_cast<std::uint8_t>(set.labels[i].index()));
  }
  return m;
}

/// Mean loss and mean parameter gradient over a mini-batch.
///
/// The parallel path computes per-sample gradients into separate buffers
/// concurrently, then sums them per parameter in batch order. The serial path
/// does the same sums sample by sample. Both yield identical bits.
template <class Real>
class BatchGradient {
 public:
  explicit BatchGradient(const Network<Real>& net) : net_(&net) {}

  double compute(std::span<const Real> params, const SampleMatrix<Real>& data,
                 std::span<const std::size_t> indices, std::span<Real> grad) {
    const std::size_t b = indices.size();
    const std::size_t p = net_->param_count();
    check(params, grad, b);
    ensure(b);
    const auto nb = static_cast<std::ptrdiff_t>(b);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < nb; ++i) {
      const auto k = static_cast<std::size_t>(i);
      std::span<Real> g(buffers_.data() + k * p, p);
      std::fill(g.begin(), g.end(), Real(0));
      const std::size_t s = indices[k];
      net_->forward(params, data.freq_row(s), data.power_row(s), workspaces_[k]);
      losses_[k] = static_cast<double>(net_->backward(params, data.labels[s], workspaces_[k], g));
    }
    const Real inv = Real(1) / static_cast<Real>(b);
    constexpr std::size_t kBlock = 2048;
    const auto blocks = static_cast<std::ptrdiff_t>((p + kBlock - 1) / kBlock);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t blk = 0; blk < blocks; ++blk) {
      const std::size_t lo = static_cast<std::size_t>(blk) * kBlock;
      const std::size_t hi = std::min(p, lo + kBlock);
      std::fill(grad.begin() + static_cast<std::ptrdiff_t>(lo), grad.begin() + static_cast<std::ptrdiff_t>(hi), Real(0));
      for (std::size_t k = 0; k < b; ++k) {
        const Real* src = buffers_.data() + k * p;
        for (std::size_t j = lo; j < hi; ++j) grad[j] += src[j];
      }
      for (std::size_t j = lo; j < hi; ++j) grad[j] *= inv;
    }
    double loss = 0.0;
    for (std::size_t k = 0; k < b; ++k) loss += losses_[k];
    return loss / static_cast<double>(b);
  }

  double compute_serial(std::span<const Real> params, const SampleMatrix<Real>& data,
                        std::span<const std::size_t> indices, std::span<Real> grad) {
    const std::size_t b = indices.size();
    const std::size_t p = net_->param_count();
    check(params, grad, b);
    ensure(1);
    std::span<Real> scratch(buffers_.data(), p);
    std::fill(grad.begin(), grad.end(), Real(0));
    double loss = 0.0;
    for (std::size_t k = 0; k < b; ++k) {
      std::fill(scratch.begin(), scratch.end(), Real(0));
      const std::size_t s = indices[k];
      net_->forward(params, data.freq_row(s), data.power_row(s), workspaces_[0]);
      loss += static_cast<double>(net_->backward(params, data.labels[s], workspaces_[0], scratch));
      for (std::size_t j = 0; j < p; ++j) grad[j] += scratch[j];
    }
    const Real inv = Real(1) / static_cast<Real>(b);
    for (Real& g : grad) g *= inv;
    return loss / static_cast<double>(b);
  }

 private:
  void check(std::span<const Real> params, std::span<Real> grad, std::size_t b) const {
    if (b == 0) throw std::invalid_argument("batch gradient: empty batch");
    if (params.size() != net_->param_count() || grad.size() != net_->param_count()) {
      throw ShapeError("batch gradient: parameter/gradient size mismatch");
    }
  }

  void ensure(std::size_t b) {
    const std::size_t p = net_->param_count();
    if (buffers_.size() < b * p) buffers_.resize(b * p);
    while (workspaces_.size() < b) workspaces_.push_back(net_->make_workspace());
    if (losses_.size() < b) losses_.resize(b);
  }

  const Network<Real>* net_;
  std::vector<Real> buffers_;
  std::vector<Workspace<Real>> workspaces_;
  std::vector<double> losses_;
};

struct Predictions {
  std::size_t classes = 0;
  std::vector<double> probs;           // count x classes
  std::vector<std::size_t> predicted;  // argmax, first maximum on ties
  double mean_loss = 0.0;              // against the matrix labels

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(probs).subspan(i * classes, classes);
  }
};

namespace detail {

template <class Real>
void predict_one(const Network<Real>& net, std::span<const Real> params, const SampleMatrix<Real>& data,
                 std::size_t i, Workspace<Real>& ws, Predictions& out, std::vector<double>& losses) {
  const auto probs = net.forward(params, data.freq_row(i), data.power_row(i), ws);
  std::size_t best = 0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    out.probs[i * out.classes + c] = static_cast<double>(probs[c]);
    if (probs[c] > probs[best]) best = c;
  }
  out.predicted[i] = best;
  losses[i] = static_cast<double>(net.loss(ws, data.labels[i]));
}

}  // namespace detail

/// Forward pass over every sample (OpenMP over samples).
template <class Real>
Predictions predict(const Network<Real>& net, std::type_identity_t<std::span<const Real>> params,
                    const SampleMatrix<Real>& data) {
  Predictions out;
  out.classes = net.spec().classes;
  out.probs.resize(data.count * out.classes);
  out.predicted.resize(data.count);
  std::vector<double> losses(data.count);
  const auto n = static_cast<std::ptrdiff_t>(data.count);
#pragma omp parallel
  {
    auto ws = net.make_workspace();
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      detail::predict_one(net, params, data, static_cast<std::size_t>(i), ws, out, losses);
    }
  }
  double sum = 0.0;
  for (double l : losses) sum += l;
  out.mean_loss = data.count ? sum / static_cast<double>(data.count) : 0.0;
  return out;
}

/// Serial reference for predict.
template <class Real>
Predictions predict_serial(const Network<Real>& net, std::type_identity_t<std::span<const Real>> params,
                           const SampleMatrix<Real>& data) {
  Predictions out;
  out.classes = net.spec().classes;
  out.probs.resize(data.count * out.classes);
  out.predicted.resize(data.count);
  std::vector<double> losses(data.count);
  auto ws = net.make_workspace();
  for (std::size_t i = 0; i < data.count; ++i) detail::predict_one(net, params, data, i, ws, out, losses);
  double sum = 0.0;
  for (double l : losses) sum += l;
  out.mean_loss = data.count ? sum / static_cast<double>(data.count) : 0.0;
  return out;
}

}  // namespace har::nn
