#pragma once

#include "har/nn/layers.hpp"
#include "har/nn/model_spec.hpp"
#include "har/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace har::nn {

/// Activations of one channel stack for one sample, kept for backprop, plus
/// gradient scratch of matching shapes. All maps are time-major.
template <class Real>
struct ChannelState {
  std::vector<Real> input;                          // [in_len][streams]
  std::vector<std::vector<Real>> conv;              // [out_len][filters]
  std::vector<std::vector<Real>> pooled;            // [pooled_len][filters]
  std::vector<std::vector<std::uint32_t>> argmax;   // [pooled_len][filters]
  std::vector<Real> dense;                          // [units]

  std::vector<std::vector<Real>> dconv;
  std::vector<std::vector<Real>> dpooled;
  std::vector<Real> ddense;
};

template <class Real>
struct Workspace {
  ChannelState<Real> freq;
  ChannelState<Real> power;
  std::vector<Real> fused;   // concat(freq dense, power dense)
  std::vector<Real> logits;
  std::vector<Real> probs;
  std::vector<Real> dlogits;
  std::vector<Real> dfused;
};

/// Two-channel 1-D CNN over a flat parameter vector laid out by make_layout.
/// Stateless apart from the layout, so one instance serves any number of
/// threads as long as each uses its own Workspace.
template <class Real>
class Network {
 public:
  explicit Network(const ModelSpec& spec) : layout_((spec.validate(), make_layout(spec))) {}

  const NetworkLayout& layout() const { return layout_; }
  const ModelSpec& spec() const { return layout_.spec; }
  std::size_t param_count() const { return layout_.param_count; }
  std::size_t freq_dim() const { return layout_.spec.streams * layout_.spec.freq_bins; }
  std::size_t power_dim() const { return layout_.spec.streams * layout_.spec.power_bins; }

  Workspace<Real> make_workspace() const {
    Workspace<Real> ws;
    size_channel(layout_.freq, ws.freq);
    size_channel(layout_.power, ws.power);
    ws.fused.resize(layout_.fusion_in);
    ws.dfused.resize(layout_.fusion_in);
    ws.logits.resize(layout_.spec.classes);
    ws.probs.resize(layout_.spec.classes);
    ws.dlogits.resize(layout_.spec.classes);
    return ws;
  }

  /// Forward pass on stream-major inputs (freq: streams x freq_bins,
  /// power: streams x power_bins). Leaves activations in `ws`; returns the
  /// softmax probabilities.
  std::span<const Real> forward(std::span<const Real> params, std::span<const Real> freq,
                                std::span<const Real> power, Workspace<Real>& ws) const {
    check_inputs(params, freq, power);
    const std::size_t units_f = layout_.freq.dense.units;
    forward_channel(layout_.freq, params, freq, ws.freq);
    forward_channel(layout_.power, params, power, ws.power);
    std::copy(ws.freq.dense.begin(), ws.freq.dense.end(), ws.fused.begin());
    std::copy(ws.power.dense.begin(), ws.power.dense.end(), ws.fused.begin() + static_cast<std::ptrdiff_t>(units_f));
    dense_forward<Real>(ws.fused, slice(params, layout_.fusion_weight, layout_.spec.classes * layout_.fusion_in),
                        slice(params, layout_.fusion_bias, layout_.spec.classes), Activation::identity,
                        ws.logits);
    Real top = ws.logits[0];
    for (Real v : ws.logits) top = std::max(top, v);
    Real sum = 0;
    for (std::size_t c = 0; c < ws.probs.size(); ++c) {
      ws.probs[c] = std::exp(ws.logits[c] - top);
      sum += ws.probs[c];
    }
    for (Real& p : ws.probs) p /= sum;
    return ws.probs;
  }

  /// Cross-entropy loss of the last forward pass against `label`.
  Real loss(const Workspace<Real>& ws, std::size_t label) const {
    Real top = ws.logits[0];
    for (Real v : ws.logits) top = std::max(top, v);
    Real sum = 0;
    for (Real v : ws.logits) sum += std::exp(v - top);
    return std::log(sum) - (ws.logits[label] - top);
  }

  /// Backpropagates the cross-entropy loss of the last forward pass and adds
  /// the parameter gradient into `grad`. Returns the loss.
  Real backward(std::span<const Real> params, std::size_t label, Workspace<Real>& ws,
                std::span<Real> grad) const {
    if (label >= layout_.spec.classes) throw ShapeError("backward: label out of range");
    if (grad.size() != layout_.param_count) throw ShapeError("backward: gradient size mismatch");
    const Real l = loss(ws, label);
    for (std::size_t c = 0; c < ws.probs.size(); ++c) ws.dlogits[c] = ws.probs[c];
    ws.dlogits[label] -= Real(1);

    dense_backward<Real>(ws.fused, slice(params, layout_.fusion_weight, layout_.spec.classes * layout_.fusion_in),
                         ws.logits, Activation::identity, ws.dlogits,
                         slice(grad, layout_.fusion_weight, layout_.spec.classes * layout_.fusion_in),
                         slice(grad, layout_.fusion_bias, layout_.spec.classes), ws.dfused);
    const std::size_t units_f = layout_.freq.dense.units;
    std::copy(ws.dfused.begin(), ws.dfused.begin() + static_cast<std::ptrdiff_t>(units_f), ws.freq.ddense.begin());
    std::copy(ws.dfused.begin() + static_cast<std::ptrdiff_t>(units_f), ws.dfused.end(), ws.power.ddense.begin());
    backward_channel(layout_.freq, params, ws.freq, grad);
    backward_channel(layout_.power, params, ws.power, grad);
    return l;
  }

 private:
  template <class T>
  static std::span<T> slice(std::span<T> v, std::size_t offset, std::size_t n) {
    return v.subspan(offset, n);
  }

  void check_inputs(std::span<const Real> params, std::span<const Real> freq, std::span<const Real> power) const {
    if (params.size() != layout_.param_count) {
      throw ShapeError("network: expected " + std::to_string(layout_.param_count) + " parameters, got " +
                       std::to_string(params.size()));
    }
    if (freq.size() != freq_dim() || power.size() != power_dim()) {
      throw ShapeError("network: input shape (" + std::to_string(freq.size()) + ", " +
                       std::to_string(power.size()) + ") does not match model (" +
                       std::to_string(freq_dim()) + ", " + std::to_string(power_dim()) + ")");
    }
  }

  static void size_channel(const ChannelLayout& cl, ChannelState<Real>& st) {
    st.input.resize(cl.in_len * cl.in_streams);
    for (const auto& c : cl.convs) {
      st.conv.emplace_back(c.out_len * c.spec.filters);
      st.dconv.emplace_back(c.out_len * c.spec.filters);
      st.pooled.emplace_back(c.pooled_len * c.spec.filters);
      st.dpooled.emplace_back(c.pooled_len * c.spec.filters);
      st.argmax.emplace_back(c.pooled_len * c.spec.filters);
    }
    st.dense.resize(cl.dense.units);
    st.ddense.resize(cl.dense.units);
  }

  std::span<const Real> flat_input(const ChannelLayout& cl, const ChannelState<Real>& st) const {
    return cl.convs.empty() ? std::span<const Real>(st.input) : std::span<const Real>(st.pooled.back());
  }

  void forward_channel(const ChannelLayout& cl, std::span<const Real> params, std::span<const Real> x,
                       ChannelState<Real>& st) const {
    // Stream-major input -> time-major.
    for (std::size_t r = 0; r < cl.in_streams; ++r) {
      for (std::size_t t = 0; t < cl.in_len; ++t) st.input[t * cl.in_streams + r] = x[r * cl.in_len + t];
    }
    std::span<const Real> cur = st.input;
    for (std::size_t i = 0; i < cl.convs.size(); ++i) {
      const ConvLayout& c = cl.convs[i];
      conv1d_forward_tm<Real>(cur, c.in_len, c.in_streams,
                              slice(params, c.weight, c.spec.filters * c.spec.kernel * c.in_streams),
                              slice(params, c.bias, c.spec.filters), c.spec, st.conv[i]);
      maxpool1d_forward_tm<Real>(st.conv[i], c.out_len, c.spec.filters, c.spec.pool, st.pooled[i],
                                 st.argmax[i]);
      cur = st.pooled[i];
    }
    dense_forward<Real>(cur, slice(params, cl.dense_weight, cl.dense.units * cl.flat_dim),
                        slice(params, cl.dense_bias, cl.dense.units), cl.dense.activation, st.dense);
  }

  void backward_channel(const ChannelLayout& cl, std::span<const Real> params, ChannelState<Real>& st,
                        std::span<Real> grad) const {
    const bool has_convs = !cl.convs.empty();
    dense_backward<Real>(flat_input(cl, st), slice(params, cl.dense_weight, cl.dense.units * cl.flat_dim),
                         st.dense, cl.dense.activation, st.ddense,
                         slice(grad, cl.dense_weight, cl.dense.units * cl.flat_dim),
                         slice(grad, cl.dense_bias, cl.dense.units),
                         has_convs ? std::span<Real>(st.dpooled.back()) : std::span<Real>());
    for (std::size_t i = cl.convs.size(); i-- > 0;) {
      const ConvLayout& c = cl.convs[i];
      maxpool1d_backward_tm<Real>(st.dpooled[i], st.argmax[i], c.pooled_len, c.spec.filters, st.dconv[i]);
      const std::span<const Real> in = i == 0 ? std::span<const Real>(st.input) : std::span<const Real>(st.pooled[i - 1]);
      conv1d_backward_tm<Real>(in, c.in_len, c.in_streams,
                               slice(params, c.weight, c.spec.filters * c.spec.kernel * c.in_streams),
                               st.conv[i], c.spec, st.dconv[i],
                               slice(grad, c.weight, c.spec.filters * c.spec.kernel * c.in_streams),
                               slice(grad, c.bias, c.spec.filters),
                               i == 0 ? std::span<Real>() : std::span<Real>(st.dpooled[i - 1]));
    }
  }

  NetworkLayout layout_;
};

/// Seeded initialization. Weights feeding a relu are drawn uniformly from
/// +-sqrt(6 / fan_in) (He); all other weights, including the output layer,
/// from +-sqrt(6 / (fan_in + fan_out)) (Glorot). Biases start at zero. Draws
/// are taken in slot order from Rng(seed) and computed in double, so float and
/// double models built from one seed agree up to rounding.
template <class Real>
std::vector<Real> init_params(const NetworkLayout& layout, std::uint64_t seed) {
  std::vector<Real> p(layout.param_count, Real(0));
  Rng rng(seed);
  for (const auto& slot : layout.slots) {
    if (slot.is_bias) continue;
    const double limit = slot.activation == Activation::relu
                             ? std::sqrt(6.0 / static_cast<double>(slot.fan_in))
                             : std::sqrt(6.0 / static_cast<double>(slot.fan_in + slot.fan_out));
    for (std::size_t i = 0; i < slot.size; ++i) p[slot.offset + i] = static_cast<Real>(rng.uniform(-limit, limit));
  }
  return p;
}

extern template class Network<float>;
extern template class Network<double>;

}  // namespace har::nn
