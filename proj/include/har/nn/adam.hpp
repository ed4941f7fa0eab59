#pragma once

#include "har/error.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace har::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
      throw std::invalid_argument("adam: learning_rate must be positive");
    }
    if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
      throw std::invalid_argument("adam: beta1 and beta2 must lie in (0, 1)");
    }
    if (!(epsilon > 0.0)) throw std::invalid_argument("adam: epsilon must be positive");
  }

  bool operator==(const AdamConfig&) const = default;
};

/// Bias-corrected Adam. Step t (1-based) applies
///   m = b1 m + (1 - b1) g,  v = b2 v + (1 - b2) g^2
///   p -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
/// elementwise. The per-step scalars are formed in double; each element is
/// updated independently, so the parallel and serial paths agree bitwise.
template <class Real>
class Adam {
 public:
  Adam(std::size_t size, const AdamConfig& cfg) : cfg_(cfg), m_(size, Real(0)), v_(size, Real(0)) { cfg.validate(); }

  std::size_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

  void step(std::span<Real> params, std::span<const Real> grad) {
    const Coeffs c = begin(params, grad);
    const auto n = static_cast<std::ptrdiff_t>(params.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) update(static_cast<std::size_t>(i), c, params, grad);
  }

  void step_serial(std::span<Real> params, std::span<const Real> grad) {
    const Coeffs c = begin(params, grad);
    for (std::size_t i = 0; i < params.size(); ++i) update(i, c, params, grad);
  }

 private:
  struct Coeffs {
    Real b1, one_minus_b1, b2, one_minus_b2, lr_corr, v_corr, eps;
  };

  Coeffs begin(std::span<Real> params, std::span<const Real> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
      throw ShapeError("adam: parameter/gradient size does not match optimizer state");
    }
    ++t_;
    const double t = static_cast<double>(t_);
    return Coeffs{static_cast<Real>(cfg_.beta1),
                  static_cast<Real>(1.0 - cfg_.beta1),
                  static_cast<Real>(cfg_.beta2),
                  static_cast<Real>(1.0 - cfg_.beta2),
                  static_cast<Real>(cfg_.learning_rate / (1.0 - std::pow(cfg_.beta1, t))),
                  static_cast<Real>(1.0 / (1.0 - std::pow(cfg_.beta2, t))),
                  static_cast<Real>(cfg_.epsilon)};
  }

  void update(std::size_t i, const Coeffs& c, std::span<Real> params, std::span<const Real> grad) {
    const Real g = grad[i];
    m_[i] = c.b1 * m_[i] + c.one_minus_b1 * g;
    v_[i] = c.b2 * v_[i] + c.one_minus_b2 * g * g;
    params[i] -= c.lr_corr * m_[i] / (std::sqrt(v_[i] * c.v_corr) + c.eps);
  }

  AdamConfig cfg_;
  std::vector<Real> m_;
  std::vector<Real> v_;
  std::size_t t_ = 0;
};

}  // namespace har::nn
