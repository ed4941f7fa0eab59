#pragma once

#include "har/error.hpp"

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace har::nn {

/// Dense row-major tensor. The network runs on float; gradient checks
/// instantiate it with double.
template <class Real>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<Real> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape_)
      : shape(std::move(shape_)), data(element_count(shape), Real(0)) {}
  Tensor(std::vector<std::size_t> shape_, std::vector<Real> data_)
      : shape(std::move(shape_)), data(std::move(data_)) {
    if (data.size() != element_count(shape)) {
      throw ShapeError("tensor: data length " + std::to_string(data.size()) +
                       " does not match shape product " + std::to_string(element_count(shape)));
    }
  }

  static std::size_t element_count(const std::vector<std::size_t>& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
  }

  std::size_t rank() const { return shape.size(); }
  std::size_t size() const { return data.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }

  Real& operator()(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  const Real& operator()(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

  bool all_finite() const {
    for (const Real& v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool operator==(const Tensor&) const = default;
};

template <class Real>
void require_rank(const Tensor<Real>& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got " +
                     std::to_string(t.rank()));
  }
}

}  // namespace har::nn
