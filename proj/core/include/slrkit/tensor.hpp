#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace slrkit::nn {

/// Dense row-major 64-bit float tensor.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<size_t> shape);
  Tensor(std::vector<size_t> shape, std::vector<double> values);

  static Tensor zeros(std::vector<size_t> shape) { return Tensor(std::move(shape)); }
  static Tensor row(std::vector<double> values);  // [1, n]
  static Tensor vec(std::vector<double> values);  // [n]

  const std::vector<size_t>& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t size() const { return data_.size(); }
  size_t dim(size_t i) const { return shape_[i]; }
  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  std::string shape_string() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }
  double& at(size_t r, size_t c) { return data_[r * shape_[1] + c]; }
  double at(size_t r, size_t c) const { return data_[r * shape_[1] + c]; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  /// Rows of a 2D tensor as spans.
  std::span<double> row_span(size_t r) { return {data_.data() + r * shape_[1], shape_[1]}; }
  std::span<const double> row_span(size_t r) const {
    return {data_.data() + r * shape_[1], shape_[1]};
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  std::vector<size_t> shape_;
  std::vector<double> data_;
};

/// A learnable tensor with its gradient accumulator and trainability flag.
/// Names are stable and hierarchical ("pose_embed.block1.linear.weight");
/// they are the checkpoint/transfer contract.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;
  bool trainable = true;

  Param() = default;
  Param(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(Tensor::zeros(value.shape())) {}

  void zero_grad() { grad.fill(0.0); }
};

}  // namespace slrkit::nn
