#include "slrkit/tensor.hpp"

#include <numeric>
#include <sstream>

#include "slrkit/errors.hpp"

namespace slrkit::nn {

namespace {
size_t shape_product(const std::vector<size_t>& shape) {
  size_t n = 1;
  for (size_t e : shape) n *= e;
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<size_t> shape) : shape_(std::move(shape)) {
  data_.assign(shape_product(shape_), 0.0);
}

Tensor::Tensor(std::vector<size_t> shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (shape_product(shape_) != data_.size()) {
    throw ContractError("tensor shape does not match value count");
  }
}

Tensor Tensor::row(std::vector<double> values) {
  const size_t n = values.size();
  return Tensor({1, n}, std::move(values));
}

Tensor Tensor::vec(std::vector<double> values) {
  const size_t n = values.size();
  return Tensor({n}, std::move(values));
}

std::string Tensor::shape_string() const {
  std::ostringstream os;
  os << '(';
  for (size_t i = 0; i < shape_.size(); ++i) {
    if (i) os << 'x';
    os << shape_[i];
  }
  os << ')';
  return os.str();
}

}  // namespace slrkit::nn
