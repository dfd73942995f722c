// Copyright 2026 The agrp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AGRP_TENSOR_HPP_
#define AGRP_TENSOR_HPP_

#include <cstddef>
#include <vector>

#include "agrp/errors.hpp"

namespace agrp {

std::size_t shape_product(const std::vector<int>& shape);

// Dense row-major tensor of 64-bit reals. Shape is fixed at construction;
// values are freely mutable. data().size() == product(shape) always holds.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  Tensor(std::vector<int> shape, std::vector<double> values);

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int> shape, double value);

  int rank() const { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const { return shape_; }
  int dim(int axis) const;
  std::size_t size() const { return data_.size(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  // Checked multi-index access.
  double& at(int i);
  double at(int i) const;
  double& at(int i, int j);
  double at(int i, int j) const;
  double& at(int i, int j, int k);
  double at(int i, int j, int k) const;
  double& at(int i, int j, int k, int l);
  double at(int i, int j, int k, int l) const;

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;

 private:
  std::size_t offset(int i) const;
  std::size_t offset(int i, int j) const;
  std::size_t offset(int i, int j, int k) const;
  std::size_t offset(int i, int j, int k, int l) const;

  std::vector<int> shape_;
  std::vector<double> data_;
};

}  // namespace agrp

#endif  // AGRP_TENSOR_HPP_
