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

#include "agrp/tensor.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace agrp {

std::size_t shape_product(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) {
      throw DimensionError("tensor shape has non-positive dimension " + std::to_string(d));
    }
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

Tensor::Tensor(std::vector<int> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> values)
    : shape_(std::move(shape)), data_(std::move(values)) {
  if (data_.size() != shape_product(shape_)) {
    throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                         " does not match shape product " +
                         std::to_string(shape_product(shape_)));
  }
}

Tensor Tensor::full(std::vector<int> shape, double value) {
  Tensor t(std::move(shape));
  for (double& x : t.data_) x = value;
  return t;
}

int Tensor::dim(int axis) const {
  if (axis < 0 || axis >= rank()) {
    throw DimensionError("axis " + std::to_string(axis) + " out of range for rank " +
                         std::to_string(rank()));
  }
  return shape_[static_cast<std::size_t>(axis)];
}

namespace {
[[noreturn]] void bad_index(int got_rank, int want_rank) {
  throw DimensionError("indexing rank-" + std::to_string(got_rank) + " tensor with " +
                       std::to_string(want_rank) + " indices");
}
void check_axis(int i, int d) {
  if (i < 0 || i >= d) {
    throw DimensionError("index " + std::to_string(i) + " out of range [0," +
                         std::to_string(d) + ")");
  }
}
}  // namespace

std::size_t Tensor::offset(int i) const {
  if (rank() != 1) bad_index(rank(), 1);
  check_axis(i, shape_[0]);
  return static_cast<std::size_t>(i);
}

std::size_t Tensor::offset(int i, int j) const {
  if (rank() != 2) bad_index(rank(), 2);
  check_axis(i, shape_[0]);
  check_axis(j, shape_[1]);
  return static_cast<std::size_t>(i) * shape_[1] + j;
}

std::size_t Tensor::offset(int i, int j, int k) const {
  if (rank() != 3) bad_index(rank(), 3);
  check_axis(i, shape_[0]);
  check_axis(j, shape_[1]);
  check_axis(k, shape_[2]);
  return (static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k;
}

std::size_t Tensor::offset(int i, int j, int k, int l) const {
  if (rank() != 4) bad_index(rank(), 4);
  check_axis(i, shape_[0]);
  check_axis(j, shape_[1]);
  check_axis(k, shape_[2]);
  check_axis(l, shape_[3]);
  return ((static_cast<std::size_t>(i) * shape_[1] + j) * shape_[2] + k) * shape_[3] + l;
}

double& Tensor::at(int i) { return data_[offset(i)]; }
double Tensor::at(int i) const { return data_[offset(i)]; }
double& Tensor::at(int i, int j) { return data_[offset(i, j)]; }
double Tensor::at(int i, int j) const { return data_[offset(i, j)]; }
double& Tensor::at(int i, int j, int k) { return data_[offset(i, j, k)]; }
double Tensor::at(int i, int j, int k) const { return data_[offset(i, j, k)]; }
double& Tensor::at(int i, int j, int k, int l) { return data_[offset(i, j, k, l)]; }
double Tensor::at(int i, int j, int k, int l) const { return data_[offset(i, j, k, l)]; }

bool Tensor::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace agrp
