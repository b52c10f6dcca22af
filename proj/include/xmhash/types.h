// Copyright 2026 The xmhash Authors.
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

#ifndef XMHASH_TYPES_H_
#define XMHASH_TYPES_H_

#include <cstdint>

#include <Eigen/Dense>

namespace xmh {

// Instances are rows. Row-major so that a row is contiguous and the memory
// image matches the on-disk AMX1 layout.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Dtype : std::uint8_t { kF32 = 0, kF64 = 1 };

// Per-instance feature vectors of one modality (raw or kernelized).
struct FeatureMatrix {
  RowMatrix values;  // n x d
  int modality_id = 0;
  Dtype dtype = Dtype::kF64;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

// Binary label matrix, classes x instances, entries exactly 0 or 1.
struct RawLabelMatrix {
  Matrix values;  // c x n

  Eigen::Index classes() const { return values.rows(); }
  Eigen::Index instances() const { return values.cols(); }
};

}  // namespace xmh

#endif  // XMHASH_TYPES_H_
