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

#ifndef XMHASH_KERNELFEAT_H_
#define XMHASH_KERNELFEAT_H_

#include <cstdint>

#include "xmhash/types.h"

namespace xmh {

// RBF feature map phi(x)_j = exp(-|x - a_j|^2 / (2 sigma^2)) - center_j.
// The center is the column mean over the training set, frozen at fit time
// and reused for every out-of-sample pass.
struct KernelMap {
  RowMatrix anchors;  // k x d
  double sigma = 0.0;
  Vector center;      // k

  Eigen::Index k() const { return anchors.rows(); }
  Eigen::Index input_dim() const { return anchors.cols(); }
};

inline constexpr Eigen::Index kDefaultWidthSampleCap = 2000;

// k distinct rows drawn uniformly without replacement, copied verbatim.
RowMatrix SelectAnchors(const FeatureMatrix& x, Eigen::Index k,
                        std::uint64_t seed);

// Mean Euclidean distance from min(n, sample_cap) sampled rows to every
// anchor. All rows are used when n <= sample_cap.
double EstimateWidth(const FeatureMatrix& x, const RowMatrix& anchors,
                     Eigen::Index sample_cap, std::uint64_t seed);

// Uncentered kernel values, n x k, each in (0, 1].
RowMatrix RbfKernel(const RowMatrix& x, const RowMatrix& anchors,
                    double sigma);

struct KernelFit {
  KernelMap map;
  FeatureMatrix features;  // n x k, centered
};

// Anchors, width and center from the training set, plus its features.
KernelFit FitKernelMap(const FeatureMatrix& x, Eigen::Index k,
                       Eigen::Index sample_cap, std::uint64_t seed);

// Training pass: computes and stores km->center from x.
FeatureMatrix KernelizeTraining(const FeatureMatrix& x, KernelMap* km);
// Query pass: reuses the stored center.
FeatureMatrix Kernelize(const FeatureMatrix& x, const KernelMap& km);

void ValidateKernelMap(const KernelMap& km);

}  // namespace xmh

#endif  // XMHASH_KERNELFEAT_H_
