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

#include "xmhash/kernelfeat.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "xmhash/errors.h"
#include "xmhash/random.h"

namespace xmh {
namespace {

// First k entries of a seeded Fisher-Yates shuffle of 0..n-1.
std::vector<Eigen::Index> SampleWithoutReplacement(Eigen::Index n,
                                                   Eigen::Index k,
                                                   std::uint64_t seed) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index i = 0; i < k; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace

RowMatrix SelectAnchors(const FeatureMatrix& x, Eigen::Index k,
                        std::uint64_t seed) {
  if (k < 1 || k > x.rows()) {
    throw ValidationError("select_anchors: need 1 <= k <= n, got k=" +
                          std::to_string(k) + " n=" + std::to_string(x.rows()));
  }
  const auto idx =
      SampleWithoutReplacement(x.rows(), k, DeriveSeed(seed, SeedStream::kAnchors));
  RowMatrix anchors(k, x.cols());
  for (Eigen::Index j = 0; j < k; ++j) {
    anchors.row(j) = x.values.row(idx[static_cast<std::size_t>(j)]);
  }
  return anchors;
}

double EstimateWidth(const FeatureMatrix& x, const RowMatrix& anchors,
                     Eigen::Index sample_cap, std::uint64_t seed) {
  if (anchors.rows() < 1) throw ValidationError("estimate_width: no anchors");
  if (anchors.cols() != x.cols()) {
    throw ValidationError("estimate_width: anchors have dimension " +
                          std::to_string(anchors.cols()) + ", data has " +
                          std::to_string(x.cols()));
  }
  if (sample_cap < 1) throw ValidationError("estimate_width: sample_cap < 1");
  const Eigen::Index n = x.rows();
  std::vector<Eigen::Index> rows;
  if (n <= sample_cap) {
    rows.resize(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  } else {
    rows = SampleWithoutReplacement(
        n, sample_cap, DeriveSeed(seed, SeedStream::kWidthSample));
  }
  double sum = 0.0;
  for (const Eigen::Index i : rows) {
    for (Eigen::Index j = 0; j < anchors.rows(); ++j) {
      sum += (x.values.row(i) - anchors.row(j)).norm();
    }
  }
  const double sigma =
      sum / (static_cast<double>(rows.size()) * static_cast<double>(anchors.rows()));
  if (!(sigma > 0.0)) {
    throw DegenerateDataError(
        "estimate_width: every sampled point coincides with every anchor");
  }
  return sigma;
}

RowMatrix RbfKernel(const RowMatrix& x, const RowMatrix& anchors, double sigma) {
  if (x.cols() != anchors.cols()) {
    throw ValidationError("kernelize: features have dimension " +
                          std::to_string(x.cols()) + ", kernel map expects " +
                          std::to_string(anchors.cols()));
  }
  const double scale = -1.0 / (2.0 * sigma * sigma);
  RowMatrix out(x.rows(), anchors.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < anchors.rows(); ++j) {
      out(i, j) = std::exp(scale * (x.row(i) - anchors.row(j)).squaredNorm());
    }
  }
  return out;
}

void ValidateKernelMap(const KernelMap& km) {
  if (km.k() < 1) throw ValidationError("kernel map has no anchors");
  if (!(km.sigma > 0.0) || !std::isfinite(km.sigma)) {
    throw ValidationError("kernel width must be positive and finite");
  }
  if (!km.anchors.allFinite()) throw ValidationError("kernel anchors not finite");
  if (km.center.size() != km.k()) {
    throw ValidationError("kernel center has length " +
                          std::to_string(km.center.size()) + ", expected " +
                          std::to_string(km.k()));
  }
}

FeatureMatrix KernelizeTraining(const FeatureMatrix& x, KernelMap* km) {
  FeatureMatrix out;
  out.modality_id = x.modality_id;
  out.values = RbfKernel(x.values, km->anchors, km->sigma);
  km->center = out.values.colwise().mean().transpose();
  out.values.rowwise() -= km->center.transpose();
  return out;
}

FeatureMatrix Kernelize(const FeatureMatrix& x, const KernelMap& km) {
  ValidateKernelMap(km);
  FeatureMatrix out;
  out.modality_id = x.modality_id;
  out.values = RbfKernel(x.values, km.anchors, km.sigma);
  out.values.rowwise() -= km.center.transpose();
  return out;
}

KernelFit FitKernelMap(const FeatureMatrix& x, Eigen::Index k,
                       Eigen::Index sample_cap, std::uint64_t seed) {
  KernelFit fit;
  fit.map.anchors = SelectAnchors(x, k, seed);
  fit.map.sigma = EstimateWidth(x, fit.map.anchors, sample_cap, seed);
  fit.features = KernelizeTraining(x, &fit.map);
  return fit;
}

}  // namespace xmh
