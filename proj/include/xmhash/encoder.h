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

#ifndef XMHASH_ENCODER_H_
#define XMHASH_ENCODER_H_

#include <vector>

#include "xmhash/kernelfeat.h"
#include "xmhash/retrieval.h"
#include "xmhash/types.h"

namespace xmh {

// Out-of-sample hash functions: one kernel map and one linear projection
// per modality, b = sign(phi(x) P_h).
struct HashEncoder {
  std::vector<Matrix> p_h;  // k_t x r
  double lambda_h = 1.0;
  std::vector<KernelMap> kernels;

  int bits() const { return p_h.empty() ? 0 : static_cast<int>(p_h[0].cols()); }
  int modalities() const { return static_cast<int>(p_h.size()); }
};

inline constexpr double kDefaultLambdaH = 1.0;

// Ridge regression (X^T X + lambda_h I)^-1 X^T B with X the n x k features
// and B the n x r codes.
Matrix FitRidgeEncoder(const RowMatrix& phix, const Matrix& codes,
                       double lambda_h);

// Real-valued projections phi(x) P_h, n x r. modality is zero-based.
Matrix ProjectFeatures(const FeatureMatrix& x_raw, const HashEncoder& enc,
                       int modality);

CodeSet Encode(const FeatureMatrix& x_raw, const HashEncoder& enc,
               int modality);

}  // namespace xmh

#endif  // XMHASH_ENCODER_H_
