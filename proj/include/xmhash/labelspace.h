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

#ifndef XMHASH_LABELSPACE_H_
#define XMHASH_LABELSPACE_H_

#include "xmhash/types.h"

namespace xmh {

// Labels L (c x n) and their column-normalized companion G, g_i = l_i/|l_i|.
struct LabelSet {
  Matrix l;
  Matrix g;

  Eigen::Index classes() const { return l.rows(); }
  Eigen::Index instances() const { return l.cols(); }
};

LabelSet NormalizeLabels(const RawLabelMatrix& labels);

struct IndexRange {
  Eigen::Index begin = 0;
  Eigen::Index end = 0;  // exclusive

  Eigen::Index size() const { return end - begin; }
};

// (G^T G) restricted to rows x cols. Test oracle only: the trainer works on
// c x c contractions and never forms instance-by-instance blocks.
Matrix SemanticAffinityBlock(const LabelSet& labels, IndexRange rows,
                             IndexRange cols);

}  // namespace xmh

#endif  // XMHASH_LABELSPACE_H_
