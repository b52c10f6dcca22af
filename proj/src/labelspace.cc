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

#include "xmhash/labelspace.h"

#include <string>

#include "xmhash/errors.h"

namespace xmh {

LabelSet NormalizeLabels(const RawLabelMatrix& labels) {
  LabelSet out;
  out.l = labels.values;
  out.g = labels.values;
  for (Eigen::Index i = 0; i < out.g.cols(); ++i) {
    out.g.col(i) /= out.g.col(i).norm();
  }
  return out;
}

Matrix SemanticAffinityBlock(const LabelSet& labels, IndexRange rows,
                             IndexRange cols) {
  const Eigen::Index n = labels.instances();
  for (const IndexRange& r : {rows, cols}) {
    if (r.begin < 0 || r.end > n || r.begin > r.end) {
      throw ValidationError("semantic_affinity_block: range [" +
                            std::to_string(r.begin) + "," + std::to_string(r.end) +
                            ") outside 0.." + std::to_string(n));
    }
  }
  return labels.g.middleCols(rows.begin, rows.size()).transpose() *
         labels.g.middleCols(cols.begin, cols.size());
}

}  // namespace xmh
