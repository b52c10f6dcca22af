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

#include "xmhash/encoder.h"

#include <string>

#include "xmhash/errors.h"

namespace xmh {

Matrix FitRidgeEncoder(const RowMatrix& phix, const Matrix& codes,
                       double lambda_h) {
  if (!(lambda_h > 0.0)) throw ValidationError("ridge encoder: lambda_h must be > 0");
  if (phix.rows() < 1) throw ValidationError("ridge encoder: no training instances");
  if (codes.rows() != phix.rows()) {
    throw ValidationError("ridge encoder: " + std::to_string(phix.rows()) +
                          " feature rows but " + std::to_string(codes.rows()) +
                          " code rows");
  }
  const Eigen::Index k = phix.cols();
  Matrix gram = Matrix::Zero(k, k);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(phix.transpose());
  gram.diagonal().array() += lambda_h;
  const Eigen::LLT<Matrix, Eigen::Lower> llt(gram);
  if (llt.info() != Eigen::Success) {
    const Vector ev =
        Eigen::SelfAdjointEigenSolver<Matrix>(
            Matrix(gram.selfadjointView<Eigen::Lower>()), Eigen::EigenvaluesOnly)
            .eigenvalues();
    throw NumericalError("ridge encoder: normal equations not positive definite, "
                         "condition estimate " +
                         std::to_string(ev.maxCoeff() / ev.minCoeff()));
  }
  Matrix p = llt.solve(phix.transpose() * codes);
  if (!p.allFinite()) throw NumericalError("ridge encoder: non-finite solution");
  return p;
}

Matrix ProjectFeatures(const FeatureMatrix& x_raw, const HashEncoder& enc,
                       int modality) {
  if (modality < 0 || modality >= enc.modalities() ||
      static_cast<std::size_t>(modality) >= enc.kernels.size()) {
    throw ValidationError("encode: modality " + std::to_string(modality + 1) +
                          " not in model (has " + std::to_string(enc.modalities()) + ")");
  }
  const auto t = static_cast<std::size_t>(modality);
  const KernelMap& km = enc.kernels[t];
  if (x_raw.cols() != km.input_dim()) {
    throw ValidationError("encode: modality " + std::to_string(modality + 1) +
                          " expects " + std::to_string(km.input_dim()) +
                          "-dimensional features, got " + std::to_string(x_raw.cols()));
  }
  const FeatureMatrix phi = Kernelize(x_raw, km);
  return phi.values * enc.p_h[t];
}

CodeSet Encode(const FeatureMatrix& x_raw, const HashEncoder& enc, int modality) {
  return CodeSet::FromSigns(ProjectFeatures(x_raw, enc, modality).transpose());
}

}  // namespace xmh
