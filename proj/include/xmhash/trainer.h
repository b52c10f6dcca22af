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

#ifndef XMHASH_TRAINER_H_
#define XMHASH_TRAINER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "xmhash/labelspace.h"
#include "xmhash/types.h"

namespace xmh {

// Alternating minimization of
//
//   F = |(R V)^T (M L) - r G^T G|^2
//       + omega |B - M L|^2
//       + sum_t lambda_t |Phi_t - P_t V|^2
//
//   s.t. R^T R = I, V V^T = n I, V 1 = 0, B in {-1,+1}^{r x n}
//
// with V (r x n) the shared latent factor, R (r x r) a rotation, M (r x c)
// the label projection, B (r x n) the codes and P_t (k_t x r) one
// reconstruction basis per modality. Phi_t is the k_t x n kernel feature
// matrix; callers pass it as an n x k_t FeatureMatrix and every routine
// below works on its transpose without copying.
//
// Nothing here forms an n x n matrix: G^T G only enters through the c x c
// and r x c contractions L G^T, G G^T, U G^T.

struct TrainConfig {
  int r = 32;
  double omega = 0.5;
  std::vector<double> lambda = {0.5, 0.5};  // one per modality
  int max_iters = 30;
  double rel_tol = 1e-5;
  std::uint64_t seed = 0;
};

void ValidateTrainConfig(const TrainConfig& cfg, std::size_t modalities);

struct ModelState {
  Matrix v;    // r x n
  Matrix rot;  // r x r
  Matrix m;    // r x c
  Matrix b;    // r x n, entries exactly -1 or +1
  std::vector<Matrix> p;  // k_t x r
};

struct TrainReport {
  std::vector<double> objective_history;  // one entry per full sweep
  int iterations_run = 0;
  bool converged = false;
  double wall_time_seconds = 0.0;
};

struct TrainResult {
  ModelState state;
  TrainReport report;
};

struct ObjectiveTerms {
  double asymmetric = 0.0;      // |(RV)^T ML - r G^T G|^2
  double quantization = 0.0;    // omega |B - ML|^2
  double reconstruction = 0.0;  // sum_t lambda_t |Phi_t - P_t V|^2

  double total() const { return asymmetric + quantization + reconstruction; }
};

// sqrt(n) times a row-orthonormal basis of a column-centered Gaussian r x n
// matrix: satisfies V V^T = n I and V 1 = 0. Requires r <= n - 1.
Matrix RandomFeasibleLatent(Eigen::Index r, Eigen::Index n,
                            std::uint64_t seed);

// Random rotation (orthonormalized Gaussian), det sign unconstrained.
Matrix RandomRotation(Eigen::Index r, std::uint64_t seed);

ModelState InitState(std::span<const FeatureMatrix> phix,
                     const LabelSet& labels, const TrainConfig& cfg);

// P_t = Phi_t V^T / n, exact when V V^T = n I.
Matrix UpdateProjection(const FeatureMatrix& phix, const Matrix& v);

// Normal equations of the M-subproblem under U U^T = n I:
//   M ((n + omega) L L^T + eps I) = r (U G^T)(G L^T) + omega B L^T,
// U = R V, eps = 1e-6 trace(L L^T) / c.
Matrix UpdateLabelProjection(const Matrix& v, const Matrix& rot,
                             const Matrix& b, const LabelSet& labels,
                             const TrainConfig& cfg);

// C = r M (L G^T)(G V^T); the R-step maximizes trace(R^T C).
Matrix RotationTarget(const Matrix& m, const LabelSet& labels,
                      const Matrix& v, int r);
// argmax over orthogonal R of trace(R^T C): R = U_c W_c^T from C's SVD.
Matrix ProcrustesRotation(const Matrix& c);
Matrix UpdateRotation(const Matrix& m, const LabelSet& labels,
                      const Matrix& v);

// Z = r R^T M (L G^T) G + sum_t lambda_t P_t^T Phi_t, r x n.
Matrix LatentTarget(const Matrix& rot, const Matrix& m,
                    const LabelSet& labels,
                    std::span<const FeatureMatrix> phix,
                    std::span<const Matrix> p, const TrainConfig& cfg);

// argmax <V, Z> over V V^T = n I, V 1 = 0. Directions of Z's centered row
// space with eigenvalue <= 1e-10 of the largest are completed by seeded
// Gaussian vectors, Gram-Schmidt'd against the rest and 1/sqrt(n).
Matrix MaximizeLatentAlignment(const Matrix& z, std::uint64_t seed);

Matrix UpdateLatent(const Matrix& rot, const Matrix& m, const LabelSet& labels,
                    std::span<const FeatureMatrix> phix,
                    std::span<const Matrix> p, const TrainConfig& cfg,
                    std::uint64_t completion_seed);

// sign(M L) with sign(0) = +1.
Matrix UpdateCodes(const Matrix& m, const LabelSet& labels);

ObjectiveTerms ObjectiveBreakdown(const ModelState& state,
                                  const LabelSet& labels,
                                  std::span<const FeatureMatrix> phix,
                                  const TrainConfig& cfg);
double ObjectiveValue(const ModelState& state, const LabelSet& labels,
                      std::span<const FeatureMatrix> phix,
                      const TrainConfig& cfg);

// Sweeps P, M, R, V, B until the relative decrease of the objective falls
// below cfg.rel_tol or cfg.max_iters sweeps have run. Sub-step failures are
// rethrown as NumericalError carrying the sweep index.
TrainResult Train(std::span<const FeatureMatrix> phix, const LabelSet& labels,
                  const TrainConfig& cfg);

}  // namespace xmh

#endif  // XMHASH_TRAINER_H_
