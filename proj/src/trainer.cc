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

#include "xmhash/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "xmhash/errors.h"
#include "xmhash/random.h"

namespace xmh {
namespace {

constexpr double kRankThreshold = 1e-10;
constexpr Eigen::Index kResidualBlock = 256;

// Phi_t as the k x n view of the n x k feature rows.
auto KernelColumns(const FeatureMatrix& phix) { return phix.values.transpose(); }

void CheckFinite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw NumericalError(std::string(what) + " produced non-finite values");
  }
}

// Modified Gram-Schmidt of column j of `basis` against `ones` (unit norm)
// and columns [0, j). Returns false when the column collapses.
bool OrthonormalizeColumn(Matrix* basis, Eigen::Index j, const Vector& ones) {
  auto col = basis->col(j);
  const double before = col.norm();
  for (int pass = 0; pass < 2; ++pass) {
    col -= ones * ones.dot(col);
    for (Eigen::Index i = 0; i < j; ++i) {
      col -= basis->col(i) * basis->col(i).dot(col);
    }
  }
  const double after = col.norm();
  if (!(after > 1e-8 * before) || after == 0.0) return false;
  col /= after;
  return true;
}

}  // namespace

void ValidateTrainConfig(const TrainConfig& cfg, std::size_t modalities) {
  if (cfg.r < 1) throw ValidationError("train: code length r must be >= 1");
  if (cfg.max_iters < 1) throw ValidationError("train: max_iters must be >= 1");
  if (!(cfg.rel_tol > 0.0)) throw ValidationError("train: rel_tol must be > 0");
  if (!(cfg.omega >= 0.0) || !std::isfinite(cfg.omega)) {
    throw ValidationError("train: omega must be finite and >= 0");
  }
  if (cfg.lambda.size() != modalities) {
    throw ValidationError("train: expected " + std::to_string(modalities) +
                          " lambda values, got " + std::to_string(cfg.lambda.size()));
  }
  for (const double l : cfg.lambda) {
    if (!(l >= 0.0) || !std::isfinite(l)) {
      throw ValidationError("train: lambda must be finite and >= 0");
    }
  }
}

Matrix RandomFeasibleLatent(Eigen::Index r, Eigen::Index n, std::uint64_t seed) {
  if (r < 1 || r > n - 1) {
    throw ValidationError("latent factor needs 1 <= r <= n - 1, got r=" +
                          std::to_string(r) + " n=" + std::to_string(n));
  }
  Rng rng(seed);
  Matrix a = GaussianMatrix(n, r, rng);
  a.rowwise() -= a.colwise().mean();
  const Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, r);
  return std::sqrt(static_cast<double>(n)) * q.transpose();
}

Matrix RandomRotation(Eigen::Index r, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::HouseholderQR<Matrix> qr(GaussianMatrix(r, r, rng));
  return qr.householderQ();
}

ModelState InitState(std::span<const FeatureMatrix> phix, const LabelSet& labels,
                     const TrainConfig& cfg) {
  ValidateTrainConfig(cfg, phix.size());
  const Eigen::Index n = labels.instances();
  const Eigen::Index r = cfg.r;
  if (r > n - 1) {
    throw ValidationError("train: code length r=" + std::to_string(r) +
                          " needs at least r + 1 = " + std::to_string(r + 1) +
                          " training instances, got " + std::to_string(n));
  }
  ModelState s;
  s.rot = RandomRotation(r, DeriveSeed(cfg.seed, SeedStream::kInit, 0));
  {
    Rng rng(DeriveSeed(cfg.seed, SeedStream::kInit, 1));
    s.m = GaussianMatrix(r, labels.classes(), rng);
  }
  {
    Rng rng(DeriveSeed(cfg.seed, SeedStream::kInit, 2));
    std::bernoulli_distribution coin(0.5);
    s.b.resize(r, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < r; ++i) s.b(i, j) = coin(rng) ? 1.0 : -1.0;
    }
  }
  s.v = RandomFeasibleLatent(r, n, DeriveSeed(cfg.seed, SeedStream::kInit, 3));
  for (const auto& x : phix) s.p.push_back(UpdateProjection(x, s.v));
  return s;
}

Matrix UpdateProjection(const FeatureMatrix& phix, const Matrix& v) {
  return (KernelColumns(phix) * v.transpose()) / static_cast<double>(v.cols());
}

Matrix UpdateLabelProjection(const Matrix& v, const Matrix& rot, const Matrix& b,
                             const LabelSet& labels, const TrainConfig& cfg) {
  const double n = static_cast<double>(v.cols());
  const Eigen::Index c = labels.classes();
  const Matrix u = rot * v;
  const Matrix gl = labels.g * labels.l.transpose();  // c x c
  const Matrix ll = labels.l * labels.l.transpose();  // c x c
  const Matrix rhs = static_cast<double>(cfg.r) * (u * labels.g.transpose()) * gl +
                     cfg.omega * (b * labels.l.transpose());
  const double eps = 1e-6 * ll.trace() / static_cast<double>(c);
  const Matrix a = (n + cfg.omega) * ll + eps * Matrix::Identity(c, c);
  const Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(a, Eigen::EigenvaluesOnly)
                          .eigenvalues();
    throw NumericalError("M-step: c x c system not positive definite (eigenvalues "
                         "in [" + std::to_string(ev.minCoeff()) + ", " +
                         std::to_string(ev.maxCoeff()) + "])");
  }
  // M A = rhs with A symmetric.
  Matrix m = llt.solve(rhs.transpose()).transpose();
  CheckFinite(m, "M-step");
  return m;
}

Matrix RotationTarget(const Matrix& m, const LabelSet& labels, const Matrix& v,
                      int r) {
  return static_cast<double>(r) * m * (labels.l * labels.g.transpose()) *
         (labels.g * v.transpose());
}

Matrix ProcrustesRotation(const Matrix& c) {
  if (!c.allFinite()) throw NumericalError("R-step: non-finite target");
  const Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("R-step: SVD did not converge");
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix UpdateRotation(const Matrix& m, const LabelSet& labels, const Matrix& v) {
  return ProcrustesRotation(
      RotationTarget(m, labels, v, static_cast<int>(v.rows())));
}

Matrix LatentTarget(const Matrix& rot, const Matrix& m, const LabelSet& labels,
                    std::span<const FeatureMatrix> phix, std::span<const Matrix> p,
                    const TrainConfig& cfg) {
  Matrix z = static_cast<double>(cfg.r) * rot.transpose() * m *
             (labels.l * labels.g.transpose()) * labels.g;
  for (std::size_t t = 0; t < phix.size(); ++t) {
    z.noalias() += cfg.lambda[t] * (p[t].transpose() * KernelColumns(phix[t]));
  }
  return z;
}

Matrix MaximizeLatentAlignment(const Matrix& z, std::uint64_t seed) {
  const Eigen::Index r = z.rows();
  const Eigen::Index n = z.cols();
  if (r > n - 1) {
    throw ValidationError("V-step: r=" + std::to_string(r) + " exceeds n - 1 = " +
                          std::to_string(n - 1));
  }
  CheckFinite(z, "V-step target");
  Matrix y = z;
  y.colwise() -= y.rowwise().mean();

  // Y^T = U S W^T; the maximizer is sqrt(n) W U^T.
  const Eigen::BDCSVD<Matrix> svd(y.transpose(),
                                  Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericalError("V-step: SVD did not converge");
  }
  const Vector& values = svd.singularValues();
  const Matrix& q = svd.matrixV();
  const double top = values(0);
  if (!(top > 0.0)) {
    throw NumericalError("V-step: degenerate latent target, no centered signal");
  }
  Eigen::Index rank = 0;
  while (rank < r && values(rank) > kRankThreshold * top) ++rank;

  const Vector ones =
      Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Matrix basis(n, r);
  basis.leftCols(rank) = svd.matrixU().leftCols(rank);
  for (Eigen::Index j = 0; j < rank; ++j) {
    if (!OrthonormalizeColumn(&basis, j, ones)) {
      throw NumericalError("V-step: principal direction " + std::to_string(j) +
                           " lost orthogonality");
    }
  }
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index j = rank; j < r; ++j) {
    bool ok = false;
    for (int attempt = 0; attempt < 8 && !ok; ++attempt) {
      for (Eigen::Index i = 0; i < n; ++i) basis(i, j) = normal(rng);
      ok = OrthonormalizeColumn(&basis, j, ones);
    }
    if (!ok) throw NumericalError("V-step: cannot complete orthonormal basis");
  }
  return std::sqrt(static_cast<double>(n)) * q * basis.transpose();
}

Matrix UpdateLatent(const Matrix& rot, const Matrix& m, const LabelSet& labels,
                    std::span<const FeatureMatrix> phix, std::span<const Matrix> p,
                    const TrainConfig& cfg, std::uint64_t completion_seed) {
  return MaximizeLatentAlignment(LatentTarget(rot, m, labels, phix, p, cfg),
                                 completion_seed);
}

Matrix UpdateCodes(const Matrix& m, const LabelSet& labels) {
  const Matrix w = m * labels.l;
  return w.unaryExpr([](double x) { return x >= 0.0 ? 1.0 : -1.0; });
}

ObjectiveTerms ObjectiveBreakdown(const ModelState& state, const LabelSet& labels,
                                  std::span<const FeatureMatrix> phix,
                                  const TrainConfig& cfg) {
  const double r = static_cast<double>(cfg.r);
  const Matrix u = state.rot * state.v;  // r x n
  const Matrix w = state.m * labels.l;   // r x n
  const Matrix ug = u * labels.g.transpose();
  const Matrix wg = w * labels.g.transpose();
  const Matrix gg = labels.g * labels.g.transpose();
  const Matrix uu = u * u.transpose();
  const Matrix ww = w * w.transpose();

  ObjectiveTerms terms;
  // |U^T W - r G^T G|^2 expanded into r x r, r x c and c x c traces.
  terms.asymmetric = std::max(
      0.0, uu.cwiseProduct(ww).sum() - 2.0 * r * ug.cwiseProduct(wg).sum() +
               r * r * gg.squaredNorm());
  terms.quantization = cfg.omega * (state.b - w).squaredNorm();

  const Eigen::Index n = state.v.cols();
  for (std::size_t t = 0; t < phix.size(); ++t) {
    double sum = 0.0;
    for (Eigen::Index start = 0; start < n; start += kResidualBlock) {
      const Eigen::Index len = std::min(kResidualBlock, n - start);
      sum += (phix[t].values.middleRows(start, len).transpose() -
              state.p[t] * state.v.middleCols(start, len))
                 .squaredNorm();
    }
    terms.reconstruction += cfg.lambda[t] * sum;
  }
  return terms;
}

double ObjectiveValue(const ModelState& state, const LabelSet& labels,
                      std::span<const FeatureMatrix> phix, const TrainConfig& cfg) {
  return ObjectiveBreakdown(state, labels, phix, cfg).total();
}

TrainResult Train(std::span<const FeatureMatrix> phix, const LabelSet& labels,
                  const TrainConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ValidateTrainConfig(cfg, phix.size());
  const Eigen::Index n = labels.instances();
  for (std::size_t t = 0; t < phix.size(); ++t) {
    if (phix[t].rows() != n) {
      throw ValidationError("train: modality " + std::to_string(t + 1) + " has " +
                            std::to_string(phix[t].rows()) + " instances, labels have " +
                            std::to_string(n));
    }
    if (!phix[t].values.allFinite()) {
      throw ValidationError("train: modality " + std::to_string(t + 1) +
                            " features are not finite");
    }
  }

  TrainResult result;
  ModelState& s = result.state;
  s = InitState(phix, labels, cfg);
  auto& history = result.report.objective_history;
  for (int it = 0; it < cfg.max_iters; ++it) {
    try {
      for (std::size_t t = 0; t < phix.size(); ++t) {
        s.p[t] = UpdateProjection(phix[t], s.v);
      }
      s.m = UpdateLabelProjection(s.v, s.rot, s.b, labels, cfg);
      s.rot = UpdateRotation(s.m, labels, s.v);
      s.v = UpdateLatent(s.rot, s.m, labels, phix, s.p, cfg,
                         DeriveSeed(cfg.seed, SeedStream::kLatentCompletion,
                                    static_cast<std::uint64_t>(it)));
      s.b = UpdateCodes(s.m, labels);
    } catch (const NumericalError& e) {
      throw NumericalError("sweep " + std::to_string(it + 1) + ": " + e.what());
    }
    const double obj = ObjectiveValue(s, labels, phix, cfg);
    history.push_back(obj);
    result.report.iterations_run = it + 1;
    if (history.size() >= 2) {
      const double prev = history[history.size() - 2];
      const double rel = prev > 0.0 ? (prev - obj) / prev : 0.0;
      if (rel < cfg.rel_tol) {
        result.report.converged = true;
        break;
      }
    }
  }
  result.report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace xmh
