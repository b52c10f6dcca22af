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

#ifndef XMHASH_PIPELINE_H_
#define XMHASH_PIPELINE_H_

#include <cstdint>
#include <vector>

#include "xmhash/dataio.h"
#include "xmhash/encoder.h"
#include "xmhash/kernelfeat.h"
#include "xmhash/trainer.h"

namespace xmh {

struct PipelineConfig {
  TrainConfig train;
  std::vector<Eigen::Index> anchors = {500, 1000};  // k per modality
  double lambda_h = kDefaultLambdaH;
  Eigen::Index width_sample_cap = kDefaultWidthSampleCap;
};

struct TrainedModel {
  TrainConfig config;
  ModelState state;
  TrainReport report;
  HashEncoder encoder;
};

// Kernelize each modality, run the alternating optimization, then fit one
// ridge hash function per modality on the learned codes.
TrainedModel FitModel(std::span<const FeatureMatrix> raw,
                      const RawLabelMatrix& labels, const PipelineConfig& cfg);

ModelArchive ToArchive(const TrainedModel& model);
TrainedModel FromArchive(const ModelArchive& archive);

struct BenchRow {
  std::int64_t n = 0;
  int bits = 0;
  double seconds = 0.0;  // train() wall time
  int iterations = 0;
  double seconds_per_sweep = 0.0;
};

struct BenchConfig {
  std::vector<std::int64_t> sizes = {2000, 4000, 8000, 16000};
  std::vector<int> bits = {32};
  std::int64_t classes = 10;
  std::int64_t d1 = 32;
  std::int64_t d2 = 16;
  double noise = 0.3;
  std::vector<Eigen::Index> anchors = {500, 1000};
  int max_iters = 5;
  std::uint64_t seed = 0;
};

std::vector<BenchRow> RunBench(const BenchConfig& cfg);

// Least-squares slope of log(y) against log(x).
double LogLogSlope(std::span<const double> x, std::span<const double> y);

}  // namespace xmh

#endif  // XMHASH_PIPELINE_H_
