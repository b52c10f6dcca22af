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

#include "xmhash/pipeline.h"

#include <charconv>
#include <cmath>
#include <string>

#include "xmhash/errors.h"
#include "xmhash/labelspace.h"
#include "xmhash/random.h"

namespace xmh {
namespace {

FeatureMatrix Section(const Matrix& m) {
  FeatureMatrix out;
  out.values = m;
  return out;
}

std::string Suffix(std::size_t t) { return "_" + std::to_string(t + 1); }

void ExpectShape(const ModelArchive& a, const std::string& name, Eigen::Index rows,
                 Eigen::Index cols) {
  const FeatureMatrix& m = a.section(name);
  if (m.rows() != rows || m.cols() != cols) {
    throw FormatError("model archive section " + name + " is " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  }
}

}  // namespace

TrainedModel FitModel(std::span<const FeatureMatrix> raw,
                      const RawLabelMatrix& labels, const PipelineConfig& cfg) {
  if (raw.size() != 2) throw ValidationError("expected two modalities");
  if (cfg.anchors.size() != raw.size()) {
    throw ValidationError("expected one anchor count per modality");
  }
  ValidateTrainConfig(cfg.train, raw.size());
  if (!(cfg.lambda_h > 0.0)) throw ValidationError("lambda_h must be > 0");
  const Eigen::Index n = labels.instances();
  for (std::size_t t = 0; t < raw.size(); ++t) {
    ValidateFinite(raw[t].values, "modality " + std::to_string(t + 1));
    if (raw[t].rows() != n) {
      throw ValidationError("modality " + std::to_string(t + 1) + " has " +
                            std::to_string(raw[t].rows()) + " instances, labels have " +
                            std::to_string(n));
    }
    if (cfg.anchors[t] < 1 || cfg.anchors[t] > n) {
      throw ValidationError("modality " + std::to_string(t + 1) + ": need 1 <= k <= n, got k=" +
                            std::to_string(cfg.anchors[t]) + " n=" + std::to_string(n));
    }
  }
  if (cfg.train.r > n - 1) {
    throw ValidationError("code length r=" + std::to_string(cfg.train.r) +
                          " needs at least " + std::to_string(cfg.train.r + 1) +
                          " training instances, got " + std::to_string(n));
  }

  TrainedModel model;
  model.config = cfg.train;
  std::vector<FeatureMatrix> features;
  for (std::size_t t = 0; t < raw.size(); ++t) {
    KernelFit fit = FitKernelMap(raw[t], cfg.anchors[t], cfg.width_sample_cap,
                                 DeriveSeed(cfg.train.seed, SeedStream::kAnchors, t));
    model.encoder.kernels.push_back(std::move(fit.map));
    features.push_back(std::move(fit.features));
  }
  const LabelSet label_set = NormalizeLabels(labels);
  TrainResult trained = Train(features, label_set, cfg.train);
  model.state = std::move(trained.state);
  model.report = std::move(trained.report);

  model.encoder.lambda_h = cfg.lambda_h;
  const Matrix codes = model.state.b.transpose();
  for (const auto& phi : features) {
    model.encoder.p_h.push_back(FitRidgeEncoder(phi.values, codes, cfg.lambda_h));
  }
  return model;
}

ModelArchive ToArchive(const TrainedModel& model) {
  ModelArchive a;
  const ModelState& s = model.state;
  a.sections.emplace_back("V", Section(s.v));
  a.sections.emplace_back("R", Section(s.rot));
  a.sections.emplace_back("M", Section(s.m));
  a.sections.emplace_back("B", Section(s.b));
  for (std::size_t t = 0; t < s.p.size(); ++t) {
    a.sections.emplace_back("P" + Suffix(t), Section(s.p[t]));
  }
  for (std::size_t t = 0; t < model.encoder.p_h.size(); ++t) {
    a.sections.emplace_back("Ph" + Suffix(t), Section(model.encoder.p_h[t]));
  }
  for (std::size_t t = 0; t < model.encoder.kernels.size(); ++t) {
    const KernelMap& km = model.encoder.kernels[t];
    FeatureMatrix anchors;
    anchors.values = km.anchors;
    a.sections.emplace_back("anchors" + Suffix(t), std::move(anchors));
    a.sections.emplace_back("kcenter" + Suffix(t), Section(km.center.transpose()));
    a.meta["sigma" + Suffix(t)] = FormatReal(km.sigma);
    a.meta["k" + Suffix(t)] = std::to_string(km.k());
  }
  const TrainConfig& cfg = model.config;
  a.meta["r"] = std::to_string(cfg.r);
  a.meta["omega"] = FormatReal(cfg.omega);
  for (std::size_t t = 0; t < cfg.lambda.size(); ++t) {
    a.meta["lambda" + Suffix(t)] = FormatReal(cfg.lambda[t]);
  }
  a.meta["lambda_h"] = FormatReal(model.encoder.lambda_h);
  a.meta["seed"] = std::to_string(cfg.seed);
  a.meta["iterations"] = std::to_string(model.report.iterations_run);
  a.meta["objective_history"] = FormatRealList(model.report.objective_history);
  return a;
}

TrainedModel FromArchive(const ModelArchive& a) {
  TrainedModel model;
  TrainConfig& cfg = model.config;
  const std::string ctx = "model metadata";
  cfg.r = static_cast<int>(ParseInt(a.meta_value("r"), ctx));
  cfg.omega = ParseReal(a.meta_value("omega"), ctx);
  cfg.lambda = {ParseReal(a.meta_value("lambda_1"), ctx),
                ParseReal(a.meta_value("lambda_2"), ctx)};
  {
    const std::string& seed = a.meta_value("seed");
    std::uint64_t value = 0;
    const auto res = std::from_chars(seed.data(), seed.data() + seed.size(), value);
    if (res.ec != std::errc() || res.ptr != seed.data() + seed.size()) {
      throw FormatError(ctx + ": bad seed \"" + seed + "\"");
    }
    cfg.seed = value;
  }
  model.report.iterations_run = static_cast<int>(ParseInt(a.meta_value("iterations"), ctx));
  model.report.objective_history = ParseRealList(a.meta_value("objective_history"), ctx);
  model.encoder.lambda_h = ParseReal(a.meta_value("lambda_h"), ctx);
  if (cfg.r < 1) throw FormatError(ctx + ": r must be >= 1");

  const Eigen::Index r = cfg.r;
  const Eigen::Index n = a.section("V").cols();
  const Eigen::Index c = a.section("M").cols();
  ExpectShape(a, "V", r, n);
  ExpectShape(a, "R", r, r);
  ExpectShape(a, "M", r, c);
  ExpectShape(a, "B", r, n);
  ModelState& s = model.state;
  s.v = a.section("V").values;
  s.rot = a.section("R").values;
  s.m = a.section("M").values;
  s.b = a.section("B").values;
  if (!((s.b.array() == 1.0) || (s.b.array() == -1.0)).all()) {
    throw FormatError("model archive section B holds values other than +-1");
  }
  for (std::size_t t = 0; t < 2; ++t) {
    const Eigen::Index k = ParseInt(a.meta_value("k" + Suffix(t)), ctx);
    const Eigen::Index d = a.section("anchors" + Suffix(t)).cols();
    ExpectShape(a, "P" + Suffix(t), k, r);
    ExpectShape(a, "Ph" + Suffix(t), k, r);
    ExpectShape(a, "anchors" + Suffix(t), k, d);
    ExpectShape(a, "kcenter" + Suffix(t), 1, k);
    s.p.push_back(a.section("P" + Suffix(t)).values);
    model.encoder.p_h.push_back(a.section("Ph" + Suffix(t)).values);
    KernelMap km;
    km.anchors = a.section("anchors" + Suffix(t)).values;
    km.sigma = ParseReal(a.meta_value("sigma" + Suffix(t)), ctx);
    km.center = a.section("kcenter" + Suffix(t)).values.row(0).transpose();
    ValidateKernelMap(km);
    model.encoder.kernels.push_back(std::move(km));
  }
  return model;
}

std::vector<BenchRow> RunBench(const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  for (const std::int64_t n : cfg.sizes) {
    const SyntheticData data =
        GenerateSynthetic(n, cfg.classes, cfg.d1, cfg.d2, cfg.noise, cfg.seed);
    const FeatureMatrix* raw[] = {&data.x1, &data.x2};
    std::vector<FeatureMatrix> features;
    for (std::size_t t = 0; t < 2; ++t) {
      features.push_back(FitKernelMap(*raw[t], cfg.anchors[t], kDefaultWidthSampleCap,
                                      DeriveSeed(cfg.seed, SeedStream::kAnchors, t))
                             .features);
    }
    const LabelSet labels = NormalizeLabels(data.labels);
    for (const int bits : cfg.bits) {
      TrainConfig tc;
      tc.r = bits;
      tc.max_iters = cfg.max_iters;
      tc.rel_tol = 1e-300;
      tc.seed = cfg.seed;
      const TrainResult res = Train(features, labels, tc);
      BenchRow row;
      row.n = n;
      row.bits = bits;
      row.seconds = res.report.wall_time_seconds;
      row.iterations = res.report.iterations_run;
      row.seconds_per_sweep = row.seconds / row.iterations;
      rows.push_back(row);
    }
  }
  return rows;
}

double LogLogSlope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("log-log slope needs at least two paired points");
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw ValidationError("log-log slope needs positive values");
    }
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ValidationError("log-log slope: all x equal");
  return sxy / sxx;
}

}  // namespace xmh
