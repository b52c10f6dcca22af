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

#include "xmhash/cli.h"

#include <CLI11.hpp>

#include <filesystem>
#include <map>
#include <sstream>

#include "xmhash/dataio.h"
#include "xmhash/encoder.h"
#include "xmhash/errors.h"
#include "xmhash/pipeline.h"
#include "xmhash/retrieval.h"

namespace xmh {
namespace {

namespace fs = std::filesystem;

struct SynthArgs {
  std::int64_t n = 1000;
  std::int64_t c = 5;
  std::int64_t d1 = 32;
  std::int64_t d2 = 16;
  double noise = 0.3;
  std::uint64_t seed = 0;
  std::int64_t queries = 0;
  std::string out = ".";
};

struct TrainArgs {
  std::string x1, x2, labels;
  std::string out = "model.amh";
  int bits = 32;
  double omega = 0.5;
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  std::int64_t k1 = 500;
  std::int64_t k2 = 1000;
  double lambda_h = kDefaultLambdaH;
  int max_iters = 30;
  double tol = 1e-5;
  std::uint64_t seed = 0;
};

struct EncodeArgs {
  std::string model, x, out = "codes.abc";
  int modality = 1;
};

struct EvalArgs {
  std::string query_codes, db_codes, query_labels, db_labels;
  std::string task = "i2t";
  std::int64_t cutoff = 0;
  std::vector<std::int64_t> topn;
  bool include_empty = false;
};

struct BenchArgs {
  std::vector<std::int64_t> sizes = {2000, 4000, 8000, 16000};
  std::vector<int> bits = {32};
  std::int64_t c = 10;
  std::int64_t d1 = 32;
  std::int64_t d2 = 16;
  double noise = 0.3;
  std::int64_t k1 = 500;
  std::int64_t k2 = 1000;
  int max_iters = 5;
  std::uint64_t seed = 0;
};

int CmdSynth(const SynthArgs& a, std::ostream& out) {
  if (a.queries < 0) throw ValidationError("synth: --queries must be >= 0");
  const SyntheticData data =
      GenerateSynthetic(a.n + a.queries, a.c, a.d1, a.d2, a.noise, a.seed);
  fs::create_directories(a.out);
  const fs::path dir(a.out);
  auto write_split = [&](Eigen::Index begin, Eigen::Index count,
                         const std::string& prefix) {
    FeatureMatrix x1, x2;
    x1.values = data.x1.values.middleRows(begin, count);
    x2.values = data.x2.values.middleRows(begin, count);
    WriteMatrix(x1, dir / (prefix + "x1.amx"));
    WriteMatrix(x2, dir / (prefix + "x2.amx"));
    WriteLabels(RawLabelMatrix{data.labels.values.middleCols(begin, count)},
                dir / (prefix + "labels.amx"));
  };
  write_split(0, a.n, "");
  out << "wrote " << a.n << " training instances to " << a.out << '\n';
  if (a.queries > 0) {
    write_split(a.n, a.queries, "q");
    out << "wrote " << a.queries << " query instances to " << a.out << '\n';
  }
  return kExitOk;
}

int CmdTrain(const TrainArgs& a, std::ostream& out) {
  // Read and validate every input before any training work.
  const FeatureMatrix raw[] = {ReadMatrix(a.x1), ReadMatrix(a.x2)};
  const RawLabelMatrix labels = ReadLabels(a.labels);
  PipelineConfig cfg;
  cfg.train.r = a.bits;
  cfg.train.omega = a.omega;
  cfg.train.lambda = {a.lambda1, a.lambda2};
  cfg.train.max_iters = a.max_iters;
  cfg.train.rel_tol = a.tol;
  cfg.train.seed = a.seed;
  cfg.anchors = {a.k1, a.k2};
  cfg.lambda_h = a.lambda_h;
  const TrainedModel model = FitModel(raw, labels, cfg);
  SaveModel(ToArchive(model), a.out);
  const auto& hist = model.report.objective_history;
  out << "iterations=" << model.report.iterations_run << '\n'
      << "converged=" << (model.report.converged ? "true" : "false") << '\n'
      << "objective=" << FormatReal(hist.back()) << '\n'
      << "objective_history=" << FormatRealList(hist) << '\n';
  return kExitOk;
}

int CmdEncode(const EncodeArgs& a, std::ostream& out) {
  const TrainedModel model = FromArchive(LoadModel(a.model));
  const FeatureMatrix x = ReadMatrix(a.x);
  const CodeSet codes = Encode(x, model.encoder, a.modality - 1);
  WriteCodes(codes, a.out);
  out << "encoded " << codes.size() << " instances at " << codes.bits()
      << " bits to " << a.out << '\n';
  return kExitOk;
}

int CmdEval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const CodeSet queries = ReadCodes(a.query_codes);
  const CodeSet db = ReadCodes(a.db_codes);
  if (queries.bits() != db.bits()) {
    throw ValidationError("eval: query codes have " + std::to_string(queries.bits()) +
                          " bits, database codes " + std::to_string(db.bits()));
  }
  const RawLabelMatrix ql = ReadLabels(a.query_labels);
  const RawLabelMatrix dl = ReadLabels(a.db_labels);
  const RelevanceJudge judge(ql.values, dl.values);
  const MapResult map =
      MeanAveragePrecision(queries, db, judge, a.cutoff, a.include_empty);
  std::vector<MetricRow> rows;
  rows.push_back({"map", a.task, queries.bits(), map.map});
  for (const auto& [n, p] : TopNPrecisionCurve(queries, db, judge, a.topn)) {
    rows.push_back({"precision@" + std::to_string(n), a.task, queries.bits(), p});
  }
  WriteMetricsCsv(out, rows);
  err << "evaluated " << map.evaluated << " queries, excluded " << map.excluded
      << " with empty ground truth\n";
  return kExitOk;
}

int CmdBench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
  BenchConfig cfg;
  cfg.sizes = a.sizes;
  cfg.bits = a.bits;
  cfg.classes = a.c;
  cfg.d1 = a.d1;
  cfg.d2 = a.d2;
  cfg.noise = a.noise;
  cfg.anchors = {a.k1, a.k2};
  cfg.max_iters = a.max_iters;
  cfg.seed = a.seed;
  std::vector<BenchRow> rows;
  try {
    rows = RunBench(cfg);
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw NumericalError(std::string("bench: training failed: ") + e.what());
  }
  out << "n,bits,seconds,iterations,seconds_per_sweep\n";
  for (const auto& row : rows) {
    out << row.n << ',' << row.bits << ',' << FormatReal(row.seconds) << ','
        << row.iterations << ',' << FormatReal(row.seconds_per_sweep) << '\n';
  }
  if (a.sizes.size() >= 2) {
    for (const int bits : a.bits) {
      std::vector<double> xs, ys;
      for (const auto& row : rows) {
        if (row.bits != bits) continue;
        xs.push_back(static_cast<double>(row.n));
        ys.push_back(row.seconds_per_sweep);
      }
      err << "log-log slope (seconds per sweep vs n), bits=" << bits << ": "
          << FormatReal(LogLogSlope(xs, ys)) << '\n';
    }
  }
  return kExitOk;
}

// Prepends key=value pairs from --config as --key=value flags, so that
// explicit command-line flags (parsed later, last one wins) take precedence.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args,
                                      const CLI::App& app) {
  if (args.empty()) return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].starts_with("--config=")) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  const CLI::App* sub = nullptr;
  for (const CLI::App* s : app.get_subcommands({})) {
    if (s->get_name() == args[0]) sub = s;
  }
  if (sub == nullptr) return args;
  const auto kv = ParseKeyValues(ReadFile(path), path);
  std::vector<std::string> expanded = {args[0]};
  for (const auto& [key, value] : kv) {
    if (key == "config" || sub->get_option_no_throw("--" + key) == nullptr) {
      throw ValidationError(path + ": unknown config key \"" + key + "\"");
    }
    expanded.push_back("--" + key + "=" + value);
  }
  expanded.insert(expanded.end(), args.begin() + 1, args.end());
  return expanded;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"xmhash: supervised cross-modal hashing", "xmhash"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a seeded two-modality dataset");
  s->add_option("--n", synth.n, "Training instances");
  s->add_option("--c", synth.c, "Classes");
  s->add_option("--d1", synth.d1, "Modality 1 dimension");
  s->add_option("--d2", synth.d2, "Modality 2 dimension");
  s->add_option("--noise", synth.noise, "Per-coordinate noise scale");
  s->add_option("--seed", synth.seed, "Random seed");
  s->add_option("--queries", synth.queries,
                "Extra held-out instances written as qx1/qx2/qlabels");
  s->add_option("--out", synth.out, "Output directory");
  s->add_option("--config", "key=value defaults file");

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Learn codes and hash functions");
  t->add_option("--x1", train.x1, "Modality 1 features (AMX1 or CSV)")->required();
  t->add_option("--x2", train.x2, "Modality 2 features (AMX1 or CSV)")->required();
  t->add_option("--labels", train.labels, "Labels, classes x instances")->required();
  t->add_option("--out", train.out, "Model archive path");
  t->add_option("--bits", train.bits, "Code length r");
  t->add_option("--omega", train.omega, "Weight of |B - ML|^2");
  t->add_option("--lambda1", train.lambda1, "Modality 1 reconstruction weight");
  t->add_option("--lambda2", train.lambda2, "Modality 2 reconstruction weight");
  t->add_option("--k1", train.k1, "Modality 1 anchors");
  t->add_option("--k2", train.k2, "Modality 2 anchors");
  t->add_option("--lambda-h", train.lambda_h, "Hash function ridge weight");
  t->add_option("--max-iters", train.max_iters, "Maximum sweeps");
  t->add_option("--tol", train.tol, "Relative objective decrease to stop");
  t->add_option("--seed", train.seed, "Random seed");
  t->add_option("--config", "key=value defaults file");

  EncodeArgs encode;
  auto* e = app.add_subcommand("encode", "Hash raw features with a trained model");
  e->add_option("--model", encode.model, "Model archive")->required();
  e->add_option("--x", encode.x, "Raw features (AMX1 or CSV)")->required();
  e->add_option("--modality", encode.modality, "Modality of --x")
      ->check(CLI::IsMember({1, 2}));
  e->add_option("--out", encode.out, "ABC1 code file");
  e->add_option("--config", "key=value defaults file");

  EvalArgs eval;
  auto* v = app.add_subcommand("eval", "mAP and top-N precision as CSV");
  v->add_option("--query-codes", eval.query_codes, "ABC1 query codes")->required();
  v->add_option("--db-codes", eval.db_codes, "ABC1 database codes")->required();
  v->add_option("--query-labels", eval.query_labels, "Query labels")->required();
  v->add_option("--db-labels", eval.db_labels, "Database labels")->required();
  v->add_option("--task", eval.task, "Task name for the CSV (e.g. i2t, t2i)");
  v->add_option("--cutoff", eval.cutoff, "mAP cutoff, 0 = whole database");
  v->add_option("--topn", eval.topn, "Top-N precision points")->delimiter(',');
  v->add_flag("--include-empty", eval.include_empty,
              "Count empty-ground-truth queries as AP=0");
  v->add_option("--config", "key=value defaults file");

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Training time against training-set size");
  b->add_option("--sizes", bench.sizes, "Training sizes")->delimiter(',');
  b->add_option("--bits", bench.bits, "Code lengths")->delimiter(',');
  b->add_option("--c", bench.c, "Classes");
  b->add_option("--d1", bench.d1, "Modality 1 dimension");
  b->add_option("--d2", bench.d2, "Modality 2 dimension");
  b->add_option("--noise", bench.noise, "Per-coordinate noise scale");
  b->add_option("--k1", bench.k1, "Modality 1 anchors");
  b->add_option("--k2", bench.k2, "Modality 2 anchors");
  b->add_option("--max-iters", bench.max_iters, "Sweeps per size");
  b->add_option("--seed", bench.seed, "Random seed");
  b->add_option("--config", "key=value defaults file");

  try {
    std::vector<std::string> expanded = ExpandConfig(args, app);
    std::vector<const char*> argv = {"xmhash"};
    for (const auto& arg : expanded) argv.push_back(arg.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& pe) {
      err << "xmhash: " << pe.what() << '\n';
      return kExitInput;
    }
    if (s->parsed()) return CmdSynth(synth, out);
    if (t->parsed()) return CmdTrain(train, out);
    if (e->parsed()) return CmdEncode(encode, out);
    if (v->parsed()) return CmdEval(eval, out, err);
    if (b->parsed()) return CmdBench(bench, out, err);
    return kExitInput;
  } catch (const NumericalError& ex) {
    err << "xmhash: numerical failure: " << ex.what() << '\n';
    return kExitNumerical;
  } catch (const Error& ex) {
    err << "xmhash: " << ex.what() << '\n';
    return kExitInput;
  } catch (const fs::filesystem_error& ex) {
    err << "xmhash: " << ex.what() << '\n';
    return kExitInput;
  } catch (const std::exception& ex) {
    err << "xmhash: " << ex.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace xmh
