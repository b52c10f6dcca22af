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

#ifndef XMHASH_RETRIEVAL_H_
#define XMHASH_RETRIEVAL_H_

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xmhash/types.h"

namespace xmh {

// Packed binary codes. Code i occupies words [i*w, (i+1)*w), w = ceil(r/64);
// bit j lives in word j/64 at position j%64; a set bit means +1. Unused high
// bits of the last word are always zero.
class CodeSet {
 public:
  CodeSet() = default;
  CodeSet(std::int64_t n, int r);

  // signs is r x n (one code per column); entries >= 0 map to +1.
  static CodeSet FromSigns(const Matrix& signs);

  std::int64_t size() const { return n_; }
  int bits() const { return r_; }
  int words_per_code() const { return words_per_code_; }

  std::span<const std::uint64_t> code(std::int64_t i) const;
  std::span<std::uint64_t> mutable_code(std::int64_t i);
  const std::vector<std::uint64_t>& words() const { return words_; }

  bool bit(std::int64_t i, int j) const;
  void set_bit(std::int64_t i, int j, bool value);

  // r x n matrix of +-1.
  Matrix ToSigns() const;

  friend bool operator==(const CodeSet&, const CodeSet&) = default;

 private:
  std::int64_t n_ = 0;
  int r_ = 0;
  int words_per_code_ = 0;
  std::vector<std::uint64_t> words_;
};

// ABC1 code file: magic "ABC1", u64 n, u32 r, then n*ceil(r/64) u64 words,
// all little-endian.
void WriteCodes(const CodeSet& codes, const std::filesystem::path& path);
CodeSet ReadCodes(const std::filesystem::path& path);

int Hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

// Database indices by ascending Hamming distance; ties keep index order.
std::vector<std::int64_t> RankByHamming(std::span<const std::uint64_t> query,
                                        const CodeSet& db);

// Two instances are relevant iff they share at least one label.
class RelevanceJudge {
 public:
  // Both label matrices are classes x instances with the same class count.
  RelevanceJudge(const Matrix& query_labels, const Matrix& db_labels);

  bool relevant(std::int64_t query, std::int64_t item) const;
  std::int64_t queries() const { return nq_; }
  std::int64_t items() const { return nd_; }

 private:
  std::int64_t nq_ = 0;
  std::int64_t nd_ = 0;
  int words_ = 0;
  std::vector<std::uint64_t> query_masks_;
  std::vector<std::uint64_t> db_masks_;
};

struct ApResult {
  double ap = 0.0;
  std::int64_t relevant_retrieved = 0;
  bool empty_ground_truth = false;
};

// AP = (1/L) sum_{k=1..cutoff} P_k rel(k), L = relevant items in the top
// cutoff. L = 0 gives AP = 0 with empty_ground_truth set.
ApResult AveragePrecision(std::span<const std::int64_t> ranked,
                          const RelevanceJudge& judge, std::int64_t query,
                          std::int64_t cutoff);

struct MapResult {
  double map = 0.0;
  std::int64_t evaluated = 0;
  std::int64_t excluded = 0;  // empty ground truth, left out of the mean
};

// cutoff <= 0 means the whole database. With include_empty, queries with
// no relevant item contribute AP = 0 instead of being excluded.
MapResult MeanAveragePrecision(const CodeSet& queries, const CodeSet& db,
                               const RelevanceJudge& judge,
                               std::int64_t cutoff = 0,
                               bool include_empty = false);

std::vector<std::pair<std::int64_t, double>> TopNPrecisionCurve(
    const CodeSet& queries, const CodeSet& db, const RelevanceJudge& judge,
    std::span<const std::int64_t> n_points);

// "metric,task,bits,value" rows.
struct MetricRow {
  std::string metric;
  std::string task;
  int bits = 0;
  double value = 0.0;
};

void WriteMetricsCsv(std::ostream& out, std::span<const MetricRow> rows);

}  // namespace xmh

#endif  // XMHASH_RETRIEVAL_H_
