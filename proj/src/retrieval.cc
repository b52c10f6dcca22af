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

#include "xmhash/retrieval.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

#include "xmhash/dataio.h"
#include "xmhash/errors.h"

namespace xmh {
namespace {

constexpr std::string_view kCodeMagic = "ABC1";

int WordsFor(int r) { return (r + 63) / 64; }

}  // namespace

CodeSet::CodeSet(std::int64_t n, int r)
    : n_(n), r_(r), words_per_code_(WordsFor(r)) {
  if (n < 0 || r < 1) {
    throw ValidationError("code set needs n >= 0 and r >= 1");
  }
  words_.assign(static_cast<std::size_t>(n) * words_per_code_, 0);
}

CodeSet CodeSet::FromSigns(const Matrix& signs) {
  CodeSet codes(signs.cols(), static_cast<int>(signs.rows()));
  for (Eigen::Index i = 0; i < signs.cols(); ++i) {
    auto words = codes.mutable_code(i);
    for (Eigen::Index j = 0; j < signs.rows(); ++j) {
      if (signs(j, i) >= 0.0) words[j / 64] |= std::uint64_t{1} << (j % 64);
    }
  }
  return codes;
}

std::span<const std::uint64_t> CodeSet::code(std::int64_t i) const {
  return {words_.data() + i * words_per_code_,
          static_cast<std::size_t>(words_per_code_)};
}

std::span<std::uint64_t> CodeSet::mutable_code(std::int64_t i) {
  return {words_.data() + i * words_per_code_,
          static_cast<std::size_t>(words_per_code_)};
}

bool CodeSet::bit(std::int64_t i, int j) const {
  return (code(i)[j / 64] >> (j % 64)) & 1U;
}

void CodeSet::set_bit(std::int64_t i, int j, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (j % 64);
  auto& word = mutable_code(i)[j / 64];
  word = value ? (word | mask) : (word & ~mask);
}

Matrix CodeSet::ToSigns() const {
  Matrix out(r_, n_);
  for (std::int64_t i = 0; i < n_; ++i) {
    for (int j = 0; j < r_; ++j) out(j, i) = bit(i, j) ? 1.0 : -1.0;
  }
  return out;
}

void WriteCodes(const CodeSet& codes, const std::filesystem::path& path) {
  std::string out(kCodeMagic);
  const auto n = static_cast<std::uint64_t>(codes.size());
  const auto r = static_cast<std::uint32_t>(codes.bits());
  char buf[8];
  std::memcpy(buf, &n, 8);
  out.append(buf, 8);
  std::memcpy(buf, &r, 4);
  out.append(buf, 4);
  for (const std::uint64_t w : codes.words()) {
    std::memcpy(buf, &w, 8);
    out.append(buf, 8);
  }
  WriteFile(path, out);
}

CodeSet ReadCodes(const std::filesystem::path& path) {
  const std::string bytes = ReadFile(path);
  const std::string ctx = path.string();
  if (bytes.size() < 16) throw FormatError(ctx + ": truncated ABC1 header");
  if (std::string_view(bytes).substr(0, 4) != kCodeMagic) {
    throw FormatError(ctx + ": bad magic, expected ABC1");
  }
  std::uint64_t n = 0;
  std::uint32_t r = 0;
  std::memcpy(&n, bytes.data() + 4, 8);
  std::memcpy(&r, bytes.data() + 12, 4);
  if (r < 1) throw FormatError(ctx + ": code length 0");
  const std::uint64_t wpc = static_cast<std::uint64_t>(WordsFor(static_cast<int>(r)));
  const std::uint64_t available = (bytes.size() - 16) / 8;
  if ((bytes.size() - 16) % 8 != 0 || n > available || n * wpc != available) {
    throw FormatError(ctx + ": payload size does not match n=" + std::to_string(n) +
                      " r=" + std::to_string(r));
  }
  CodeSet codes(static_cast<std::int64_t>(n), static_cast<int>(r));
  std::vector<std::uint64_t> words(static_cast<std::size_t>(n * wpc));
  std::memcpy(words.data(), bytes.data() + 16, words.size() * 8);
  const int tail = static_cast<int>(r % 64);
  const std::uint64_t unused = tail == 0 ? 0 : ~((std::uint64_t{1} << tail) - 1);
  for (std::uint64_t i = 0; i < n; ++i) {
    auto dst = codes.mutable_code(static_cast<std::int64_t>(i));
    std::copy_n(words.begin() + static_cast<std::ptrdiff_t>(i * wpc), wpc, dst.begin());
    if (dst.back() & unused) {
      throw FormatError(ctx + ": code " + std::to_string(i) +
                        " has bits set beyond r");
    }
  }
  return codes;
}

int Hamming(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) {
    throw ValidationError("hamming: code lengths differ (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + " words)");
  }
  int d = 0;
  for (std::size_t w = 0; w < a.size(); ++w) d += std::popcount(a[w] ^ b[w]);
  return d;
}

std::vector<std::int64_t> RankByHamming(std::span<const std::uint64_t> query,
                                        const CodeSet& db) {
  const std::int64_t n = db.size();
  if (n == 0) return {};
  // Counting sort on distance keeps equal distances in index order.
  std::vector<int> dist(static_cast<std::size_t>(n));
  std::vector<std::int64_t> offsets(static_cast<std::size_t>(db.bits()) + 2, 0);
  for (std::int64_t i = 0; i < n; ++i) {
    const int d = Hamming(query, db.code(i));
    dist[static_cast<std::size_t>(i)] = d;
    ++offsets[static_cast<std::size_t>(d) + 1];
  }
  for (std::size_t d = 1; d < offsets.size(); ++d) offsets[d] += offsets[d - 1];
  std::vector<std::int64_t> order(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    order[static_cast<std::size_t>(offsets[dist[static_cast<std::size_t>(i)]]++)] = i;
  }
  return order;
}

RelevanceJudge::RelevanceJudge(const Matrix& query_labels, const Matrix& db_labels)
    : nq_(query_labels.cols()),
      nd_(db_labels.cols()),
      words_(static_cast<int>((query_labels.rows() + 63) / 64)) {
  if (query_labels.rows() != db_labels.rows()) {
    throw ValidationError("relevance: query labels have " +
                          std::to_string(query_labels.rows()) +
                          " classes, database labels " +
                          std::to_string(db_labels.rows()));
  }
  auto pack = [this](const Matrix& labels, std::vector<std::uint64_t>* masks) {
    masks->assign(static_cast<std::size_t>(labels.cols()) * words_, 0);
    for (Eigen::Index i = 0; i < labels.cols(); ++i) {
      for (Eigen::Index k = 0; k < labels.rows(); ++k) {
        if (labels(k, i) != 0.0) {
          (*masks)[static_cast<std::size_t>(i * words_ + k / 64)] |=
              std::uint64_t{1} << (k % 64);
        }
      }
    }
  };
  pack(query_labels, &query_masks_);
  pack(db_labels, &db_masks_);
}

bool RelevanceJudge::relevant(std::int64_t query, std::int64_t item) const {
  const std::uint64_t* q = query_masks_.data() + query * words_;
  const std::uint64_t* d = db_masks_.data() + item * words_;
  for (int w = 0; w < words_; ++w) {
    if (q[w] & d[w]) return true;
  }
  return false;
}

ApResult AveragePrecision(std::span<const std::int64_t> ranked,
                          const RelevanceJudge& judge, std::int64_t query,
                          std::int64_t cutoff) {
  if (cutoff < 0 || static_cast<std::size_t>(cutoff) > ranked.size()) {
    throw ValidationError("average_precision: cutoff " + std::to_string(cutoff) +
                          " exceeds ranked list of " + std::to_string(ranked.size()));
  }
  ApResult out;
  double sum = 0.0;
  for (std::int64_t k = 0; k < cutoff; ++k) {
    if (judge.relevant(query, ranked[static_cast<std::size_t>(k)])) {
      ++out.relevant_retrieved;
      sum += static_cast<double>(out.relevant_retrieved) / static_cast<double>(k + 1);
    }
  }
  if (out.relevant_retrieved == 0) {
    out.empty_ground_truth = true;
    return out;
  }
  out.ap = sum / static_cast<double>(out.relevant_retrieved);
  return out;
}

namespace {

void CheckEvalShapes(const CodeSet& queries, const CodeSet& db,
                     const RelevanceJudge& judge) {
  if (queries.bits() != db.bits()) {
    throw ValidationError("evaluation: query codes have " +
                          std::to_string(queries.bits()) + " bits, database codes " +
                          std::to_string(db.bits()));
  }
  if (judge.queries() != queries.size() || judge.items() != db.size()) {
    throw ValidationError("evaluation: label counts (" +
                          std::to_string(judge.queries()) + ", " +
                          std::to_string(judge.items()) + ") do not match code counts (" +
                          std::to_string(queries.size()) + ", " +
                          std::to_string(db.size()) + ")");
  }
}

}  // namespace

MapResult MeanAveragePrecision(const CodeSet& queries, const CodeSet& db,
                               const RelevanceJudge& judge, std::int64_t cutoff,
                               bool include_empty) {
  CheckEvalShapes(queries, db, judge);
  if (cutoff <= 0) cutoff = db.size();
  if (cutoff > db.size()) {
    throw ValidationError("evaluation: cutoff " + std::to_string(cutoff) +
                          " exceeds database size " + std::to_string(db.size()));
  }
  MapResult out;
  double sum = 0.0;
  for (std::int64_t q = 0; q < queries.size(); ++q) {
    const auto ranked = RankByHamming(queries.code(q), db);
    const ApResult ap = AveragePrecision(ranked, judge, q, cutoff);
    if (ap.empty_ground_truth && !include_empty) {
      ++out.excluded;
      continue;
    }
    sum += ap.ap;
    ++out.evaluated;
  }
  if (out.evaluated == 0) {
    throw ValidationError("evaluation: every query has empty ground truth");
  }
  out.map = sum / static_cast<double>(out.evaluated);
  return out;
}

std::vector<std::pair<std::int64_t, double>> TopNPrecisionCurve(
    const CodeSet& queries, const CodeSet& db, const RelevanceJudge& judge,
    std::span<const std::int64_t> n_points) {
  CheckEvalShapes(queries, db, judge);
  for (const std::int64_t n : n_points) {
    if (n < 1 || n > db.size()) {
      throw ValidationError("top-N precision: N=" + std::to_string(n) +
                            " outside 1.." + std::to_string(db.size()));
    }
  }
  std::vector<double> sums(n_points.size(), 0.0);
  std::vector<std::int64_t> prefix(static_cast<std::size_t>(db.size()) + 1);
  for (std::int64_t q = 0; q < queries.size(); ++q) {
    const auto ranked = RankByHamming(queries.code(q), db);
    prefix[0] = 0;
    for (std::size_t k = 0; k < ranked.size(); ++k) {
      prefix[k + 1] = prefix[k] + (judge.relevant(q, ranked[k]) ? 1 : 0);
    }
    for (std::size_t p = 0; p < n_points.size(); ++p) {
      sums[p] += static_cast<double>(prefix[static_cast<std::size_t>(n_points[p])]) /
                 static_cast<double>(n_points[p]);
    }
  }
  std::vector<std::pair<std::int64_t, double>> curve;
  for (std::size_t p = 0; p < n_points.size(); ++p) {
    curve.emplace_back(n_points[p],
                       queries.size() > 0
                           ? sums[p] / static_cast<double>(queries.size())
                           : 0.0);
  }
  return curve;
}

void WriteMetricsCsv(std::ostream& out, std::span<const MetricRow> rows) {
  out << "metric,task,bits,value\n";
  for (const auto& row : rows) {
    out << row.metric << ',' << row.task << ',' << row.bits << ','
        << FormatReal(row.value) << '\n';
  }
}

}  // namespace xmh
