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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "oracles.h"
#include "test_util.h"
#include "xmhash/dataio.h"
#include "xmhash/errors.h"
#include "xmhash/retrieval.h"

namespace xmh {
namespace {

using testing::NaiveDistance;
using testing::NaiveEvaluate;
using testing::NaiveMap;
using testing::NaiveRank;
using testing::NaiveRelevant;
using testing::TempDir;

CodeSet FromBitString(const std::vector<std::string>& codes) {
  CodeSet out(static_cast<std::int64_t>(codes.size()),
              static_cast<int>(codes.at(0).size()));
  for (std::size_t i = 0; i < codes.size(); ++i) {
    for (std::size_t j = 0; j < codes[i].size(); ++j) {
      out.set_bit(static_cast<std::int64_t>(i), static_cast<int>(j), codes[i][j] == '1');
    }
  }
  return out;
}

CodeSet RandomCodes(std::int64_t n, int r, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  Matrix signs(r, n);
  for (Eigen::Index i = 0; i < signs.size(); ++i) signs.data()[i] = coin(rng) ? 1 : -1;
  return CodeSet::FromSigns(signs);
}

// Single-label one-hot matrix (c x n) with uniform random classes.
Matrix RandomClassLabels(int c, std::int64_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, c - 1);
  Matrix l = Matrix::Zero(c, n);
  for (std::int64_t i = 0; i < n; ++i) l(pick(rng), i) = 1.0;
  return l;
}

TEST_CASE("hamming distance") {
  const CodeSet c = FromBitString({"10110010", "00111010", "01001101"});
  CHECK(Hamming(c.code(0), c.code(0)) == 0);
  CHECK(Hamming(c.code(0), c.code(2)) == 8);  // complement
  CHECK(Hamming(c.code(0), c.code(1)) == 2);  // xor 10001000

  std::mt19937_64 rng(1);
  for (const int r : {1, 16, 63, 64, 65, 128, 200}) {
    const CodeSet codes = RandomCodes(30, r, rng);
    const Matrix signs = codes.ToSigns();
    for (std::int64_t i = 0; i < 30; ++i) {
      // Unused high bits stay clear.
      if (r % 64) CHECK((codes.code(i).back() >> (r % 64)) == 0);
      for (std::int64_t j = 0; j < 30; ++j) {
        const int d = Hamming(codes.code(i), codes.code(j));
        CHECK(d == NaiveDistance(signs, i, signs, j));
        CHECK(d == Hamming(codes.code(j), codes.code(i)));
        const std::int64_t k = (i * 7 + j) % 30;
        CHECK(d <= Hamming(codes.code(i), codes.code(k)) +
                       Hamming(codes.code(k), codes.code(j)));
      }
    }
  }
  const CodeSet a = RandomCodes(1, 64, rng);
  const CodeSet b = RandomCodes(1, 65, rng);
  CHECK_THROWS_AS(Hamming(a.code(0), b.code(0)), ValidationError);
}

TEST_CASE("sign packing") {
  Matrix s(3, 2);
  s << 1, -1, 0, -0.0, -2, 5;
  const CodeSet c = CodeSet::FromSigns(s);
  CHECK(c.bit(0, 0));
  CHECK(c.bit(0, 1));  // sign(0) = +1
  CHECK_FALSE(c.bit(0, 2));
  CHECK_FALSE(c.bit(1, 0));
  CHECK(c.bit(1, 1));
  CHECK(c.bit(1, 2));
  CHECK(c.words()[0] == 0b011);
}

TEST_CASE("hamming ranking") {
  std::mt19937_64 rng(2);
  const CodeSet db = RandomCodes(200, 32, rng);
  SUBCASE("the query itself ranks first") {
    const auto order = RankByHamming(db.code(57), db);
    CHECK(order.front() == 57);
  }
  SUBCASE("equidistant items keep index order") {
    const CodeSet same = FromBitString({"1100", "1100", "1100", "1100"});
    const CodeSet q = FromBitString({"0011"});
    CHECK(RankByHamming(q.code(0), same) == std::vector<std::int64_t>{0, 1, 2, 3});
  }
  SUBCASE("matches a full sort") {
    const Matrix signs = db.ToSigns();
    const CodeSet queries = RandomCodes(20, 32, rng);
    const Matrix qs = queries.ToSigns();
    for (std::int64_t q = 0; q < 20; ++q) {
      const auto order = RankByHamming(queries.code(q), db);
      CHECK(order == NaiveRank(qs, q, signs));
      std::vector<std::int64_t> sorted = order;
      std::sort(sorted.begin(), sorted.end());
      std::vector<std::int64_t> ids(200);
      std::iota(ids.begin(), ids.end(), 0);
      CHECK(sorted == ids);
    }
  }
  SUBCASE("empty database") {
    CHECK(RankByHamming(db.code(0), CodeSet(0, 32)).empty());
  }
}

TEST_CASE("relevance is symmetric") {
  std::mt19937_64 rng(3);
  const Matrix a = testing::RandomLabels(6, 20, rng);
  const Matrix b = testing::RandomLabels(6, 30, rng);
  const RelevanceJudge ab(a, b), ba(b, a);
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 30; ++j) {
      CHECK(ab.relevant(i, j) == ba.relevant(j, i));
      CHECK(ab.relevant(i, j) == NaiveRelevant(a, i, b, j));
    }
  }
  CHECK_THROWS_AS(RelevanceJudge(a, Matrix::Ones(5, 3)), ValidationError);
  // More than 64 classes spans several mask words.
  Matrix wide_q = Matrix::Zero(130, 1), wide_d = Matrix::Zero(130, 2);
  wide_q(129, 0) = 1;
  wide_d(129, 1) = 1;
  wide_d(3, 0) = 1;
  const RelevanceJudge wide(wide_q, wide_d);
  CHECK_FALSE(wide.relevant(0, 0));
  CHECK(wide.relevant(0, 1));
}

TEST_CASE("average precision") {
  // Query 0 has class 0; database items alternate class 0 / class 1.
  Matrix lq = Matrix::Zero(2, 1);
  lq(0, 0) = 1;
  Matrix ld = Matrix::Zero(2, 4);
  ld(0, 0) = ld(1, 1) = ld(0, 2) = ld(1, 3) = 1;
  const RelevanceJudge judge(lq, ld);
  const std::vector<std::int64_t> ranked = {0, 1, 2, 3};
  const ApResult ap = AveragePrecision(ranked, judge, 0, 4);
  CHECK(ap.ap == doctest::Approx(0.833333).epsilon(1e-6));
  CHECK(ap.ap == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(ap.relevant_retrieved == 2);

  const std::vector<std::int64_t> perfect = {0, 2, 1, 3};
  CHECK(AveragePrecision(perfect, judge, 0, 2).ap == 1.0);
  CHECK(AveragePrecision(perfect, judge, 0, 4).ap == 1.0);

  const std::vector<std::int64_t> worst = {1, 3, 0, 2};
  const ApResult none = AveragePrecision(worst, judge, 0, 2);
  CHECK(none.ap == 0.0);
  CHECK(none.empty_ground_truth);
  CHECK_THROWS_AS(AveragePrecision(worst, judge, 0, 5), ValidationError);
}

TEST_CASE("mAP and top-N match brute force") {
  std::mt19937_64 rng(4);
  const std::vector<std::int64_t> ns = {1, 10, 50, 100, 300};
  for (int pattern = 0; pattern < 10; ++pattern) {
    const CodeSet queries = RandomCodes(50, 16, rng);
    const CodeSet db = RandomCodes(300, 16, rng);
    const Matrix lq = testing::RandomLabels(8, 50, rng, 0.15);
    const Matrix ld = testing::RandomLabels(8, 300, rng, 0.15);
    const RelevanceJudge judge(lq, ld);
    const NaiveMap naive = NaiveEvaluate(queries, db, lq, ld, ns);
    const MapResult map = MeanAveragePrecision(queries, db, judge);
    CHECK(map.map == naive.map);
    CHECK(map.map >= 0.0);
    CHECK(map.map <= 1.0);
    const auto curve = TopNPrecisionCurve(queries, db, judge, ns);
    for (std::size_t p = 0; p < ns.size(); ++p) {
      CHECK(curve[p].first == ns[p]);
      CHECK(curve[p].second == naive.topn[p]);
    }
  }
}

TEST_CASE("mAP edge cases") {
  const CodeSet db = FromBitString({"0000", "1111", "0011"});
  const CodeSet q = FromBitString({"0001", "1110"});
  Matrix ld = Matrix::Zero(3, 3);
  ld(0, 0) = ld(1, 1) = ld(0, 2) = 1;
  Matrix lq = Matrix::Zero(3, 2);
  lq(0, 0) = 1;
  lq(2, 1) = 1;  // class 2 absent from the database
  const RelevanceJudge judge(lq, ld);
  const MapResult excluded = MeanAveragePrecision(q, db, judge);
  CHECK(excluded.evaluated == 1);
  CHECK(excluded.excluded == 1);
  CHECK(excluded.map == 1.0);
  const MapResult included = MeanAveragePrecision(q, db, judge, 0, true);
  CHECK(included.evaluated == 2);
  CHECK(included.map == 0.5);

  Matrix lq_absent = Matrix::Zero(3, 2);
  lq_absent.row(2).setOnes();
  CHECK_THROWS_AS(MeanAveragePrecision(q, db, RelevanceJudge(lq_absent, ld)),
                  ValidationError);
  CHECK_THROWS_AS(MeanAveragePrecision(FromBitString({"00010"}), db,
                                       RelevanceJudge(lq.leftCols(1), ld)),
                  ValidationError);
  CHECK_THROWS_AS(MeanAveragePrecision(q, db, judge, 4), ValidationError);
}

TEST_CASE("single query with a perfect ranking") {
  const CodeSet db = FromBitString({"1010", "0101", "1011"});
  const CodeSet q = FromBitString({"1010"});
  Matrix ld = Matrix::Zero(2, 3);
  ld(0, 0) = ld(1, 1) = ld(0, 2) = 1;
  Matrix lq = Matrix::Zero(2, 1);
  lq(0, 0) = 1;
  CHECK(MeanAveragePrecision(q, db, RelevanceJudge(lq, ld)).map == 1.0);
}

TEST_CASE("top-N precision") {
  std::mt19937_64 rng(5);
  SUBCASE("everything relevant") {
    const CodeSet db = RandomCodes(40, 8, rng);
    const CodeSet q = RandomCodes(5, 8, rng);
    const std::vector<std::int64_t> ns = {40};
    const auto curve = TopNPrecisionCurve(q, db, RelevanceJudge(Matrix::Ones(1, 5),
                                                                Matrix::Ones(1, 40)),
                                          ns);
    CHECK(curve[0].second == 1.0);
  }
  SUBCASE("relevant items closer than irrelevant ones") {
    // Relevant items share the query code, irrelevant ones are its complement.
    CodeSet db(30, 16);
    CodeSet q(1, 16);
    Matrix ld = Matrix::Zero(2, 30);
    for (int i = 0; i < 30; ++i) {
      const bool rel = i % 3 == 0;
      ld(rel ? 0 : 1, i) = 1;
      for (int j = 0; j < 16; ++j) db.set_bit(i, j, rel ? (j % 2) : !(j % 2));
    }
    for (int j = 0; j < 16; ++j) q.set_bit(0, j, j % 2);
    Matrix lq = Matrix::Zero(2, 1);
    lq(0, 0) = 1;
    const std::vector<std::int64_t> ns = {1, 5, 10, 11};
    const auto curve = TopNPrecisionCurve(q, db, RelevanceJudge(lq, ld), ns);
    CHECK(curve[0].second == 1.0);
    CHECK(curve[1].second == 1.0);
    CHECK(curve[2].second == 1.0);
    CHECK(curve[3].second == doctest::Approx(10.0 / 11.0));
  }
  SUBCASE("random relevance stays near its base rate") {
    const double p = 0.25;
    const CodeSet db = RandomCodes(2000, 32, rng);
    const CodeSet q = RandomCodes(200, 32, rng);
    std::bernoulli_distribution coin(p);
    // Each database item gets class 0 with probability p, class 1 otherwise;
    // every query has class 0.
    Matrix ld = Matrix::Zero(2, 2000);
    for (int i = 0; i < 2000; ++i) ld(coin(rng) ? 0 : 1, i) = 1;
    Matrix lq = Matrix::Zero(2, 200);
    lq.row(0).setOnes();
    const std::vector<std::int64_t> ns = {100};
    const auto curve = TopNPrecisionCurve(q, db, RelevanceJudge(lq, ld), ns);
    // Sampling of the database relevance alone: sd = sqrt(p(1-p)/100) per
    // query; averaging over correlated queries is bounded by that.
    const double sigma = std::sqrt(p * (1 - p) / 100.0);
    CHECK(std::abs(curve[0].second - p) <= 3 * sigma);
  }
  SUBCASE("N out of range") {
    const CodeSet db = RandomCodes(10, 8, rng);
    const CodeSet q = RandomCodes(2, 8, rng);
    const RelevanceJudge judge(Matrix::Ones(1, 2), Matrix::Ones(1, 10));
    const std::vector<std::int64_t> big = {11};
    const std::vector<std::int64_t> zero = {0};
    CHECK_THROWS_AS(TopNPrecisionCurve(q, db, judge, big), ValidationError);
    CHECK_THROWS_AS(TopNPrecisionCurve(q, db, judge, zero), ValidationError);
  }
}

TEST_CASE("ABC1 code files") {
  TempDir dir;
  std::mt19937_64 rng(6);
  for (const int r : {8, 64, 100}) {
    const CodeSet codes = RandomCodes(17, r, rng);
    WriteCodes(codes, dir / "c.abc");
    CHECK(ReadCodes(dir / "c.abc") == codes);
    CHECK(std::filesystem::file_size(dir / "c.abc") ==
          4 + 8 + 4 + 17 * static_cast<std::uintmax_t>((r + 63) / 64) * 8);
  }
  const CodeSet tiny = FromBitString({"1011"});
  WriteCodes(tiny, dir / "t.abc");
  const std::string bytes = ReadFile(dir / "t.abc");
  const std::string expected("ABC1\x01\0\0\0\0\0\0\0\x04\0\0\0\x0d\0\0\0\0\0\0\0", 24);
  CHECK(bytes == expected);

  WriteFile(dir / "bad.abc", "ABCX" + bytes.substr(4));
  CHECK_THROWS_AS(ReadCodes(dir / "bad.abc"), FormatError);
  WriteFile(dir / "short.abc", bytes.substr(0, 20));
  CHECK_THROWS_AS(ReadCodes(dir / "short.abc"), FormatError);
  std::string high = bytes;
  high[16] = static_cast<char>(0x1d);  // bit 4 set with r = 4
  WriteFile(dir / "high.abc", high);
  CHECK_THROWS_AS(ReadCodes(dir / "high.abc"), FormatError);
}

TEST_CASE("metrics CSV") {
  std::ostringstream out;
  const std::vector<MetricRow> rows = {{"map", "i2t", 16, 1.0},
                                       {"precision@50", "t2i", 16, 0.25}};
  WriteMetricsCsv(out, rows);
  CHECK(out.str() == "metric,task,bits,value\nmap,i2t,16,1.0\nprecision@50,t2i,16,0.25\n");
}

}  // namespace
}  // namespace xmh
