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

#include <cmath>
#include <random>

#include "test_util.h"
#include "xmhash/errors.h"
#include "xmhash/labelspace.h"

namespace xmh {
namespace {

TEST_CASE("normalized label columns") {
  Matrix l(3, 3);
  l << 1, 1, 1,
       0, 1, 1,
       0, 0, 1;
  const LabelSet s = NormalizeLabels(RawLabelMatrix{l});
  CHECK(s.g.col(0) == Vector::Unit(3, 0));
  CHECK(s.g(0, 1) == doctest::Approx(0.7071068).epsilon(1e-7));
  CHECK(s.g(1, 1) == doctest::Approx(0.7071068).epsilon(1e-7));
  CHECK(s.g(2, 1) == 0.0);
  CHECK(s.l == l);
}

TEST_CASE("unit norms and affinities in [0, 1] on random multi-label data") {
  std::mt19937_64 rng(1);
  const Matrix l = testing::RandomLabels(7, 80, rng, 0.4);
  const LabelSet s = NormalizeLabels(RawLabelMatrix{l});
  for (Eigen::Index i = 0; i < 80; ++i) {
    CHECK(std::abs(s.g.col(i).norm() - 1.0) <= 1e-12);
  }
  const Matrix block = SemanticAffinityBlock(s, {0, 80}, {0, 80});
  CHECK(block.minCoeff() >= 0.0);
  CHECK(block.maxCoeff() <= 1.0 + 1e-12);
  CHECK((block.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12);
}

TEST_CASE("identical label columns have affinity one") {
  Matrix l(3, 2);
  l << 1, 1, 0, 0, 1, 1;
  const LabelSet s = NormalizeLabels(RawLabelMatrix{l});
  CHECK(SemanticAffinityBlock(s, {0, 1}, {1, 2})(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("single-label disjoint classes are orthogonal") {
  Matrix l = Matrix::Zero(3, 6);
  for (int i = 0; i < 6; ++i) l(i % 3, i) = 1.0;
  const LabelSet s = NormalizeLabels(RawLabelMatrix{l});
  const Matrix block = SemanticAffinityBlock(s, {0, 3}, {0, 6});
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 6; ++j) CHECK(block(i, j) == (i == j % 3 ? 1.0 : 0.0));
  }
}

TEST_CASE("3-instance multi-label block by explicit dot products") {
  Matrix l(3, 3);
  l << 1, 1, 0,
       1, 0, 1,
       0, 1, 1;
  const LabelSet s = NormalizeLabels(RawLabelMatrix{l});
  const Matrix block = SemanticAffinityBlock(s, {0, 3}, {0, 3});
  // Columns {1,1,0}/sqrt2, {1,0,1}/sqrt2, {0,1,1}/sqrt2 overlap in one class.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      CHECK(block(i, j) == doctest::Approx(i == j ? 1.0 : 0.5).epsilon(1e-15));
    }
  }
  const Matrix sub = SemanticAffinityBlock(s, {1, 3}, {0, 1});
  CHECK(sub.rows() == 2);
  CHECK(sub.cols() == 1);
  CHECK(sub(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("out-of-range blocks") {
  const LabelSet s = NormalizeLabels(RawLabelMatrix{Matrix::Identity(2, 2)});
  CHECK_THROWS_AS(SemanticAffinityBlock(s, {0, 3}, {0, 1}), ValidationError);
  CHECK_THROWS_AS(SemanticAffinityBlock(s, {-1, 1}, {0, 1}), ValidationError);
  CHECK_THROWS_AS(SemanticAffinityBlock(s, {0, 1}, {2, 1}), ValidationError);
}

}  // namespace
}  // namespace xmh
