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

#ifndef XMHASH_RANDOM_H_
#define XMHASH_RANDOM_H_

#include <cstdint>
#include <random>
#include <string_view>

#include "xmhash/types.h"

namespace xmh {

using Rng = std::mt19937_64;

// Sub-seeds for independent components, all derived from one user seed.
enum class SeedStream : std::uint64_t {
  kAnchors = 1,
  kWidthSample = 2,
  kInit = 3,
  kLatentCompletion = 4,
  kSynthetic = 5,
  kBaseline = 6,
};

// SplitMix64 finalizer over (seed, stream, index).
std::uint64_t DeriveSeed(std::uint64_t seed, SeedStream stream,
                         std::uint64_t index = 0);

Matrix GaussianMatrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace xmh

#endif  // XMHASH_RANDOM_H_
