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

#ifndef XMHASH_DATAIO_H_
#define XMHASH_DATAIO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xmhash/types.h"

namespace xmh {

// AMX1 matrix file:
//   [0,4)   magic "AMX1"
//   [4]     dtype (0 = f32, 1 = f64)
//   [5,8)   zero
//   [8,16)  rows, u64 little-endian
//   [16,24) cols, u64 little-endian
//   payload rows*cols values, row-major, little-endian
inline constexpr std::string_view kMatrixMagic = "AMX1";
inline constexpr std::size_t kMatrixHeaderBytes = 24;

// Reads an AMX1 file, or a CSV of reals when the magic is absent.
FeatureMatrix ReadMatrix(const std::filesystem::path& path);
void WriteMatrix(const FeatureMatrix& m, const std::filesystem::path& path);

// In-memory forms of the above, used for archive sections.
std::string EncodeMatrix(const FeatureMatrix& m);
FeatureMatrix DecodeMatrix(std::string_view bytes, std::size_t* consumed,
                           const std::string& context);
FeatureMatrix ParseCsvMatrix(std::string_view text, const std::string& context);

// Labels are classes x instances, 0/1 entries, every instance labelled.
RawLabelMatrix ReadLabels(const std::filesystem::path& path);
RawLabelMatrix ValidateLabels(Matrix values, const std::string& context);
void WriteLabels(const RawLabelMatrix& labels, const std::filesystem::path& path);

// Throws ValidationError naming the first NaN/Inf entry or an empty shape.
void ValidateFinite(const RowMatrix& values, const std::string& context);

// Model archive "AMH1": magic, u32 section count, then per section a u32
// name length, the UTF-8 name and an embedded AMX1 blob. The last section,
// "meta", holds UTF-8 key=value lines instead of a matrix.
inline constexpr std::string_view kArchiveMagic = "AMH1";

struct ModelArchive {
  std::vector<std::pair<std::string, FeatureMatrix>> sections;
  std::map<std::string, std::string> meta;

  const FeatureMatrix& section(std::string_view name) const;
  bool has_section(std::string_view name) const;
  const std::string& meta_value(std::string_view key) const;
};

// Section names and metadata keys a trained two-modality model must carry.
const std::vector<std::string>& RequiredSections();
const std::vector<std::string>& RequiredMetaKeys();

void SaveModel(const ModelArchive& archive, const std::filesystem::path& path);
ModelArchive LoadModel(const std::filesystem::path& path);
std::string EncodeArchive(const ModelArchive& archive);
ModelArchive DecodeArchive(std::string_view bytes, const std::string& context);

// key=value lines. Blank lines and lines starting with '#' are skipped.
// Shared by the archive "meta" section and CLI config files.
std::map<std::string, std::string> ParseKeyValues(std::string_view text,
                                                  const std::string& context);
std::string FormatKeyValues(const std::map<std::string, std::string>& kv);

// Shortest text that parses back to the same double.
std::string FormatReal(double value);
double ParseReal(std::string_view text, const std::string& context);
std::int64_t ParseInt(std::string_view text, const std::string& context);
std::string FormatRealList(const std::vector<double>& values);
std::vector<double> ParseRealList(std::string_view text,
                                  const std::string& context);

struct SyntheticData {
  FeatureMatrix x1;       // n x d1
  FeatureMatrix x2;       // n x d2
  RawLabelMatrix labels;  // c x n, one class per instance
  std::vector<int> classes;
};

// Each instance draws a class uniformly; its modality-t feature is the
// class centroid of that modality plus N(0, noise^2) per coordinate.
// Centroids have norm 2 and are pairwise at least 2 apart.
SyntheticData GenerateSynthetic(std::int64_t n, std::int64_t c, std::int64_t d1,
                                std::int64_t d2, double noise,
                                std::uint64_t seed);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view bytes);

}  // namespace xmh

#endif  // XMHASH_DATAIO_H_
