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

#include "xmhash/dataio.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "xmhash/errors.h"
#include "xmhash/random.h"

namespace xmh {
namespace {

static_assert(std::endian::native == std::endian::little,
              "on-disk formats assume a little-endian host");

template <typename T>
void AppendLe(std::string* out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out->append(bytes, sizeof(T));
}

template <typename T>
T LoadLe(std::string_view bytes, std::size_t offset) {
  T value;
  std::memcpy(&value, bytes.data() + offset, sizeof(T));
  return value;
}

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::size_t DtypeBytes(Dtype dtype) {
  return dtype == Dtype::kF32 ? sizeof(float) : sizeof(double);
}

}  // namespace

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(buf).str();
}

void WriteFile(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void ValidateFinite(const RowMatrix& values, const std::string& context) {
  if (values.rows() < 1 || values.cols() < 1) {
    throw ValidationError(context + ": matrix must have at least one row and "
                          "one column, got " + std::to_string(values.rows()) +
                          "x" + std::to_string(values.cols()));
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (!std::isfinite(values(i, j))) {
        throw ValidationError(context + ": non-finite entry at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
}

std::string EncodeMatrix(const FeatureMatrix& m) {
  ValidateFinite(m.values, "write_matrix");
  const auto rows = static_cast<std::uint64_t>(m.rows());
  const auto cols = static_cast<std::uint64_t>(m.cols());
  std::string out;
  out.reserve(kMatrixHeaderBytes + rows * cols * DtypeBytes(m.dtype));
  out.append(kMatrixMagic);
  out.push_back(static_cast<char>(m.dtype));
  out.append(3, '\0');
  AppendLe(&out, rows);
  AppendLe(&out, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m.dtype == Dtype::kF32) {
        AppendLe(&out, static_cast<float>(m.values(i, j)));
      } else {
        AppendLe(&out, m.values(i, j));
      }
    }
  }
  return out;
}

FeatureMatrix DecodeMatrix(std::string_view bytes, std::size_t* consumed,
                           const std::string& context) {
  if (bytes.size() < kMatrixHeaderBytes) {
    throw FormatError(context + ": truncated AMX1 header");
  }
  if (bytes.substr(0, 4) != kMatrixMagic) {
    throw FormatError(context + ": bad magic, expected AMX1");
  }
  const auto dtype_byte = static_cast<std::uint8_t>(bytes[4]);
  if (dtype_byte > 1) {
    throw FormatError(context + ": unknown dtype " + std::to_string(dtype_byte));
  }
  if (bytes[5] != 0 || bytes[6] != 0 || bytes[7] != 0) {
    throw FormatError(context + ": reserved header bytes are not zero");
  }
  const auto dtype = static_cast<Dtype>(dtype_byte);
  const auto rows = LoadLe<std::uint64_t>(bytes, 8);
  const auto cols = LoadLe<std::uint64_t>(bytes, 16);
  if (rows == 0 || cols == 0) {
    throw ValidationError(context + ": zero-sized dimension");
  }
  const std::size_t width = DtypeBytes(dtype);
  const std::uint64_t limit =
      (bytes.size() - kMatrixHeaderBytes) / width;
  if (rows > limit || cols > limit || rows * cols > limit) {
    throw FormatError(context + ": payload holds " + std::to_string(limit) +
                      " values, header declares " + std::to_string(rows) +
                      "x" + std::to_string(cols));
  }
  FeatureMatrix m;
  m.dtype = dtype;
  m.values.resize(static_cast<Eigen::Index>(rows),
                  static_cast<Eigen::Index>(cols));
  std::size_t offset = kMatrixHeaderBytes;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m.values(i, j) = dtype == Dtype::kF32
                           ? static_cast<double>(LoadLe<float>(bytes, offset))
                           : LoadLe<double>(bytes, offset);
      offset += width;
    }
  }
  ValidateFinite(m.values, context);
  *consumed = offset;
  return m;
}

FeatureMatrix ParseCsvMatrix(std::string_view text, const std::string& context) {
  std::vector<double> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = Trim(line);
    if (line.empty()) continue;
    Eigen::Index count = 0;
    while (true) {
      const auto comma = line.find(',');
      const std::string_view field = Trim(line.substr(0, comma));
      values.push_back(ParseReal(field, context + " line " +
                                            std::to_string(line_no)));
      ++count;
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (cols >= 0 && count != cols) {
      throw FormatError(context + ": line " + std::to_string(line_no) +
                        " has " + std::to_string(count) + " fields, expected " +
                        std::to_string(cols));
    }
    cols = count;
    ++rows;
  }
  if (rows == 0) throw ValidationError(context + ": empty CSV matrix");
  FeatureMatrix m;
  m.values = Eigen::Map<const RowMatrix>(values.data(), rows, cols);
  ValidateFinite(m.values, context);
  return m;
}

FeatureMatrix ReadMatrix(const std::filesystem::path& path) {
  const std::string bytes = ReadFile(path);
  if (bytes.starts_with(kMatrixMagic)) {
    std::size_t consumed = 0;
    FeatureMatrix m = DecodeMatrix(bytes, &consumed, path.string());
    if (consumed != bytes.size()) {
      throw FormatError(path.string() + ": " +
                        std::to_string(bytes.size() - consumed) +
                        " trailing bytes after AMX1 payload");
    }
    return m;
  }
  return ParseCsvMatrix(bytes, path.string());
}

void WriteMatrix(const FeatureMatrix& m, const std::filesystem::path& path) {
  WriteFile(path, EncodeMatrix(m));
}

RawLabelMatrix ValidateLabels(Matrix values, const std::string& context) {
  if (values.rows() < 1 || values.cols() < 1) {
    throw ValidationError(context + ": empty label matrix");
  }
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    bool any = false;
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
      const double v = values(i, j);
      if (v != 0.0 && v != 1.0) {
        throw ValidationError(context + ": non-binary label entry at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
      any = any || v == 1.0;
    }
    if (!any) {
      throw ValidationError(context + ": unlabeled instance at column " +
                            std::to_string(j));
    }
  }
  return RawLabelMatrix{std::move(values)};
}

RawLabelMatrix ReadLabels(const std::filesystem::path& path) {
  FeatureMatrix m = ReadMatrix(path);
  return ValidateLabels(Matrix(m.values), path.string());
}

void WriteLabels(const RawLabelMatrix& labels, const std::filesystem::path& path) {
  FeatureMatrix m;
  m.values = labels.values;
  WriteMatrix(m, path);
}

// ---------------------------------------------------------------------------
// Model archive

const std::vector<std::string>& RequiredSections() {
  static const std::vector<std::string> names = {
      "V",         "R",         "M",         "B",
      "P_1",       "P_2",       "Ph_1",      "Ph_2",
      "anchors_1", "anchors_2", "kcenter_1", "kcenter_2"};
  return names;
}

const std::vector<std::string>& RequiredMetaKeys() {
  static const std::vector<std::string> keys = {
      "r",       "omega",   "lambda_1", "lambda_2", "lambda_h",   "sigma_1",
      "sigma_2", "k_1",     "k_2",      "seed",     "iterations", "objective_history"};
  return keys;
}

const FeatureMatrix& ModelArchive::section(std::string_view name) const {
  for (const auto& [key, m] : sections) {
    if (key == name) return m;
  }
  throw FormatError("model archive has no section \"" + std::string(name) + "\"");
}

bool ModelArchive::has_section(std::string_view name) const {
  return std::any_of(sections.begin(), sections.end(),
                     [&](const auto& s) { return s.first == name; });
}

const std::string& ModelArchive::meta_value(std::string_view key) const {
  const auto it = meta.find(std::string(key));
  if (it == meta.end()) {
    throw FormatError("model archive metadata lacks \"" + std::string(key) + "\"");
  }
  return it->second;
}

namespace {

void CheckArchiveSchema(const ModelArchive& archive, const std::string& context) {
  const auto& required = RequiredSections();
  std::set<std::string> seen;
  for (const auto& [name, m] : archive.sections) {
    if (name == "meta") {
      throw FormatError(context + ": \"meta\" is reserved for metadata");
    }
    if (std::find(required.begin(), required.end(), name) == required.end()) {
      throw FormatError(context + ": unknown section \"" + name + "\"");
    }
    if (!seen.insert(name).second) {
      throw FormatError(context + ": duplicate section \"" + name + "\"");
    }
  }
  for (const auto& name : required) {
    if (!seen.contains(name)) {
      throw FormatError(context + ": missing mandatory section \"" + name + "\"");
    }
  }
  const auto& keys = RequiredMetaKeys();
  for (const auto& key : keys) {
    if (!archive.meta.contains(key)) {
      throw FormatError(context + ": missing metadata key \"" + key + "\"");
    }
  }
  for (const auto& [key, value] : archive.meta) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw FormatError(context + ": unknown metadata key \"" + key + "\"");
    }
  }
}

}  // namespace

std::string EncodeArchive(const ModelArchive& archive) {
  CheckArchiveSchema(archive, "save_model");
  std::string out(kArchiveMagic);
  AppendLe(&out, static_cast<std::uint32_t>(archive.sections.size() + 1));
  for (const auto& [name, m] : archive.sections) {
    AppendLe(&out, static_cast<std::uint32_t>(name.size()));
    out.append(name);
    out.append(EncodeMatrix(m));
  }
  const std::string meta_name = "meta";
  const std::string text = FormatKeyValues(archive.meta);
  AppendLe(&out, static_cast<std::uint32_t>(meta_name.size()));
  out.append(meta_name);
  AppendLe(&out, static_cast<std::uint64_t>(text.size()));
  out.append(text);
  return out;
}

ModelArchive DecodeArchive(std::string_view bytes, const std::string& context) {
  if (bytes.size() < 8) throw FormatError(context + ": truncated archive header");
  if (bytes.substr(0, 3) == kArchiveMagic.substr(0, 3) &&
      bytes.substr(0, 4) != kArchiveMagic) {
    throw FormatError(context + ": archive version mismatch, found \"" +
                      std::string(bytes.substr(0, 4)) + "\", this build reads \"" +
                      std::string(kArchiveMagic) + "\"");
  }
  if (bytes.substr(0, 4) != kArchiveMagic) {
    throw FormatError(context + ": bad magic, expected AMH1");
  }
  const auto count = LoadLe<std::uint32_t>(bytes, 4);
  std::size_t offset = 8;
  ModelArchive archive;
  bool have_meta = false;
  for (std::uint32_t s = 0; s < count; ++s) {
    if (have_meta) throw FormatError(context + ": section after \"meta\"");
    if (bytes.size() - offset < 4) throw FormatError(context + ": truncated section");
    const auto name_len = LoadLe<std::uint32_t>(bytes, offset);
    offset += 4;
    if (bytes.size() - offset < name_len) {
      throw FormatError(context + ": truncated section name");
    }
    std::string name(bytes.substr(offset, name_len));
    offset += name_len;
    if (name == "meta") {
      if (bytes.size() - offset < 8) throw FormatError(context + ": truncated meta");
      const auto len = LoadLe<std::uint64_t>(bytes, offset);
      offset += 8;
      if (bytes.size() - offset < len) throw FormatError(context + ": truncated meta");
      archive.meta = ParseKeyValues(bytes.substr(offset, len), context + " meta");
      offset += len;
      have_meta = true;
      continue;
    }
    std::size_t used = 0;
    FeatureMatrix m =
        DecodeMatrix(bytes.substr(offset), &used, context + " section " + name);
    offset += used;
    archive.sections.emplace_back(std::move(name), std::move(m));
  }
  if (!have_meta) throw FormatError(context + ": missing final \"meta\" section");
  if (offset != bytes.size()) {
    throw FormatError(context + ": trailing bytes after archive");
  }
  CheckArchiveSchema(archive, context);
  return archive;
}

void SaveModel(const ModelArchive& archive, const std::filesystem::path& path) {
  WriteFile(path, EncodeArchive(archive));
}

ModelArchive LoadModel(const std::filesystem::path& path) {
  return DecodeArchive(ReadFile(path), path.string());
}

// ---------------------------------------------------------------------------
// key=value text and number formatting

std::map<std::string, std::string> ParseKeyValues(std::string_view text,
                                                  const std::string& context) {
  std::map<std::string, std::string> kv;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = Trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError(context + ": line " + std::to_string(line_no) +
                        " is not key=value");
    }
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw FormatError(context + ": empty key on line " + std::to_string(line_no));
    }
    if (!kv.emplace(key, std::move(value)).second) {
      throw FormatError(context + ": duplicate key \"" + key + "\"");
    }
  }
  return kv;
}

std::string FormatKeyValues(const std::map<std::string, std::string>& kv) {
  std::string out;
  for (const auto& [key, value] : kv) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

std::string FormatReal(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, res.ptr);
  if (std::isfinite(value) &&
      s.find_first_of(".e") == std::string::npos) {
    s += ".0";
  }
  return s;
}

double ParseReal(std::string_view text, const std::string& context) {
  text = Trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() ||
      res.ptr != text.data() + text.size()) {
    throw FormatError(context + ": cannot parse \"" + std::string(text) +
                      "\" as a real number");
  }
  return value;
}

std::int64_t ParseInt(std::string_view text, const std::string& context) {
  text = Trim(text);
  std::int64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc() ||
      res.ptr != text.data() + text.size()) {
    throw FormatError(context + ": cannot parse \"" + std::string(text) +
                      "\" as an integer");
  }
  return value;
}

std::string FormatRealList(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += FormatReal(values[i]);
  }
  return out;
}

std::vector<double> ParseRealList(std::string_view text,
                                  const std::string& context) {
  std::vector<double> out;
  text = Trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(ParseReal(text.substr(0, comma), context));
    if (comma == std::string_view::npos) break;
    text = text.substr(comma + 1);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

namespace {

RowMatrix SeparatedCentroids(std::int64_t c, std::int64_t d, Rng& rng,
                             const std::string& context) {
  constexpr double kRadius = 2.0;
  constexpr double kMinSeparation = 2.0;
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    RowMatrix centroids = GaussianMatrix(c, d, rng);
    bool ok = true;
    for (Eigen::Index i = 0; i < c && ok; ++i) {
      const double norm = centroids.row(i).norm();
      if (norm == 0.0) {
        ok = false;
        break;
      }
      centroids.row(i) *= kRadius / norm;
      for (Eigen::Index j = 0; j < i; ++j) {
        if ((centroids.row(i) - centroids.row(j)).norm() < kMinSeparation) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return centroids;
  }
  throw ValidationError(context + ": cannot place " + std::to_string(c) +
                        " centroids pairwise >= 2 apart in dimension " +
                        std::to_string(d));
}

}  // namespace

SyntheticData GenerateSynthetic(std::int64_t n, std::int64_t c, std::int64_t d1,
                                std::int64_t d2, double noise,
                                std::uint64_t seed) {
  if (c < 2) throw ValidationError("synthetic: need c >= 2 classes");
  if (n < c) {
    throw ValidationError("synthetic: need n >= c, got n=" + std::to_string(n) +
                          " c=" + std::to_string(c));
  }
  if (d1 < 1 || d2 < 1) throw ValidationError("synthetic: dimensions must be >= 1");
  if (!(noise >= 0.0) || !std::isfinite(noise)) {
    throw ValidationError("synthetic: noise must be finite and >= 0");
  }
  Rng rng(DeriveSeed(seed, SeedStream::kSynthetic));
  const RowMatrix c1 = SeparatedCentroids(c, d1, rng, "synthetic modality 1");
  const RowMatrix c2 = SeparatedCentroids(c, d2, rng, "synthetic modality 2");

  SyntheticData data;
  data.classes.resize(static_cast<std::size_t>(n));
  std::uniform_int_distribution<std::int64_t> pick(0, c - 1);
  for (auto& k : data.classes) k = static_cast<int>(pick(rng));

  data.labels.values = Matrix::Zero(c, n);
  data.x1.values.resize(n, d1);
  data.x2.values.resize(n, d2);
  data.x1.modality_id = 1;
  data.x2.modality_id = 2;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = data.classes[static_cast<std::size_t>(i)];
    data.labels.values(k, i) = 1.0;
    for (Eigen::Index j = 0; j < d1; ++j) {
      data.x1.values(i, j) = c1(k, j) + noise * normal(rng);
    }
    for (Eigen::Index j = 0; j < d2; ++j) {
      data.x2.values(i, j) = c2(k, j) + noise * normal(rng);
    }
  }
  return data;
}

}  // namespace xmh
