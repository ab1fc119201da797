// Copyright 2026 The seldkit Authors
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


#include "seld/dataset_io.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace seld {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::WrongChannelCount: return "WrongChannelCount";
    case Errc::WrongSampleRate: return "WrongSampleRate";
    case Errc::MalformedWav: return "MalformedWav";
    case Errc::ClassOutOfRange: return "ClassOutOfRange";
    case Errc::MalformedRow: return "MalformedRow";
    case Errc::IoError: return "IoError";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::TruncatedPayload: return "TruncatedPayload";
    case Errc::MalformedFile: return "MalformedFile";
    case Errc::TooShort: return "TooShort";
    case Errc::EmptyManifest: return "EmptyManifest";
    case Errc::ElevationOutOfRange: return "ElevationOutOfRange";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::SameClassOverlap: return "SameClassOverlap";
    case Errc::FrameOutOfRange: return "FrameOutOfRange";
    case Errc::EmptyEnsemble: return "EmptyEnsemble";
    case Errc::ShiftOutOfRange: return "ShiftOutOfRange";
    case Errc::NonAlignedOffset: return "NonAlignedOffset";
    case Errc::RatioOutOfRange: return "RatioOutOfRange";
    case Errc::Misaligned: return "Misaligned";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvariantViolation: return "InvariantViolation";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// files

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(Errc::IoError, "read failed: " + path.string());
  return std::move(ss).str();
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  static std::atomic<unsigned> counter{0};
  const auto tag = std::hash<std::thread::id>{}(std::this_thread::get_id()) ^ counter.fetch_add(1);
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(tag);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoError, "cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(Errc::IoError, "write failed: " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::IoError, "cannot rename into " + path.string());
  }
}

// ---------------------------------------------------------------------------
// labels

double wrap_azimuth(double degrees) {
  double a = std::fmod(degrees + 180.0, 360.0);
  if (a < 0.0) a += 360.0;
  a -= 180.0;
  if (a >= 180.0) a -= 360.0;
  return a;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

EventList canonicalize(EventList events) {
  for (Event& e : events) {
    e.azimuth = wrap_azimuth(e.azimuth);
    if (std::abs(e.elevation) == 90.0) e.azimuth = 0.0;  // azimuth is undefined at the poles
    if (e.azimuth == 0.0) e.azimuth = 0.0;  // fold -0
    if (e.elevation == 0.0) e.elevation = 0.0;
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());
  return events;
}

void validate_events(const EventList& events, int n_classes) {
  for (const Event& e : events) {
    if (e.frame < 0) throw Error(Errc::FrameOutOfRange, "negative frame index");
    if (e.class_id < 0 || e.class_id >= n_classes)
      throw Error(Errc::ClassOutOfRange, "class " + std::to_string(e.class_id));
    if (!std::isfinite(e.azimuth) || !std::isfinite(e.elevation))
      throw Error(Errc::InvalidArgument, "non-finite DoA");
    if (e.elevation < -90.0 || e.elevation > 90.0)
      throw Error(Errc::ElevationOutOfRange, "elevation " + format_double(e.elevation));
  }
}

EventList parse_label_csv(std::istream& in, int n_classes) {
  EventList events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (row.empty()) continue;
    auto fields = split(row, ',');
    auto bad = [&](const std::string& why) {
      return Error(Errc::MalformedRow, "line " + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 5) throw bad("expected 5 fields, got " + std::to_string(fields.size()));
    Event e;
    int source = 0;
    if (!parse_number(fields[0], e.frame) || !parse_number(fields[1], e.class_id) ||
        !parse_number(fields[2], source) || !parse_number(fields[3], e.azimuth) ||
        !parse_number(fields[4], e.elevation))
      throw bad("unparseable field");
    if (e.frame < 0) throw bad("negative frame");
    if (e.class_id < 0 || e.class_id >= n_classes)
      throw Error(Errc::ClassOutOfRange,
                  "line " + std::to_string(line_no) + ": class " + std::to_string(e.class_id));
    if (!std::isfinite(e.azimuth) || !std::isfinite(e.elevation) || e.elevation < -90.0 || e.elevation > 90.0)
      throw bad("DoA out of range");
    events.push_back(e);
  }
  return canonicalize(std::move(events));
}

EventList read_label_csv(const fs::path& path, int n_classes) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  try {
    return parse_label_csv(in, n_classes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void format_label_csv(const EventList& events, std::ostream& out) {
  for (const Event& e : events) {
    out << e.frame << ',' << e.class_id << ",0," << format_double(e.azimuth) << ','
        << format_double(e.elevation) << '\n';
  }
}

void write_label_csv(const EventList& events, const fs::path& path) {
  std::ostringstream ss;
  format_label_csv(events, ss);
  write_file_atomic(path, ss.str());
}

// ---------------------------------------------------------------------------
// SLSA container

namespace {

constexpr std::string_view kMagic = "SLSA";
constexpr std::uint32_t kMaxDims = 8;

template <typename U>
void put_le(std::string& out, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(std::string_view bytes, std::size_t offset) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i)
    v |= static_cast<U>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_slsa(const RawArray& array) {
  std::uint64_t count = 1;
  for (auto d : array.dims) count *= d;
  if (count != array.data.size()) throw Error(Errc::ShapeMismatch, "dims do not match payload size");
  if (array.dims.size() > kMaxDims) throw Error(Errc::InvalidArgument, "too many dims");

  std::string out;
  out.reserve(12 + 8 * array.dims.size() + 4 * array.data.size());
  out += kMagic;
  put_le<std::uint32_t>(out, kSlsaVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(array.dims.size()));
  for (auto d : array.dims) put_le<std::uint64_t>(out, d);
  for (float v : array.data) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  return out;
}

RawArray decode_slsa(std::string_view bytes) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != kMagic) throw Error(Errc::BadMagic, "not an SLSA file");
  if (bytes.size() < 12) throw Error(Errc::TruncatedPayload, "header cut short");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kSlsaVersion) throw Error(Errc::VersionMismatch, "version " + std::to_string(version));
  const auto ndim = get_le<std::uint32_t>(bytes, 8);
  if (ndim > kMaxDims) throw Error(Errc::MalformedFile, "ndim " + std::to_string(ndim));
  if (bytes.size() < 12 + 8ull * ndim) throw Error(Errc::TruncatedPayload, "dims cut short");

  RawArray array;
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    const auto d = get_le<std::uint64_t>(bytes, 12 + 8 * i);
    if (d != 0 && count > std::numeric_limits<std::uint64_t>::max() / 4 / d)
      throw Error(Errc::MalformedFile, "dims overflow");
    count *= d;
    array.dims.push_back(d);
  }
  const std::size_t offset = 12 + 8 * ndim;
  const std::uint64_t payload = bytes.size() - offset;
  if (payload < count * 4) throw Error(Errc::TruncatedPayload, "payload cut short");
  if (payload > count * 4) throw Error(Errc::MalformedFile, "trailing bytes after payload");
  array.data.resize(count);
  for (std::uint64_t i = 0; i < count; ++i)
    array.data[i] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset + 4 * i));
  return array;
}

void write_slsa(const RawArray& array, const fs::path& path) { write_file_atomic(path, encode_slsa(array)); }

RawArray read_slsa(const fs::path& path) {
  try {
    return decode_slsa(read_file(path));
  } catch (const Error& e) {
    if (e.code() == Errc::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

bool has_slsa_magic(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  char buf[4] = {};
  return in.read(buf, 4) && std::string_view(buf, 4) == kMagic;
}

namespace {

template <typename Scalar>
RawArray to_raw(const Tensor3<Scalar>& t) {
  RawArray raw;
  raw.dims = {static_cast<std::uint64_t>(t.channels()), static_cast<std::uint64_t>(t.bins()),
              static_cast<std::uint64_t>(t.frames())};
  raw.data.resize(static_cast<std::size_t>(t.size()));
  Eigen::Map<Eigen::ArrayXf>(raw.data.data(), t.size()) = t.values().template cast<float>();
  return raw;
}

template <typename Scalar>
Tensor3<Scalar> from_raw(const RawArray& raw) {
  if (raw.dims.size() != 3) throw Error(Errc::ShapeMismatch, "expected a rank-3 tensor");
  Tensor3<Scalar> t(static_cast<Index>(raw.dims[0]), static_cast<Index>(raw.dims[1]),
                    static_cast<Index>(raw.dims[2]));
  t.values() = Eigen::Map<const Eigen::ArrayXf>(raw.data.data(), t.size()).template cast<Scalar>();
  return t;
}

}  // namespace

void write_feature_file(const FeatureTensor& tensor, const fs::path& path) {
  if (!tensor.all_finite()) throw Error(Errc::InvalidArgument, "feature tensor has non-finite values");
  write_slsa(to_raw(tensor), path);
}

FeatureTensor read_feature_file(const fs::path& path) { return from_raw<float>(read_slsa(path)); }

void write_accdoa_file(const AccdoaTensor& tensor, const fs::path& path) {
  if (tensor.channels() != 3) throw Error(Errc::ShapeMismatch, "ACCDOA tensor must have 3 axes");
  write_slsa(to_raw(tensor), path);
}

AccdoaTensor read_accdoa_file(const fs::path& path) {
  auto t = from_raw<double>(read_slsa(path));
  if (t.channels() != 3) throw Error(Errc::ShapeMismatch, path.string() + ": ACCDOA tensor must have 3 axes");
  return t;
}

// ---------------------------------------------------------------------------
// manifest

DatasetManifest parse_manifest(std::istream& in, const fs::path& base_dir, int n_classes) {
  DatasetManifest manifest;
  manifest.n_classes = n_classes;
  std::string line;
  int line_no = 0;
  auto resolve = [&](std::string_view p) {
    fs::path path{std::string(p)};
    return path.is_relative() ? base_dir / path : path;
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view row = trim(line);
    if (auto hash = row.find('#'); hash != std::string_view::npos) row = trim(row.substr(0, hash));
    if (row.empty()) continue;
    auto fields = split(row, ',');
    if (fields.size() > 3 || fields[0].empty())
      throw Error(Errc::MalformedRow, "manifest line " + std::to_string(line_no));
    ManifestEntry entry;
    entry.audio = resolve(fields[0]);
    if (fields.size() > 1 && !fields[1].empty()) entry.labels = resolve(fields[1]);
    if (fields.size() > 2) entry.split = std::string(fields[2]);
    manifest.entries.push_back(std::move(entry));
  }
  for (std::size_t i = 0; i < manifest.entries.size(); ++i)
    for (std::size_t j = i + 1; j < manifest.entries.size(); ++j)
      if (manifest.entries[i].audio.lexically_normal() == manifest.entries[j].audio.lexically_normal())
        throw Error(Errc::MalformedRow, "duplicate manifest entry " + manifest.entries[i].audio.string());
  return manifest;
}

DatasetManifest read_manifest(const fs::path& path, int n_classes) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  return parse_manifest(in, path.parent_path(), n_classes);
}

}  // namespace seld
