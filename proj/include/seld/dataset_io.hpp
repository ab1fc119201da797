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


#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "seld/types.hpp"

namespace seld {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// WAV

enum class WavSampleFormat { Int16, Int24, Int32, Float32 };

/// Reads a 4-channel, 24 kHz PCM or IEEE-float WAV. Integer samples are
/// scaled by 2^-(bits-1), so int16 -32768 maps to -1.0. Never resamples
/// and never reorders channels.
MultichannelClip read_foa_wav(const fs::path& path);
MultichannelClip parse_foa_wav(std::string_view bytes);

void write_wav(const fs::path& path, const MultichannelClip& clip,
               WavSampleFormat format = WavSampleFormat::Float32);
std::string encode_wav(const MultichannelClip& clip, WavSampleFormat format);

/// Throws WrongChannelCount / WrongSampleRate / TooShort / InvalidArgument.
void validate_clip(const MultichannelClip& clip);

// ---------------------------------------------------------------------------
// Label CSV: frame,class,source,azimuth,elevation

EventList read_label_csv(const fs::path& path, int n_classes = kNumClasses);
EventList parse_label_csv(std::istream& in, int n_classes = kNumClasses);
void write_label_csv(const EventList& events, const fs::path& path);
void format_label_csv(const EventList& events, std::ostream& out);

/// Sorts by (frame, class, azimuth, elevation), wraps azimuth into
/// [-180, 180), sets azimuth 0 at the poles and drops exact duplicate rows.
EventList canonicalize(EventList events);
void validate_events(const EventList& events, int n_classes = kNumClasses);

double wrap_azimuth(double degrees);

// ---------------------------------------------------------------------------
// SLSA binary container
//
//   "SLSA" | u32 version=1 | u32 ndim | u64 dims[ndim] | f32 payload
//
// All integers and floats little-endian, payload row-major.

inline constexpr std::uint32_t kSlsaVersion = 1;

struct RawArray {
  std::vector<std::uint64_t> dims;
  std::vector<float> data;
};

std::string encode_slsa(const RawArray& array);
RawArray decode_slsa(std::string_view bytes);
void write_slsa(const RawArray& array, const fs::path& path);
RawArray read_slsa(const fs::path& path);
bool has_slsa_magic(const fs::path& path);

void write_feature_file(const FeatureTensor& tensor, const fs::path& path);
FeatureTensor read_feature_file(const fs::path& path);

/// ACCDOA tensors go through the same container; values are narrowed to
/// 32-bit on disk.
void write_accdoa_file(const AccdoaTensor& tensor, const fs::path& path);
AccdoaTensor read_accdoa_file(const fs::path& path);

// ---------------------------------------------------------------------------
// Manifest: one entry per line, "audio[,labels[,split]]"; '#' starts a
// comment. Relative paths resolve against the manifest's directory.

struct ManifestEntry {
  fs::path audio;
  fs::path labels;
  std::string split;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  int n_classes = kNumClasses;
};

DatasetManifest read_manifest(const fs::path& path, int n_classes = kNumClasses);
DatasetManifest parse_manifest(std::istream& in, const fs::path& base_dir,
                               int n_classes = kNumClasses);

// ---------------------------------------------------------------------------

std::string read_file(const fs::path& path);
/// Writes to a sibling temp file then renames over the destination.
void write_file_atomic(const fs::path& path, std::string_view bytes);

}  // namespace seld
