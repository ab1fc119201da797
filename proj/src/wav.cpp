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


#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "seld/dataset_io.hpp"

namespace seld {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t load_u16(const char* p) {
  const auto* b = reinterpret_cast<const unsigned char*>(p);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t load_u32(const char* p) {
  const auto* b = reinterpret_cast<const unsigned char*>(p);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void store_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void store_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t block_align = 0;
  std::uint16_t bits = 0;
};

float decode_sample(const char* p, const FmtChunk& fmt) {
  switch (fmt.bits) {
    case 16: {
      auto v = static_cast<std::int16_t>(load_u16(p));
      return static_cast<float>(v) / 32768.0f;
    }
    case 24: {
      const auto* b = reinterpret_cast<const unsigned char*>(p);
      std::int32_t v = b[0] | (b[1] << 8) | (b[2] << 16);
      if (v & 0x800000) v -= 0x1000000;
      return static_cast<float>(static_cast<double>(v) / 8388608.0);
    }
    case 32: {
      std::uint32_t raw = load_u32(p);
      if (fmt.format == kFormatFloat) return std::bit_cast<float>(raw);
      return static_cast<float>(static_cast<double>(static_cast<std::int32_t>(raw)) / 2147483648.0);
    }
    default:
      throw Error(Errc::MalformedWav, "unsupported bit depth " + std::to_string(fmt.bits));
  }
}

}  // namespace

MultichannelClip parse_foa_wav(std::string_view bytes) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE")
    throw Error(Errc::MalformedWav, "missing RIFF/WAVE header");

  FmtChunk fmt;
  bool have_fmt = false;
  std::string_view payload;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    std::string_view id = bytes.substr(pos, 4);
    std::uint32_t len = load_u32(bytes.data() + pos + 4);
    std::size_t body = pos + 8;
    if (id == "data") {
      // Some writers leave the data length unset; take what is there.
      std::size_t avail = bytes.size() - body;
      payload = bytes.substr(body, std::min<std::size_t>(len, avail));
      have_data = true;
      if (have_fmt) break;
    } else if (id == "fmt ") {
      if (len < 16 || body + len > bytes.size()) throw Error(Errc::MalformedWav, "short fmt chunk");
      const char* p = bytes.data() + body;
      fmt.format = load_u16(p);
      fmt.channels = load_u16(p + 2);
      fmt.sample_rate = load_u32(p + 4);
      fmt.block_align = load_u16(p + 12);
      fmt.bits = load_u16(p + 14);
      if (fmt.format == kFormatExtensible) {
        if (len < 26) throw Error(Errc::MalformedWav, "short extensible fmt chunk");
        fmt.format = load_u16(p + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    }
    pos = body + len + (len & 1u);
  }
  if (!have_fmt) throw Error(Errc::MalformedWav, "no fmt chunk");
  if (!have_data) throw Error(Errc::MalformedWav, "no data chunk");

  if (fmt.format != kFormatPcm && fmt.format != kFormatFloat)
    throw Error(Errc::MalformedWav, "unsupported format tag " + std::to_string(fmt.format));
  if (fmt.format == kFormatFloat && fmt.bits != 32)
    throw Error(Errc::MalformedWav, "float WAV must be 32-bit");
  if (fmt.format == kFormatPcm && fmt.bits != 16 && fmt.bits != 24 && fmt.bits != 32)
    throw Error(Errc::MalformedWav, "unsupported PCM bit depth " + std::to_string(fmt.bits));
  if (fmt.channels != kNumFoaChannels)
    throw Error(Errc::WrongChannelCount, "expected 4 channels, got " + std::to_string(fmt.channels));
  if (fmt.sample_rate != static_cast<std::uint32_t>(kSampleRate))
    throw Error(Errc::WrongSampleRate, "expected 24000 Hz, got " + std::to_string(fmt.sample_rate));

  const std::size_t sample_bytes = fmt.bits / 8;
  const std::size_t frame_bytes = sample_bytes * fmt.channels;
  if (fmt.block_align != frame_bytes) throw Error(Errc::MalformedWav, "inconsistent block align");

  const Index n = static_cast<Index>(payload.size() / frame_bytes);
  MultichannelClip clip;
  clip.sample_rate = kSampleRate;
  clip.samples.resize(kNumFoaChannels, n);
  for (Index i = 0; i < n; ++i) {
    const char* frame = payload.data() + i * frame_bytes;
    for (Index c = 0; c < kNumFoaChannels; ++c) clip.samples(c, i) = decode_sample(frame + c * sample_bytes, fmt);
  }
  if (!clip.samples.allFinite()) throw Error(Errc::MalformedWav, "non-finite samples");
  return clip;
}

MultichannelClip read_foa_wav(const fs::path& path) {
  try {
    return parse_foa_wav(read_file(path));
  } catch (const Error& e) {
    if (e.code() == Errc::IoError) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string encode_wav(const MultichannelClip& clip, WavSampleFormat format) {
  const auto channels = static_cast<std::uint16_t>(clip.samples.rows());
  std::uint16_t bits = 32;
  std::uint16_t tag = kFormatPcm;
  switch (format) {
    case WavSampleFormat::Int16: bits = 16; break;
    case WavSampleFormat::Int24: bits = 24; break;
    case WavSampleFormat::Int32: bits = 32; break;
    case WavSampleFormat::Float32: bits = 32; tag = kFormatFloat; break;
  }
  const std::uint32_t block = channels * (bits / 8u);
  const auto n = static_cast<std::uint32_t>(clip.samples.cols());
  const std::uint32_t data_len = n * block;

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  store_u32(out, 36 + data_len);
  out += "WAVEfmt ";
  store_u32(out, 16);
  store_u16(out, tag);
  store_u16(out, channels);
  store_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  store_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * block);
  store_u16(out, static_cast<std::uint16_t>(block));
  store_u16(out, bits);
  out += "data";
  store_u32(out, data_len);

  auto quantize = [](float x, double scale, double lo, double hi) {
    return static_cast<std::int64_t>(std::clamp(std::nearbyint(static_cast<double>(x) * scale), lo, hi));
  };
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      const float x = clip.samples(c, i);
      switch (format) {
        case WavSampleFormat::Int16:
          store_u16(out, static_cast<std::uint16_t>(quantize(x, 32768.0, -32768.0, 32767.0)));
          break;
        case WavSampleFormat::Int24: {
          auto v = static_cast<std::uint32_t>(quantize(x, 8388608.0, -8388608.0, 8388607.0));
          for (int b = 0; b < 3; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
          break;
        }
        case WavSampleFormat::Int32:
          store_u32(out, static_cast<std::uint32_t>(quantize(x, 2147483648.0, -2147483648.0, 2147483647.0)));
          break;
        case WavSampleFormat::Float32:
          store_u32(out, std::bit_cast<std::uint32_t>(x));
          break;
      }
    }
  }
  return out;
}

void write_wav(const fs::path& path, const MultichannelClip& clip, WavSampleFormat format) {
  write_file_atomic(path, encode_wav(clip, format));
}

void validate_clip(const MultichannelClip& clip) {
  if (clip.samples.rows() != kNumFoaChannels)
    throw Error(Errc::WrongChannelCount, "expected 4 channels, got " + std::to_string(clip.samples.rows()));
  if (clip.sample_rate != kSampleRate)
    throw Error(Errc::WrongSampleRate, "expected 24000 Hz, got " + std::to_string(clip.sample_rate));
  if (clip.samples.cols() < kWindowLength)
    throw Error(Errc::TooShort, "clip shorter than one analysis window");
  if (!clip.samples.allFinite()) throw Error(Errc::InvalidArgument, "non-finite samples");
}

}  // namespace seld
