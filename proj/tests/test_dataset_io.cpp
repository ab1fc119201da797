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


#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "doctest.h"

#include "seld/dataset_io.hpp"
#include "seld/rng.hpp"

using namespace seld;

namespace {

void put16(std::string& s, std::uint16_t v) {
  s += static_cast<char>(v & 0xff);
  s += static_cast<char>(v >> 8);
}
void put32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s += static_cast<char>((v >> (8 * i)) & 0xff);
}

// Hand-rolled 16-bit PCM RIFF file.
std::string pcm16_wav(int channels, int rate, const std::vector<std::int16_t>& interleaved) {
  std::string data;
  for (auto v : interleaved) put16(data, static_cast<std::uint16_t>(v));
  std::string s = "RIFF";
  put32(s, static_cast<std::uint32_t>(36 + data.size()));
  s += "WAVEfmt ";
  put32(s, 16);
  put16(s, 1);
  put16(s, static_cast<std::uint16_t>(channels));
  put32(s, static_cast<std::uint32_t>(rate));
  put32(s, static_cast<std::uint32_t>(rate * channels * 2));
  put16(s, static_cast<std::uint16_t>(channels * 2));
  put16(s, 16);
  s += "data";
  put32(s, static_cast<std::uint32_t>(data.size()));
  return s + data;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("seld_io_" + std::to_string(std::random_device{}()) + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvariantViolation;
}

}  // namespace

TEST_CASE("wav: int16 full scale normalizes to [-1, 1)") {
  std::vector<std::int16_t> pcm(4 * 600, 0);
  pcm[0] = -32768;
  pcm[1] = 32767;
  pcm[6] = 16384;
  const auto clip = parse_foa_wav(pcm16_wav(4, 24000, pcm));
  CHECK(clip.samples.rows() == 4);
  CHECK(clip.samples.cols() == 600);
  CHECK(clip.samples(0, 0) == -1.0f);
  CHECK(clip.samples(1, 0) == 32767.0f / 32768.0f);
  CHECK(clip.samples(2, 1) == 0.5f);
}

TEST_CASE("wav: channel count and sample rate are enforced") {
  std::vector<std::int16_t> pcm(2 * 600, 0);
  CHECK(code_of([&] { parse_foa_wav(pcm16_wav(2, 24000, pcm)); }) == Errc::WrongChannelCount);
  std::vector<std::int16_t> pcm4(4 * 600, 0);
  CHECK(code_of([&] { parse_foa_wav(pcm16_wav(4, 44100, pcm4)); }) == Errc::WrongSampleRate);
  CHECK(code_of([&] { parse_foa_wav("RIFX0000"); }) == Errc::MalformedWav);
  auto cut = pcm16_wav(4, 24000, pcm4);
  CHECK(code_of([&] { parse_foa_wav(cut.substr(0, 30)); }) == Errc::MalformedWav);
}

TEST_CASE("wav: encode/parse round trip for every sample format") {
  SeededRng rng(3);
  std::uniform_real_distribution<float> u(-0.9f, 0.9f);
  MultichannelClip clip;
  clip.samples.resize(4, 24000);
  for (Index i = 0; i < clip.samples.size(); ++i) clip.samples.data()[i] = u(rng);

  CHECK(parse_foa_wav(encode_wav(clip, WavSampleFormat::Float32)).samples == clip.samples);
  const auto i16 = parse_foa_wav(encode_wav(clip, WavSampleFormat::Int16));
  CHECK(i16.samples.cols() == 24000);
  CHECK((i16.samples - clip.samples).cwiseAbs().maxCoeff() <= 1.0f / 32768.0f);
  const auto i24 = parse_foa_wav(encode_wav(clip, WavSampleFormat::Int24));
  CHECK((i24.samples - clip.samples).cwiseAbs().maxCoeff() <= 1.0f / 8388608.0f + 1e-7f);
  const auto i32 = parse_foa_wav(encode_wav(clip, WavSampleFormat::Int32));
  CHECK((i32.samples - clip.samples).cwiseAbs().maxCoeff() <= 1e-7f);
}

TEST_CASE("labels: field mapping, ordering and azimuth wrap") {
  std::istringstream in("10,2,0,30,-10\n0,1,3,190,5\n\n");
  const EventList e = parse_label_csv(in);
  REQUIRE(e.size() == 2);
  CHECK(e[0] == Event{0, 1, -170.0, 5.0});
  CHECK(e[1] == Event{10, 2, 30.0, -10.0});

  std::istringstream empty("");
  CHECK(parse_label_csv(empty).empty());

  std::istringstream bad_class("0,15,0,0,0\n");
  CHECK(code_of([&] { parse_label_csv(bad_class, 13); }) == Errc::ClassOutOfRange);
  std::istringstream bad_row("0,1,0,abc,0\n");
  CHECK(code_of([&] { parse_label_csv(bad_row); }) == Errc::MalformedRow);
  std::istringstream short_row("0,1,0\n");
  CHECK(code_of([&] { parse_label_csv(short_row); }) == Errc::MalformedRow);
}

TEST_CASE("labels: writer emits frame,class,0,az,el and round trips") {
  std::ostringstream one;
  format_label_csv({{4, 7, -45.0, 12.0}}, one);
  CHECK(one.str() == "4,7,0,-45,12\n");

  std::ostringstream none;
  format_label_csv({}, none);
  CHECK(none.str().empty());

  TempDir dir;
  SeededRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    EventList e;
    std::uniform_int_distribution<int> frame(0, 200), cls(0, 12), az(-180, 179), el(-90, 90);
    const int n = std::uniform_int_distribution<int>(0, 40)(rng);
    for (int i = 0; i < n; ++i) e.push_back({frame(rng), cls(rng), double(az(rng)), double(el(rng))});
    e = canonicalize(e);
    write_label_csv(e, dir.path / "l.csv");
    CHECK(read_label_csv(dir.path / "l.csv") == e);
  }
}

TEST_CASE("slsa: byte layout, bitwise round trip and truncation") {
  TempDir dir;
  FeatureTensor t(7, 200, 10);
  SeededRng rng(5);
  std::normal_distribution<float> n(0.0f, 3.0f);
  for (Index i = 0; i < t.size(); ++i) t.values()[i] = n(rng);
  t.values()[0] = -0.0f;

  const auto path = dir.path / "f.slsa";
  write_feature_file(t, path);
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 4 + 3 * 8 + 7 * 200 * 10 * 4);

  const std::string bytes = read_file(path);
  CHECK(bytes.substr(0, 4) == "SLSA");
  CHECK(bytes[4] == 1);
  CHECK(bytes[8] == 3);
  CHECK(bytes[12] == 7);
  CHECK(bytes[20] == static_cast<char>(200));
  float first = 1.0f;
  std::memcpy(&first, bytes.data() + 36, 4);
  CHECK(std::signbit(first));

  const FeatureTensor back = read_feature_file(path);
  CHECK(back.shape() == t.shape());
  CHECK(std::memcmp(back.values().data(), t.values().data(), t.size() * sizeof(float)) == 0);

  CHECK(code_of([&] { decode_slsa(std::string_view(bytes).substr(0, bytes.size() - 1)); }) ==
        Errc::TruncatedPayload);
  CHECK(code_of([&] { decode_slsa(std::string_view(bytes).substr(0, 20)); }) == Errc::TruncatedPayload);
  CHECK(code_of([&] { decode_slsa(std::string(bytes) + "x"); }) == Errc::MalformedFile);
  std::string wrong = bytes;
  wrong[0] = 'X';
  CHECK(code_of([&] { decode_slsa(wrong); }) == Errc::BadMagic);
  wrong = bytes;
  wrong[4] = 2;
  CHECK(code_of([&] { decode_slsa(wrong); }) == Errc::VersionMismatch);
}

TEST_CASE("slsa: accdoa files keep their 3-axis shape") {
  TempDir dir;
  AccdoaTensor a(3, 13, 4);
  a(0, 2, 1) = 1.0;
  a(2, 5, 3) = -1.0;
  write_accdoa_file(a, dir.path / "a.slsa");
  CHECK(read_accdoa_file(dir.path / "a.slsa") == a);
  write_feature_file(FeatureTensor(7, 200, 2), dir.path / "f.slsa");
  CHECK(code_of([&] { read_accdoa_file(dir.path / "f.slsa"); }) == Errc::ShapeMismatch);
}

TEST_CASE("manifest: relative paths, comments and duplicates") {
  std::istringstream in("# audio,labels,split\nclip1.wav,clip1.csv,train\n/abs/clip2.wav\n\n");
  const DatasetManifest m = parse_manifest(in, "/data");
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].audio == std::filesystem::path("/data/clip1.wav"));
  CHECK(m.entries[0].labels == std::filesystem::path("/data/clip1.csv"));
  CHECK(m.entries[0].split == "train");
  CHECK(m.entries[1].audio == std::filesystem::path("/abs/clip2.wav"));
  CHECK(m.entries[1].labels.empty());

  std::istringstream dup("a.wav\na.wav\n");
  CHECK(code_of([&] { parse_manifest(dup, "/d"); }) == Errc::MalformedRow);
}

TEST_CASE("atomic write leaves no temp file behind") {
  TempDir dir;
  write_file_atomic(dir.path / "x.bin", "abc");
  write_file_atomic(dir.path / "x.bin", "defg");
  CHECK(read_file(dir.path / "x.bin") == "defg");
  int files = 0;
  for ([[maybe_unused]] auto& e : std::filesystem::directory_iterator(dir.path)) ++files;
  CHECK(files == 1);
  CHECK(code_of([&] { read_file(dir.path / "missing"); }) == Errc::IoError);
}
