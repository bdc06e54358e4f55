#include <doctest.h>

#include <bit>
#include <cstring>
#include <fstream>

#include "mvcca/common.hpp"
#include "mvcca/matrixio.hpp"
#include "mvcca/rng.hpp"
#include "test_util.hpp"

using namespace mvcca;

namespace {

FeatureMatrix make_matrix(std::size_t rows, std::size_t cols, MatrixKind kind,
                          const std::string& source) {
  FeatureMatrix m;
  m.values = Matrix(rows, cols);
  SplitRng rng(rows * 1000 + cols);
  for (double& v : m.values.data()) v = rng.next_uniform(-5.0, 5.0);
  m.kind = kind;
  m.source_id = source;
  return m;
}

void write_wav_file(const std::string& path, const std::vector<std::int16_t>& samples,
                    std::uint32_t rate, std::uint16_t channels, std::uint16_t bits,
                    std::uint16_t format = 1) {
  std::ofstream out(path, std::ios::binary);
  auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  out.write("RIFF", 4);
  u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(bits);
  out.write("data", 4);
  u32(data_bytes);
  for (std::int16_t s : samples) out.write(reinterpret_cast<const char*>(&s), 2);
}

}  // namespace

TEST_CASE("fmx golden byte fixture: 1x1 matrix [42.0]") {
  FeatureMatrix m;
  m.values = Matrix(1, 1);
  m.values(0, 0) = 42.0;
  m.kind = MatrixKind::spectrogram;
  const auto bytes = io::encode_fmx(m);
  REQUIRE(bytes.size() == 35);  // 4+4+8+8+1+2+0+8

  const std::uint8_t expected[35] = {
      'F', 'M', 'X', '1',            // magic
      1, 0, 0, 0,                    // version u32 LE
      1, 0, 0, 0, 0, 0, 0, 0,        // rows u64 LE
      1, 0, 0, 0, 0, 0, 0, 0,        // cols u64 LE
      0,                             // kind = spectrogram
      0, 0,                          // source_id length
      0, 0, 0, 0, 0, 0, 0x45, 0x40,  // 42.0 as float64 LE
  };
  CHECK(std::memcmp(bytes.data(), expected, 35) == 0);
}

TEST_CASE("fmx payload size matches the analysis dimensions") {
  const FeatureMatrix m = make_matrix(257, 126, MatrixKind::spectrogram, "");
  const auto bytes = io::encode_fmx(m);
  // 27-byte header (empty source_id) + data payload
  CHECK(bytes.size() == 27 + 257 * 126 * 8);
  CHECK(257 * 126 * 8 == 259056);
}

TEST_CASE("fmx round trip is bit exact") {
  testutil::TempDir dir("fmx");
  const FeatureMatrix m = make_matrix(5, 7, MatrixKind::embedding, "clip-17");
  const std::string path = dir.file("m.fmx");
  io::write_fmx(m, path);
  const FeatureMatrix back = io::read_fmx(path);
  CHECK(back.values == m.values);
  CHECK(back.kind == m.kind);
  CHECK(back.source_id == m.source_id);
}

TEST_CASE("fmx rejects bad magic, truncation, and non-finite data") {
  testutil::TempDir dir("fmxbad");
  const FeatureMatrix m = make_matrix(3, 3, MatrixKind::reduced, "x");
  auto bytes = io::encode_fmx(m);

  SUBCASE("bad magic") {
    bytes[3] = '2';  // "FMX2"
    CHECK_THROWS_AS(io::decode_fmx(bytes), FormatError);
  }
  SUBCASE("truncated payload") {
    bytes.resize(bytes.size() - 8);  // 8 of 9 values remain
    CHECK_THROWS_AS(io::decode_fmx(bytes), FormatError);
  }
  SUBCASE("NaN entry") {
    FeatureMatrix bad = m;
    bad.values(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(io::encode_fmx(bad), ValidationError);
    // Craft the bytes directly so the reader path is exercised too.
    const std::size_t data_start = 27 + m.source_id.size();
    auto nan_bits = std::bit_cast<std::uint64_t>(std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < 8; ++i)
      bytes[data_start + i] = static_cast<std::uint8_t>(nan_bits >> (8 * i));
    CHECK_THROWS_AS(io::decode_fmx(bytes), ValidationError);
  }
  SUBCASE("empty matrix is rejected before writing") {
    FeatureMatrix empty;
    CHECK_THROWS_AS(io::write_fmx(empty, dir.file("e.fmx")), ValidationError);
  }
}

TEST_CASE("manifest parses labels case-insensitively and resolves paths") {
  testutil::TempDir dir("manifest");
  io::write_fmx(make_matrix(2, 2, MatrixKind::embedding, ""), dir.file("a.fmx"));
  io::write_fmx(make_matrix(2, 2, MatrixKind::embedding, ""), dir.file("b.fmx"));
  {
    std::ofstream out(dir.file("m.csv"));
    out << "speaker_id,label,path\n";
    out << "s1,0,a.fmx\n";
    out << "s2,Pathological,b.fmx\n";
  }
  const io::Manifest m = io::read_manifest(dir.file("m.csv"));
  REQUIRE(m.entries.size() == 2);
  CHECK(m.entries[0].label == io::Label::neurotypical);
  CHECK(m.entries[1].label == io::Label::pathological);
  CHECK(m.entries[0].path.find(dir.str()) == 0);  // resolved against the dir
}

TEST_CASE("manifest rejects unknown labels with the line number") {
  testutil::TempDir dir("manifestbad");
  io::write_fmx(make_matrix(2, 2, MatrixKind::embedding, ""), dir.file("a.fmx"));
  {
    std::ofstream out(dir.file("m.csv"));
    out << "speaker_id,label,path\n";
    out << "s1,PD,a.fmx\n";
  }
  try {
    io::read_manifest(dir.file("m.csv"));
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("manifest rejects duplicates and missing files") {
  testutil::TempDir dir("manifestdup");
  io::write_fmx(make_matrix(2, 2, MatrixKind::embedding, ""), dir.file("a.fmx"));
  SUBCASE("duplicate row") {
    std::ofstream out(dir.file("m.csv"));
    out << "speaker_id,label,path\ns1,0,a.fmx\ns1,0,a.fmx\n";
    out.close();
    CHECK_THROWS_AS(io::read_manifest(dir.file("m.csv")), FormatError);
  }
  SUBCASE("unresolvable path") {
    std::ofstream out(dir.file("m.csv"));
    out << "speaker_id,label,path\ns1,0,missing.fmx\n";
    out.close();
    CHECK_THROWS_AS(io::read_manifest(dir.file("m.csv")), ValidationError);
  }
}

TEST_CASE("manifest handles a full 100-speaker roster") {
  testutil::TempDir dir("manifest100");
  io::write_fmx(make_matrix(2, 2, MatrixKind::embedding, ""), dir.file("seg.fmx"));
  {
    std::ofstream out(dir.file("m.csv"));
    out << "speaker_id,label,path\n";
    for (int i = 0; i < 50; ++i) out << "nt" << i << ",neurotypical,seg.fmx\n";
    for (int i = 0; i < 50; ++i) out << "pd" << i << ",pathological,seg.fmx\n";
  }
  const io::Manifest m = io::read_manifest(dir.file("m.csv"));
  std::size_t counts[2] = {0, 0};
  for (const auto& e : m.entries) counts[static_cast<int>(e.label)]++;
  CHECK(counts[0] == 50);
  CHECK(counts[1] == 50);
}

TEST_CASE("wav reader scales int16 onto [-1, 1)") {
  testutil::TempDir dir("wav");
  write_wav_file(dir.file("tone.wav"), {16384, -32768, 0, 32767}, 16000, 1, 16);
  const io::AudioClip clip = io::read_wav(dir.file("tone.wav"));
  REQUIRE(clip.samples.size() == 4);
  CHECK(clip.sample_rate == 16000);
  CHECK(clip.samples[0] == doctest::Approx(0.5));
  CHECK(clip.samples[1] == doctest::Approx(-1.0));
  CHECK(clip.samples[2] == doctest::Approx(0.0));
  CHECK(clip.samples[3] == doctest::Approx(32767.0 / 32768.0));
}

TEST_CASE("wav reader keeps 8000 samples of a 16 kHz clip") {
  testutil::TempDir dir("wav8000");
  std::vector<std::int16_t> samples(8000, 1000);
  write_wav_file(dir.file("c.wav"), samples, 16000, 1, 16);
  const io::AudioClip clip = io::read_wav(dir.file("c.wav"));
  CHECK(clip.samples.size() == 8000);
  CHECK(clip.sample_rate == 16000);
}

TEST_CASE("wav reader rejects stereo, non-PCM, and wrong bit depth") {
  testutil::TempDir dir("wavbad");
  write_wav_file(dir.file("stereo.wav"), {0, 0}, 44100, 2, 16);
  CHECK_THROWS_AS(io::read_wav(dir.file("stereo.wav")), FormatError);
  write_wav_file(dir.file("float.wav"), {0, 0}, 16000, 1, 16, 3);
  CHECK_THROWS_AS(io::read_wav(dir.file("float.wav")), FormatError);
  write_wav_file(dir.file("deep.wav"), {0, 0}, 16000, 1, 24);
  CHECK_THROWS_AS(io::read_wav(dir.file("deep.wav")), FormatError);
}
