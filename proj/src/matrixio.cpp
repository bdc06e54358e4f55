#include "mvcca/matrixio.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace mvcca::io {
namespace {

constexpr char kMagic[4] = {'F', 'M', 'X', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

class ByteReader {
 public:
  ByteReader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  std::uint8_t u8() {
    need(1);
    return data_[pos_++];
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(data_[pos_]) |
                      static_cast<std::uint16_t>(data_[pos_ + 1]) << 8;
    pos_ += 2;
    return v;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return size_ - pos_; }

 private:
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw FormatError("FMX1: truncated payload");
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::uint8_t> encode_fmx(const FeatureMatrix& m) {
  validate(m);
  if (m.source_id.size() > 0xFFFF)
    throw ArgumentError("FMX1: source_id longer than 65535 bytes");
  std::vector<std::uint8_t> out;
  out.reserve(35 + m.source_id.size() + 8 * m.values.size());
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  out.push_back(static_cast<std::uint8_t>(m.kind));
  put_u16(out, static_cast<std::uint16_t>(m.source_id.size()));
  out.insert(out.end(), m.source_id.begin(), m.source_id.end());
  for (double v : m.values.data()) put_f64(out, v);
  return out;
}

FeatureMatrix decode_fmx(const std::vector<std::uint8_t>& bytes) {
  ByteReader r(bytes.data(), bytes.size());
  if (r.bytes(4) != std::string(kMagic, 4))
    throw FormatError("FMX1: bad magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw FormatError("FMX1: unsupported version " + std::to_string(version));
  const std::uint64_t rows = r.u64();
  const std::uint64_t cols = r.u64();
  if (rows < 1 || cols < 1) throw FormatError("FMX1: degenerate shape");
  if (rows > (1ULL << 32) || cols > (1ULL << 32) || rows * cols > (1ULL << 34))
    throw FormatError("FMX1: implausible shape");
  const std::uint8_t kind = r.u8();
  if (kind > 2) throw FormatError("FMX1: unknown kind byte " + std::to_string(kind));
  const std::uint16_t id_len = r.u16();
  FeatureMatrix m;
  m.source_id = r.bytes(id_len);
  m.kind = static_cast<MatrixKind>(kind);
  m.values = Matrix(rows, cols);
  for (double& v : m.values.data()) v = r.f64();
  if (r.remaining() != 0) throw FormatError("FMX1: trailing bytes after payload");
  validate(m);
  return m;
}

void write_fmx(const FeatureMatrix& m, const std::string& path) {
  const std::vector<std::uint8_t> bytes = encode_fmx(m);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PersistenceError("cannot open for write: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw PersistenceError("write failed: " + path);
}

FeatureMatrix read_fmx(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PersistenceError("cannot open for read: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw PersistenceError("read failed: " + path);
  try {
    return decode_fmx(bytes);
  } catch (const FormatError& e) {
    throw FormatError(std::string(e.what()) + " (" + path + ")");
  }
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PersistenceError("cannot open manifest: " + path);
  const std::filesystem::path base = std::filesystem::path(path).parent_path();

  std::string line;
  if (!std::getline(in, line))
    throw FormatError("manifest: empty file: " + path);
  if (trim(line) != "speaker_id,label,path")
    throw FormatError("manifest: expected header \"speaker_id,label,path\": " + path);

  Manifest manifest;
  std::set<std::pair<std::string, std::string>> seen;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string speaker, label_token, file;
    if (!std::getline(ss, speaker, ',') || !std::getline(ss, label_token, ',') ||
        !std::getline(ss, file))
      throw FormatError("manifest line " + std::to_string(line_no) +
                        ": expected 3 comma-separated fields");
    speaker = trim(speaker);
    label_token = lowercase(trim(label_token));
    file = trim(file);
    if (speaker.empty())
      throw FormatError("manifest line " + std::to_string(line_no) + ": empty speaker_id");

    Label label;
    if (label_token == "neurotypical" || label_token == "0")
      label = Label::neurotypical;
    else if (label_token == "pathological" || label_token == "1")
      label = Label::pathological;
    else
      throw FormatError("manifest line " + std::to_string(line_no) +
                        ": unknown label token \"" + label_token + "\"");

    if (!seen.insert({speaker, file}).second)
      throw FormatError("manifest line " + std::to_string(line_no) +
                        ": duplicate (speaker_id, path) row");

    std::filesystem::path p(file);
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p))
      throw ValidationError("manifest line " + std::to_string(line_no) +
                            ": path does not resolve: " + p.string());
    manifest.entries.push_back({speaker, label, p.string()});
  }
  return manifest;
}

void write_manifest(const Manifest& manifest, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw PersistenceError("cannot open manifest for write: " + path);
  out << "speaker_id,label,path\n";
  for (const auto& e : manifest.entries)
    out << e.speaker_id << ',' << label_name(e.label) << ',' << e.path << '\n';
  if (!out) throw PersistenceError("manifest write failed: " + path);
}

AudioClip read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PersistenceError("cannot open for read: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  ByteReader r(bytes.data(), bytes.size());

  try {
    if (r.bytes(4) != "RIFF") throw FormatError("wav: missing RIFF header");
    r.u32();  // chunk size, unused
    if (r.bytes(4) != "WAVE") throw FormatError("wav: missing WAVE tag");

    bool have_fmt = false;
    std::uint16_t format = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;
    AudioClip clip;
    bool have_data = false;

    while (r.remaining() >= 8) {
      const std::string id = r.bytes(4);
      const std::uint32_t size = r.u32();
      if (id == "fmt ") {
        if (size < 16) throw FormatError("wav: fmt chunk too small");
        format = r.u16();
        channels = r.u16();
        rate = r.u32();
        r.u32();  // byte rate
        r.u16();  // block align
        bits = r.u16();
        if (size > 16) r.bytes(size - 16);
        have_fmt = true;
      } else if (id == "data") {
        if (!have_fmt) throw FormatError("wav: data chunk before fmt chunk");
        if (format != 1 || channels != 1 || bits != 16)
          throw FormatError(
              "wav: unsupported format (PCM 16-bit mono required): " + path);
        const std::size_t n = size / 2;
        clip.samples.resize(n);
        const std::string raw = r.bytes(size);
        for (std::size_t i = 0; i < n; ++i) {
          const auto lo = static_cast<std::uint8_t>(raw[2 * i]);
          const auto hi = static_cast<std::uint8_t>(raw[2 * i + 1]);
          const auto s = static_cast<std::int16_t>(
              static_cast<std::uint16_t>(lo) | static_cast<std::uint16_t>(hi) << 8);
          clip.samples[i] = static_cast<double>(s) / 32768.0;
        }
        have_data = true;
      } else {
        r.bytes(std::min<std::size_t>(size, r.remaining()));
      }
      if (size % 2 == 1 && r.remaining() > 0) r.u8();  // chunk padding
    }
    if (!have_fmt || !have_data)
      throw FormatError("wav: missing fmt or data chunk: " + path);
    if (format != 1 || channels != 1 || bits != 16)
      throw FormatError("wav: unsupported format (PCM 16-bit mono required): " + path);
    if (rate == 0) throw FormatError("wav: zero sample rate: " + path);
    clip.sample_rate = rate;
    return clip;
  } catch (const FormatError&) {
    throw;
  }
}

std::string label_name(Label label) {
  return label == Label::pathological ? "pathological" : "neurotypical";
}

}  // namespace mvcca::io
