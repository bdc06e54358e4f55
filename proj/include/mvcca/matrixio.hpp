#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvcca/matrix.hpp"

namespace mvcca::io {

enum class Label : int {
  neurotypical = 0,
  pathological = 1,
};

struct ManifestEntry {
  std::string speaker_id;
  Label label = Label::neurotypical;
  std::string path;  // resolved against the manifest's directory when relative
};

struct Manifest {
  std::vector<ManifestEntry> entries;
};

struct AudioClip {
  std::vector<double> samples;  // in [-1, 1)
  std::uint32_t sample_rate = 0;
};

// FMX1 container: magic "FMX1", u32 LE version 1, u64 LE rows, u64 LE cols,
// u8 kind, u16 LE source_id length + UTF-8 bytes, then rows*cols float64 LE
// row-major. Fixed little-endian on every platform.
void write_fmx(const FeatureMatrix& m, const std::string& path);
FeatureMatrix read_fmx(const std::string& path);

// In-memory codec behind the file functions; used for byte-fixture tests.
std::vector<std::uint8_t> encode_fmx(const FeatureMatrix& m);
FeatureMatrix decode_fmx(const std::vector<std::uint8_t>& bytes);

// CSV with header "speaker_id,label,path". Labels are matched
// case-insensitively against {neurotypical, pathological} and accept "0"/"1".
// Relative paths resolve against the manifest's directory and must exist.
Manifest read_manifest(const std::string& path);
void write_manifest(const Manifest& manifest, const std::string& path);

// RIFF/WAVE, PCM 16-bit mono only; samples are scaled by 1/32768.
AudioClip read_wav(const std::string& path);

std::string label_name(Label label);

}  // namespace mvcca::io
