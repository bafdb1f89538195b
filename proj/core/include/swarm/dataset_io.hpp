#pragma once

#include "swarm/dataset.hpp"

#include <filesystem>
#include <iosfwd>

namespace swarm {

/// Dataset file layout (all integers and floats little-endian):
///
///   magic      8 bytes  "SWDSET01"
///   manifest   u64 byte length, then a UTF-8 JSON object of string values
///   shape      u64 instances, u64 steps, u64 features
///   values     float32[instances * steps * features], instance-major
///   labels     u8[instances]
///   provenance instances x {u64 seed, i32 num_defenders, i32 motion,
///              i32 ramp, f32 noise_sigma}
///   trailer    8 bytes  "SWDSEND!"
///
/// Decoding failures throw FormatError whose section() is one of the names
/// above.
void save_dataset(const LabeledDataset& data, const std::filesystem::path& path);
LabeledDataset load_dataset(const std::filesystem::path& path);

void write_dataset(std::ostream& out, const LabeledDataset& data);
LabeledDataset read_dataset(std::istream& in);

/// Scaler statistics as JSON: {"mean": [...], "variance": [...], "fingerprint": "..."}.
/// Doubles are written with round-trip precision.
void save_scaler(const ScalerStats& stats, const std::filesystem::path& path);
ScalerStats load_scaler(const std::filesystem::path& path);

}  // namespace swarm
