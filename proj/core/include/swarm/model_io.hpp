#pragma once

#include "swarm/cnn.hpp"
#include "swarm/dataset.hpp"

#include <filesystem>
#include <iosfwd>

namespace swarm {

/// A trained network together with the scaling it was trained under.
struct Classifier {
  CnnModel model;
  ScalerStats scaler;

  /// Scales a raw [rows x features] feature matrix, crops it to the window
  /// and returns class probabilities.
  std::vector<double> classify(std::span<const double> raw_rows, std::size_t rows) const;

  bool operator==(const Classifier&) const = default;
};

/// Model file layout (little-endian):
///
///   magic   8 bytes "SWCNN001"
///   spec    u32 window, u32 features, u32 classes, u32 pool, f64 dropout,
///           u32 conv layers, then u32 filters + u32 kernel per layer
///   weights u64 count, f64[count] in CnnModel::parameters() order
///   scaler  u64 features, f64 mean[features], f64 variance[features]
///   trailer 8 bytes "SWCNNEND"
void save_classifier(const Classifier& c, const std::filesystem::path& path);
Classifier load_classifier(const std::filesystem::path& path);
void write_classifier(std::ostream& out, const Classifier& c);
Classifier read_classifier(std::istream& in);

}  // namespace swarm
