#pragma once

#include "swarm/engagement.hpp"
#include "swarm/tactic.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace swarm {

/// Where an instance came from: engagement seed plus its VOI coordinates.
struct Provenance {
  std::uint64_t seed = 0;
  std::int32_t num_defenders = 0;
  std::int32_t motion = 0;
  std::int32_t ramp = 0;
  float noise_sigma = 0.0f;

  bool operator==(const Provenance&) const = default;
};

/// Free-form string metadata stored verbatim alongside a dataset.
using Manifest = std::map<std::string, std::string>;

/// Instances of shape [steps x features] stored contiguously as float32,
/// features ordered (x, y, vx, vy) per adversary.
struct LabeledDataset {
  std::size_t steps = 0;
  std::size_t features = 0;
  std::vector<float> values;
  std::vector<std::uint8_t> labels;
  std::vector<Provenance> provenance;
  Manifest manifest;

  std::size_t size() const { return labels.size(); }
  std::size_t instance_stride() const { return steps * features; }
  std::span<const float> instance(std::size_t i) const {
    return {values.data() + i * instance_stride(), instance_stride()};
  }
  std::span<float> instance(std::size_t i) { return {values.data() + i * instance_stride(), instance_stride()}; }

  /// Count per label 0..3.
  std::vector<std::size_t> class_counts() const;

  /// Keeps the first `steps` rows of every instance.
  void truncate(std::size_t new_steps);

  bool operator==(const LabeledDataset&) const = default;
};

/// Row-major [rows x 4 N_A] adversary feature matrix (x, y, vx, vy per agent).
std::vector<double> adversary_features(const EngagementRecord& rec);

/// One point on a VOI grid.
struct VoiPoint {
  int num_defenders = 10;
  MotionType motion = MotionType::Star;
  double noise_sigma = 0.0;
  bool ramp_to_max = false;

  std::string label() const;
};

struct SubDatasetRequest {
  EngagementConfig base;  // num_defenders and seed are overridden per engagement
  VoiPoint point;
  int engagements = 0;
  std::uint64_t first_seed = 1;
  /// Engagements shorter than this many rows are rejected.
  std::size_t min_rows = 20;
  unsigned threads = 0;
};

struct GenerationReport {
  std::size_t rejected_engagements = 0;
  std::vector<std::string> diagnostics;
};

/// Four instances (one per tactic, identical initialisation) per engagement
/// seed in [first_seed, first_seed + engagements), truncated to the shortest
/// accepted engagement. Noise in `point` is not applied here.
LabeledDataset generate_subdataset(const SubDatasetRequest& request, GenerationReport* report = nullptr);

/// Concatenates parts in order, truncating every instance to the minimum
/// step count. Throws std::invalid_argument on a feature-count mismatch.
LabeledDataset combine(std::vector<LabeledDataset> parts);

enum class NoiseChannels { All, PositionsOnly };

/// Adds independent N(0, sigma^2) to every entry (or only position entries).
/// Throws std::invalid_argument when sigma < 0.
LabeledDataset add_noise(const LabeledDataset& data, double sigma, std::uint64_t seed,
                         NoiseChannels channels = NoiseChannels::All);

struct ScalerStats {
  std::vector<double> mean;
  std::vector<double> variance;

  /// Stable hex digest of the statistics, used to detect scaler mismatches.
  std::string fingerprint() const;
  bool operator==(const ScalerStats&) const = default;
};

/// Per-feature mean and population variance over all instances and steps.
/// Throws std::invalid_argument naming any zero-variance feature.
ScalerStats fit_scaler(const LabeledDataset& data);

/// (x - mean) / sqrt(variance) per feature.
LabeledDataset apply_scaler(const LabeledDataset& data, const ScalerStats& stats);
void apply_scaler_inplace(std::span<double> rows, std::size_t features, const ScalerStats& stats);

struct SplitFractions {
  double train = 0.60;
  double validation = 0.15;
  double test = 0.25;
};

struct DatasetSplit {
  LabeledDataset train;
  LabeledDataset validation;
  LabeledDataset test;

  bool operator==(const DatasetSplit&) const = default;
};

/// Stratified split: each label's instances are shuffled with `seed` and cut
/// by the fractions. Throws std::invalid_argument when fractions do not sum
/// to 1 or a non-empty split would receive no instances of some label.
DatasetSplit split(const LabeledDataset& data, SplitFractions fractions, std::uint64_t seed);

/// Instances selected by index, in the given order.
LabeledDataset subset(const LabeledDataset& data, std::span<const std::size_t> indices);

}  // namespace swarm
