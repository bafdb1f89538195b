#pragma once

#include "swarm/dataset.hpp"

#include <string>
#include <vector>

namespace swarm {

class KeyValueConfig;

enum class VoiDimension { DefenderNumber, DefenderMotion, Noise, DefenderNumberAndMotion };

std::string_view to_string(VoiDimension d);

/// A VOI experiment: one sub-dataset per grid point, all other variables at
/// the reference values in `base` / `reference`.
struct VoiSpec {
  std::string name = "experiment";
  VoiDimension dimension = VoiDimension::DefenderNumber;
  std::vector<VoiPoint> grid;
  VoiPoint reference;
  EngagementConfig base;
  int engagements_per_point = 150;
  /// Divides engagements_per_point; recorded in manifests.
  int desk_scale_factor = 1;
  std::uint64_t first_seed = 1;
  /// Generation refuses seeds above this value (they are reserved for evaluation).
  std::uint64_t reserved_seed_threshold = 1200;
  std::size_t min_rows = 20;
  std::uint64_t split_seed = 7;
  std::uint64_t noise_seed = 11;
  NoiseChannels noise_channels = NoiseChannels::All;
  SplitFractions fractions;
  unsigned threads = 0;

  int effective_engagements() const;
  void validate() const;

  /// Keys: name, dimension, defender_numbers, motions, noise_levels, ramp,
  /// engagements_per_point, desk_scale_factor, first_seed,
  /// reserved_seed_threshold, min_rows, split_seed, noise_seed, noise_channels,
  /// plus every EngagementConfig key for the reference engagement.
  static VoiSpec from_config(const KeyValueConfig& cfg);
};

struct VoiExperiment {
  VoiSpec spec;
  std::vector<VoiPoint> points;
  std::vector<DatasetSplit> parts;  // unscaled, truncated to the common step count
  DatasetSplit combined;            // unscaled
  ScalerStats scaler;               // fitted on combined.train
  GenerationReport report;
};

/// Generates and splits every sub-dataset, truncates all of them to the
/// common minimum length, combines the splits, and fits the shared scaler on
/// the combined training split. Noise points reuse the reference sub-dataset
/// (same split) with independently seeded noise per split and level.
VoiExperiment build_voi_experiment(const VoiSpec& spec);

/// Manifest entries describing the experiment grid.
Manifest describe(const VoiSpec& spec);

}  // namespace swarm
