#pragma once

#include "swarm/optimizer.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace swarm {

struct SweepCell {
  int num_defenders = 0;
  MotionType motion = MotionType::Star;
  bool ramp_to_max = false;
  OptimizationProblem problem;
  std::optional<OptimizationResult> result;
  /// Empty on success.
  std::string error;

  bool ok() const { return result.has_value(); }
  std::string label() const;
};

struct ContourPoint {
  int num_defenders = 0;
  /// Index into SweepResult::cells of the best cell, absent when every cell
  /// of this count failed.
  std::optional<std::size_t> best;
  double stp = 0.0;
};

struct SweepResult {
  std::uint64_t seed = 0;
  std::vector<int> defender_counts;
  std::vector<MotionType> motions;
  std::vector<bool> ramp_flags;
  std::vector<SweepCell> cells;
  /// One point per defender count: the column-wise maximum oSTP.
  std::vector<ContourPoint> contour;
};

struct DefenderSelection {
  int num_defenders = 0;
  MotionType motion = MotionType::Star;
  bool ramp_to_max = false;
  double stp = 0.0;
};

/// One optimize run per (count, ramp flag, motion) cell, in that nesting
/// order. A failing cell records its error; all cells failing throws
/// NumericalError.
SweepResult sweep(const OptimizationProblem& templ, const std::vector<int>& defender_counts,
                  const std::vector<MotionType>& motions, const std::vector<bool>& ramp_flags, unsigned threads = 0);

/// Smallest defender count whose contour value reaches `threshold`.
std::optional<DefenderSelection> min_defenders(const SweepResult& sweep, double threshold);

/// Long table: num_defenders,motion,ramp,initial_stp,optimized_stp,max_violation,iterations,status.
std::string sweep_grid_csv(const SweepResult& sweep);
/// Wide table for plotting: one row per count, one column per motion/ramp
/// series and a final `best` column.
std::string sweep_plot_csv(const SweepResult& sweep);
std::string selection_json(const SweepResult& sweep, const std::vector<double>& thresholds);

}  // namespace swarm
