#pragma once

#include "swarm/stp.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace swarm {

class KeyValueConfig;

struct SolverSettings {
  /// Gradient evaluations; 0 returns the (possibly repaired) initial guess.
  int max_iterations = 25;
  /// Feasibility tolerance on every signed violation.
  double tolerance = 1e-3;
  /// Forward-difference step; 0 means 1e-2 * area length scale.
  double fd_step = 0.0;
  /// Largest coordinate move of the first line-search trial.
  double trust_radius = 1.0;
  double min_trust_radius = 1e-3;
  int line_search_steps = 6;
  /// Consecutive failed line searches before stopping.
  int stagnation_limit = 3;
  double gradient_tolerance = 1e-9;
  double initial_penalty = 10.0;
  double penalty_growth = 2.0;
  double max_penalty = 1e4;
  /// Initial guesses violating any constraint by more than this are refused.
  double repair_limit = 5.0;
  int restoration_iterations = 2000;
  unsigned threads = 0;
};

struct OptimizationProblem {
  const Classifier* classifier = nullptr;
  EngagementConfig engagement;
  DefenderMotionPlan plan;
  TrajectoryLimits limits;
  /// N_t; 0 uses the model window.
  std::size_t horizon = 0;
  SolverSettings solver;

  std::size_t steps() const;
  /// Throws std::invalid_argument on inconsistent sizes or limits.
  void validate() const;

  /// Problem file keys: motion, ramp, horizon, area (x0,y0,x1,y1,...),
  /// v_min, v_max, a_max, d_min, the SolverSettings fields, plus every
  /// engagement key. The plan is drawn from the engagement seed. The
  /// classifier is attached by the caller.
  static OptimizationProblem from_config(const KeyValueConfig& cfg);
  static std::vector<std::string_view> config_keys();
};

struct IterationRecord {
  int iteration = 0;
  double stp = 0.0;
  double max_violation = 0.0;
  double step = 0.0;
  double trust_radius = 0.0;
  double penalty = 0.0;
  std::size_t evaluations = 0;
  bool accepted = false;
};

struct OptimizationResult {
  TrajectoryMatrix guess;
  TrajectoryMatrix trajectory;
  PredictionStack initial_stack;
  PredictionStack stack;
  double initial_stp = 0.0;
  double optimized_stp = 0.0;
  ConstraintReport initial_violations;
  ConstraintReport violations;
  std::vector<IterationRecord> log;
  int iterations = 0;
  std::size_t evaluations = 0;
  /// True when the guess had to be moved onto the feasible set first.
  bool repaired = false;
  std::string termination;
};

/// Penalty/augmented-Lagrangian ascent on STP with forward-difference
/// gradients over rows 1..N_t-1. Every accepted iterate is feasible within
/// the tolerance and improves STP, so the result never falls below the
/// starting point. Throws NumericalError naming the violated families when
/// the guess cannot be repaired.
OptimizationResult optimize(const OptimizationProblem& problem);

struct CandidateScore {
  MotionType motion = MotionType::Star;
  bool ramp_to_max = false;
  PredictionStack stack;
  double stp = 0.0;
  double max_violation = 0.0;
  double path_length = 0.0;
};

/// Every motion for every ramp flag, drawn from the engagement seed.
std::vector<DefenderMotionPlan> candidate_plans(const EngagementConfig& cfg, const std::vector<bool>& ramp_flags);

/// Initial STP of each plan, best first; ties go to the lower violation and
/// then the shorter path.
std::vector<CandidateScore> evaluate_initial_trajectories(const OptimizationProblem& problem,
                                                          const std::vector<DefenderMotionPlan>& plans);

/// JSON summary of one run.
std::string result_json(const OptimizationProblem& problem, const OptimizationResult& result);

/// Writes <stem>.json, <stem>_defenders.csv and <stem>_adversaries_<tactic>.csv.
void write_result_bundle(const OptimizationProblem& problem, const OptimizationResult& result,
                         const std::filesystem::path& dir, const std::string& stem);

}  // namespace swarm
