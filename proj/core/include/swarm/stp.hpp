#pragma once

#include "swarm/engagement.hpp"
#include "swarm/model_io.hpp"
#include "swarm/polygon.hpp"
#include "swarm/tactic.hpp"
#include "swarm/trajectory.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace swarm {

/// Row k: class probabilities for the adversary response to tactic k.
struct PredictionStack {
  std::array<std::array<double, kNumTactics>, kNumTactics> p{};

  std::array<double, kNumTactics> true_predictions() const;
  bool operator==(const PredictionStack&) const = default;
};

/// Simulates every tactic against the fixed defender path, builds the
/// adversary feature matrix and classifies it. P_D must have at least as many
/// rows as the model window and one column pair per configured defender.
PredictionStack stack_predictions(const Classifier& classifier, const TrajectoryMatrix& defender_path,
                                  const EngagementConfig& cfg);

/// Sum of true predictions, 100 * trace, in [0, 400].
double stp(const PredictionStack& stack);

/// Open-loop motion-plan path from the engagement's initial defender positions.
TrajectoryMatrix initial_guess(const DefenderMotionPlan& plan, const EngagementConfig& cfg, std::size_t steps);

/// Kinematic and geometric limits of the trajectory problem.
struct TrajectoryLimits {
  OperationalArea area;
  double v_min = 0.0;
  double v_max = 1.0;
  double a_max = 0.5;
  double d_min = 0.5;
};

/// Signed violations (<= 0 feasible) by constraint family.
///
///   initial    |P(0) - P0| per defender
///   area       per (t, defender), t = 0..N_t-2
///   min_speed  V_min - |V(t)|, t = 0..N_t-2
///   max_speed  |V(t)| - V_max
///   max_accel  |A(t)| - A_max, t = 0..N_t-3
///   collision  d_min - |P_i(t) - P_j(t)| per pair, every row
struct ConstraintValues {
  std::vector<double> initial;
  std::vector<double> area;
  std::vector<double> min_speed;
  std::vector<double> max_speed;
  std::vector<double> max_accel;
  std::vector<double> collision;
};

struct ConstraintReport {
  double initial = 0.0;
  double area = 0.0;
  double min_speed = 0.0;
  double max_speed = 0.0;
  double max_accel = 0.0;
  double collision = 0.0;

  double max() const;
  /// Names of families whose worst value exceeds `tol`.
  std::vector<std::string> violated(double tol) const;
  std::string describe() const;
};

ConstraintValues constraint_eval(const TrajectoryMatrix& defender_path, std::span<const double> initial_row,
                                 const TrajectoryLimits& limits);

enum class ConstraintFamily { Area, MinSpeed, MaxSpeed, MaxAccel, Collision };

/// One scalar inequality g <= 0 with its gradient with respect to at most
/// three trajectory points.
struct ConstraintTerm {
  struct Partial {
    std::size_t row = 0;
    std::size_t agent = 0;
    Vec2 d;
  };
  ConstraintFamily family = ConstraintFamily::Area;
  double value = 0.0;
  std::array<Partial, 3> partials{};
  int count = 0;
};

/// Visits every path constraint (all families except the initial row) in a
/// fixed order. Used by constraint_eval and by the optimizer's penalty.
void for_each_constraint(const TrajectoryMatrix& defender_path, const TrajectoryLimits& limits,
                         const std::function<void(const ConstraintTerm&)>& fn);

/// Per-family maximum; an empty family reports -inf.
ConstraintReport summarize(const ConstraintValues& v);

/// Sum of per-defender polyline lengths.
double path_length(const TrajectoryMatrix& path);

}  // namespace swarm
