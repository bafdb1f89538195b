#pragma once

#include "swarm/guidance.hpp"
#include "swarm/tactic.hpp"
#include "swarm/trajectory.hpp"
#include "swarm/vec2.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace swarm {

class KeyValueConfig;

/// Engagement setup. The HVU sits at the origin and adversaries approach
/// along the 45 degree threat axis.
struct EngagementConfig {
  int num_defenders = 10;
  int num_adversaries = 10;
  double dt = 1.0;
  int max_steps = 60;

  double defender_min_speed = 0.25;
  double defender_max_speed = 1.0;
  double defender_max_accel = 0.5;
  double adversary_max_speed = 2.0;
  double adversary_max_accel = 0.5;

  double separation = 170.0;
  double defender_dispersion = 10.0;
  double adversary_dispersion = 10.0;
  /// Rejection-sampling spacing between initial defender positions.
  double defender_min_spacing = 1.0;
  double capture_radius = 2.0;

  std::uint64_t seed = 1;

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;

  Vec2 adversary_center() const;

  static EngagementConfig from_config(const KeyValueConfig& cfg);
  static std::vector<std::string_view> config_keys();
};

struct DefenderMotionPlan {
  MotionType motion = MotionType::Star;
  std::vector<double> headings;  // radians
  std::vector<double> speeds;
  bool ramp_to_max = false;
};

/// Heading interval for a motion type in degrees (equal bounds for the fixed
/// heading motions).
std::pair<double, double> heading_interval_deg(MotionType motion);

/// Per-defender heading and speed draws: speed uniform in [v_min, v_max];
/// Star headings uniform in [0, 90] deg, Semi in [-45, 135] deg, Straight
/// 45 deg, PerpL 135 deg, PerpR -45 deg.
DefenderMotionPlan generate_motion_plan(MotionType motion, int num_defenders, double v_min, double v_max,
                                        std::uint64_t seed, bool ramp_to_max = false);

/// Motion plan drawn from the engagement seed's plan stream.
DefenderMotionPlan motion_plan_for(const EngagementConfig& cfg, MotionType motion, bool ramp_to_max = false);

struct EngagementState {
  std::vector<AgentState> defenders;
  std::vector<AgentState> adversaries;

  std::vector<Vec2> defender_positions() const;
  std::vector<Vec2> adversary_positions() const;
  bool operator==(const EngagementState&) const = default;
};

/// Independent deterministic random streams derived from one engagement seed.
enum class SeedStream : std::uint64_t { Adversaries = 1, Defenders = 2, MotionPlan = 3, Noise = 4, Split = 5 };
std::mt19937_64 make_rng(std::uint64_t seed, SeedStream stream, std::uint64_t salt = 0);

/// Initial positions sampled in disks; defender velocities from `plan`
/// (zero when the plan ramps, or when no plan is given); adversaries at rest.
EngagementState init_engagement(const EngagementConfig& cfg, const DefenderMotionPlan* plan = nullptr);

/// Open-loop acceleration that realises `plan` from the current defender state.
std::vector<Vec2> plan_accelerations(const DefenderMotionPlan& plan, std::span<const AgentState> defenders,
                                     const EngagementConfig& cfg);

/// Per-step diagnostics from `step`.
struct StepTrace {
  std::vector<int> targets;
  std::vector<Vec2> adversary_accels;
  std::vector<char> defender_clipped;
  std::vector<char> adversary_clipped;
};

/// One double-integrator step for both groups:
/// V(t+1) = V(t) + dt A(t), P(t+1) = P(t) + dt V(t), then each speed is
/// clipped to its group's cap. Adversary accelerations come from the tactic.
EngagementState step(const EngagementState& state, std::span<const Vec2> defender_accels, Tactic tactic,
                     const EngagementConfig& cfg, StepTrace* trace = nullptr);

struct EngagementRecord {
  TrajectoryMatrix defender_positions;
  TrajectoryMatrix adversary_positions;
  TrajectoryMatrix adversary_velocities;
  int steps = 0;  // integration steps performed; trajectories hold steps + 1 rows
  bool captured = false;
};

/// Runs the plan open-loop until `max_steps` or until an adversary comes
/// within the capture radius of its target.
EngagementRecord simulate_engagement(const EngagementConfig& cfg, const DefenderMotionPlan& plan, Tactic tactic);

/// Defenders follow `defender_path` verbatim for all of its rows; no early
/// termination. Throws std::invalid_argument on a column-count mismatch.
EngagementRecord simulate_engagement(const EngagementConfig& cfg, const TrajectoryMatrix& defender_path,
                                     Tactic tactic);

/// Open-loop defender positions for `plan` from `start` over `steps` rows.
TrajectoryMatrix plan_trajectory(const DefenderMotionPlan& plan, std::span<const Vec2> start,
                                 const EngagementConfig& cfg, std::size_t steps);

}  // namespace swarm
