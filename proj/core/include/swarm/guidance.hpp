#pragma once

#include "swarm/tactic.hpp"
#include "swarm/vec2.hpp"

namespace swarm {

struct AgentState {
  Vec2 position;
  Vec2 velocity;

  bool operator==(const AgentState&) const = default;
};

struct PursuitLimits {
  double max_accel = 0.5;
  /// Pursuer speed used to solve for the intercept point under lead pursuit.
  double max_speed = 2.0;
};

/// Earliest time at which a pursuer moving at `pursuer_speed` from the origin
/// can meet a target at `relative_position` moving with `target_velocity`.
/// Falls back to |r| / pursuer_speed when no positive root exists.
double intercept_time(Vec2 relative_position, Vec2 target_velocity, double pursuer_speed);

/// Point the adversary steers toward: the target's position for the base
/// tactics, the predicted intercept point for the "+" tactics.
Vec2 aim_point(const AgentState& adversary, const AgentState& target, Tactic tactic,
               const PursuitLimits& limits);

/// Pursuit acceleration toward the aim point.
///
/// The raw command is `max_accel` along the line of sight minus the velocity
/// component transverse to it; the result is clipped to `max_accel`.
/// Coincident adversary and aim point give zero acceleration.
Vec2 guidance_accel(const AgentState& adversary, const AgentState& target, Tactic tactic,
                    const PursuitLimits& limits);

}  // namespace swarm
