#include "swarm/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swarm {

double intercept_time(Vec2 r, Vec2 vt, double s) {
  const double dist = norm(r);
  if (!(s > 0.0)) throw std::invalid_argument("intercept_time: pursuer speed must be positive");
  if (dist == 0.0) return 0.0;
  // |r + vt * tau| = s * tau  =>  (vt.vt - s^2) tau^2 + 2 (r.vt) tau + r.r = 0
  const double a = dot(vt, vt) - s * s;
  const double b = 2.0 * dot(r, vt);
  const double c = dot(r, r);
  double tau = -1.0;
  if (std::abs(a) < 1e-12) {
    if (b < 0.0) tau = -c / b;
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double t1 = (-b - sq) / (2.0 * a);
      const double t2 = (-b + sq) / (2.0 * a);
      const double lo = std::min(t1, t2);
      const double hi = std::max(t1, t2);
      tau = lo > 0.0 ? lo : (hi > 0.0 ? hi : -1.0);
    }
  }
  return tau > 0.0 ? tau : dist / s;
}

Vec2 aim_point(const AgentState& adversary, const AgentState& target, Tactic tactic,
               const PursuitLimits& limits) {
  if (!uses_lead_pursuit(tactic)) return target.position;
  const Vec2 r = target.position - adversary.position;
  const double tau = intercept_time(r, target.velocity, limits.max_speed);
  return target.position + tau * target.velocity;
}

Vec2 guidance_accel(const AgentState& adversary, const AgentState& target, Tactic tactic,
                    const PursuitLimits& limits) {
  if (!(limits.max_accel > 0.0)) throw std::invalid_argument("guidance_accel: max_accel must be positive");
  const Vec2 los = aim_point(adversary, target, tactic, limits) - adversary.position;
  const double range = norm(los);
  if (range == 0.0) return {};
  const Vec2 u = los * (1.0 / range);
  const Vec2 v_perp = adversary.velocity - dot(adversary.velocity, u) * u;
  return clip_magnitude(limits.max_accel * u - v_perp, limits.max_accel);
}

}  // namespace swarm
