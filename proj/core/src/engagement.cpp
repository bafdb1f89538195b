#include "swarm/engagement.hpp"

#include "swarm/assignment.hpp"
#include "swarm/config.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swarm {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Vec2 sample_disk(std::mt19937_64& rng, Vec2 center, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double theta = 2.0 * kPi * unit(rng);
  return center + from_heading(theta, r);
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("EngagementConfig: ") + what);
}

}  // namespace

void EngagementConfig::validate() const {
  require(num_defenders >= 1, "num_defenders must be >= 1");
  require(num_adversaries >= 1, "num_adversaries must be >= 1");
  require(dt > 0.0, "dt must be positive");
  require(max_steps >= 0, "max_steps must be non-negative");
  require(defender_min_speed >= 0.0 && defender_min_speed < defender_max_speed,
          "need 0 <= defender_min_speed < defender_max_speed");
  require(defender_max_accel > 0.0, "defender_max_accel must be positive");
  require(adversary_max_speed > 0.0, "adversary_max_speed must be positive");
  require(adversary_max_accel > 0.0, "adversary_max_accel must be positive");
  require(defender_dispersion >= 0.0 && adversary_dispersion >= 0.0, "dispersion radii must be non-negative");
  require(separation > defender_dispersion && separation > adversary_dispersion,
          "separation must exceed both dispersion radii");
  require(capture_radius >= 0.0, "capture_radius must be non-negative");
  require(defender_min_spacing >= 0.0, "defender_min_spacing must be non-negative");
}

Vec2 EngagementConfig::adversary_center() const { return from_heading(deg_to_rad(45.0), separation); }

std::vector<std::string_view> EngagementConfig::config_keys() {
  return {"num_defenders",      "num_adversaries",      "dt",
          "max_steps",          "defender_min_speed",   "defender_max_speed",
          "defender_max_accel", "adversary_max_speed",  "adversary_max_accel",
          "separation",         "defender_dispersion",  "adversary_dispersion",
          "defender_min_spacing", "capture_radius",     "seed"};
}

EngagementConfig EngagementConfig::from_config(const KeyValueConfig& c) {
  EngagementConfig e;
  e.num_defenders = static_cast<int>(c.get_int("num_defenders", e.num_defenders));
  e.num_adversaries = static_cast<int>(c.get_int("num_adversaries", e.num_adversaries));
  e.dt = c.get_double("dt", e.dt);
  e.max_steps = static_cast<int>(c.get_int("max_steps", e.max_steps));
  e.defender_min_speed = c.get_double("defender_min_speed", e.defender_min_speed);
  e.defender_max_speed = c.get_double("defender_max_speed", e.defender_max_speed);
  e.defender_max_accel = c.get_double("defender_max_accel", e.defender_max_accel);
  e.adversary_max_speed = c.get_double("adversary_max_speed", e.adversary_max_speed);
  e.adversary_max_accel = c.get_double("adversary_max_accel", e.adversary_max_accel);
  e.separation = c.get_double("separation", e.separation);
  e.defender_dispersion = c.get_double("defender_dispersion", e.defender_dispersion);
  e.adversary_dispersion = c.get_double("adversary_dispersion", e.adversary_dispersion);
  e.defender_min_spacing = c.get_double("defender_min_spacing", e.defender_min_spacing);
  e.capture_radius = c.get_double("capture_radius", e.capture_radius);
  e.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<long long>(e.seed)));
  return e;
}

std::mt19937_64 make_rng(std::uint64_t seed, SeedStream stream, std::uint64_t salt) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ static_cast<std::uint64_t>(stream));
  s = splitmix64(s ^ salt);
  return std::mt19937_64(s);
}

std::pair<double, double> heading_interval_deg(MotionType motion) {
  switch (motion) {
    case MotionType::Star: return {0.0, 90.0};
    case MotionType::Semi: return {-45.0, 135.0};
    case MotionType::Straight: return {45.0, 45.0};
    case MotionType::PerpL: return {135.0, 135.0};
    case MotionType::PerpR: return {-45.0, -45.0};
  }
  throw std::invalid_argument("heading_interval_deg: unknown motion type");
}

DefenderMotionPlan generate_motion_plan(MotionType motion, int num_defenders, double v_min, double v_max,
                                        std::uint64_t seed, bool ramp_to_max) {
  if (num_defenders < 1) throw std::invalid_argument("generate_motion_plan: num_defenders must be >= 1");
  if (!(v_min < v_max)) throw std::invalid_argument("generate_motion_plan: need v_min < v_max");
  const auto [lo, hi] = heading_interval_deg(motion);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> speed(v_min, v_max);
  std::uniform_real_distribution<double> heading(lo, hi);

  DefenderMotionPlan plan;
  plan.motion = motion;
  plan.ramp_to_max = ramp_to_max;
  plan.speeds.reserve(num_defenders);
  plan.headings.reserve(num_defenders);
  // Speeds first, then headings: a prefix of defenders is shared across counts.
  for (int j = 0; j < num_defenders; ++j) plan.speeds.push_back(speed(rng));
  for (int j = 0; j < num_defenders; ++j) plan.headings.push_back(deg_to_rad(lo == hi ? lo : heading(rng)));
  return plan;
}

DefenderMotionPlan motion_plan_for(const EngagementConfig& cfg, MotionType motion, bool ramp_to_max) {
  auto rng = make_rng(cfg.seed, SeedStream::MotionPlan, static_cast<std::uint64_t>(motion));
  return generate_motion_plan(motion, cfg.num_defenders, cfg.defender_min_speed, cfg.defender_max_speed, rng(),
                              ramp_to_max);
}

std::vector<Vec2> EngagementState::defender_positions() const {
  std::vector<Vec2> out;
  out.reserve(defenders.size());
  for (const auto& d : defenders) out.push_back(d.position);
  return out;
}

std::vector<Vec2> EngagementState::adversary_positions() const {
  std::vector<Vec2> out;
  out.reserve(adversaries.size());
  for (const auto& a : adversaries) out.push_back(a.position);
  return out;
}

EngagementState init_engagement(const EngagementConfig& cfg, const DefenderMotionPlan* plan) {
  cfg.validate();
  if (plan && static_cast<int>(plan->headings.size()) != cfg.num_defenders) {
    throw std::invalid_argument("init_engagement: motion plan size does not match num_defenders");
  }
  EngagementState s;

  auto adv_rng = make_rng(cfg.seed, SeedStream::Adversaries);
  const Vec2 center = cfg.adversary_center();
  s.adversaries.reserve(cfg.num_adversaries);
  for (int i = 0; i < cfg.num_adversaries; ++i) {
    s.adversaries.push_back({sample_disk(adv_rng, center, cfg.adversary_dispersion), {}});
  }

  constexpr int kMaxRejections = 1000;
  auto def_rng = make_rng(cfg.seed, SeedStream::Defenders);
  s.defenders.reserve(cfg.num_defenders);
  for (int j = 0; j < cfg.num_defenders; ++j) {
    Vec2 p;
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
      p = sample_disk(def_rng, {}, cfg.defender_dispersion);
      bool spaced = true;
      for (const auto& other : s.defenders) {
        if (distance(p, other.position) < cfg.defender_min_spacing) {
          spaced = false;
          break;
        }
      }
      if (spaced) break;
    }
    Vec2 v{};
    if (plan && !plan->ramp_to_max) v = from_heading(plan->headings[j], plan->speeds[j]);
    s.defenders.push_back({p, v});
  }
  return s;
}

std::vector<Vec2> plan_accelerations(const DefenderMotionPlan& plan, std::span<const AgentState> defenders,
                                     const EngagementConfig& cfg) {
  std::vector<Vec2> accels(defenders.size());
  if (!plan.ramp_to_max) return accels;
  for (std::size_t j = 0; j < defenders.size(); ++j) {
    const double speed = norm(defenders[j].velocity);
    const double gain = std::min(cfg.defender_max_accel, (cfg.defender_max_speed - speed) / cfg.dt);
    if (gain > 0.0) accels[j] = from_heading(plan.headings[j], gain);
  }
  return accels;
}

EngagementState step(const EngagementState& state, std::span<const Vec2> defender_accels, Tactic tactic,
                     const EngagementConfig& cfg, StepTrace* trace) {
  if (defender_accels.size() != state.defenders.size()) {
    throw std::invalid_argument("step: one acceleration per defender required");
  }
  const auto adv_pos = state.adversary_positions();
  const auto def_pos = state.defender_positions();
  const auto targets = assign_targets(adv_pos, def_pos, tactic);
  const PursuitLimits limits{cfg.adversary_max_accel, cfg.adversary_max_speed};

  EngagementState next;
  next.defenders.resize(state.defenders.size());
  next.adversaries.resize(state.adversaries.size());
  if (trace) {
    trace->targets = targets;
    trace->adversary_accels.assign(state.adversaries.size(), {});
    trace->defender_clipped.assign(state.defenders.size(), 0);
    trace->adversary_clipped.assign(state.adversaries.size(), 0);
  }

  for (std::size_t j = 0; j < state.defenders.size(); ++j) {
    const auto& d = state.defenders[j];
    bool clipped = false;
    next.defenders[j].position = d.position + cfg.dt * d.velocity;
    next.defenders[j].velocity =
        clip_magnitude(d.velocity + cfg.dt * defender_accels[j], cfg.defender_max_speed, &clipped);
    if (trace) trace->defender_clipped[j] = clipped;
  }
  for (std::size_t i = 0; i < state.adversaries.size(); ++i) {
    const auto& a = state.adversaries[i];
    const Vec2 acc = guidance_accel(a, state.defenders[targets[i]], tactic, limits);
    bool clipped = false;
    next.adversaries[i].position = a.position + cfg.dt * a.velocity;
    next.adversaries[i].velocity = clip_magnitude(a.velocity + cfg.dt * acc, cfg.adversary_max_speed, &clipped);
    if (trace) {
      trace->adversary_accels[i] = acc;
      trace->adversary_clipped[i] = clipped;
    }
  }
  return next;
}

namespace {

void record_row(EngagementRecord& rec, std::size_t t, const EngagementState& s) {
  for (std::size_t j = 0; j < s.defenders.size(); ++j) rec.defender_positions.set(t, j, s.defenders[j].position);
  for (std::size_t i = 0; i < s.adversaries.size(); ++i) {
    rec.adversary_positions.set(t, i, s.adversaries[i].position);
    rec.adversary_velocities.set(t, i, s.adversaries[i].velocity);
  }
}

EngagementRecord make_record(const EngagementConfig& cfg, std::size_t rows) {
  EngagementRecord rec;
  rec.defender_positions = TrajectoryMatrix(rows, cfg.num_defenders, cfg.dt);
  rec.adversary_positions = TrajectoryMatrix(rows, cfg.num_adversaries, cfg.dt);
  rec.adversary_velocities = TrajectoryMatrix(rows, cfg.num_adversaries, cfg.dt);
  return rec;
}

void truncate(EngagementRecord& rec, std::size_t rows) {
  rec.defender_positions = rec.defender_positions.head(rows);
  rec.adversary_positions = rec.adversary_positions.head(rows);
  rec.adversary_velocities = rec.adversary_velocities.head(rows);
}

bool any_captured(const EngagementState& s, const std::vector<int>& targets, double radius) {
  for (std::size_t i = 0; i < s.adversaries.size(); ++i) {
    if (distance(s.adversaries[i].position, s.defenders[targets[i]].position) <= radius) return true;
  }
  return false;
}

}  // namespace

EngagementRecord simulate_engagement(const EngagementConfig& cfg, const DefenderMotionPlan& plan, Tactic tactic) {
  EngagementState state = init_engagement(cfg, &plan);
  EngagementRecord rec = make_record(cfg, static_cast<std::size_t>(cfg.max_steps) + 1);
  record_row(rec, 0, state);
  StepTrace trace;
  int t = 0;
  while (t < cfg.max_steps) {
    const auto accels = plan_accelerations(plan, state.defenders, cfg);
    state = step(state, accels, tactic, cfg, &trace);
    ++t;
    record_row(rec, static_cast<std::size_t>(t), state);
    if (any_captured(state, trace.targets, cfg.capture_radius)) {
      rec.captured = true;
      break;
    }
  }
  rec.steps = t;
  if (t < cfg.max_steps) truncate(rec, static_cast<std::size_t>(t) + 1);
  return rec;
}

EngagementRecord simulate_engagement(const EngagementConfig& cfg, const TrajectoryMatrix& defender_path,
                                     Tactic tactic) {
  if (defender_path.agents() != static_cast<std::size_t>(cfg.num_defenders)) {
    throw std::invalid_argument("simulate_engagement: defender path has " + std::to_string(defender_path.cols()) +
                                " columns, expected " + std::to_string(2 * cfg.num_defenders));
  }
  if (defender_path.steps() == 0) throw std::invalid_argument("simulate_engagement: empty defender path");
  const std::size_t rows = defender_path.steps();

  auto defender_velocity = [&](std::size_t t, std::size_t j) -> Vec2 {
    if (rows < 2) return {};
    const std::size_t k = std::min(t, rows - 2);
    return (defender_path.at(k + 1, j) - defender_path.at(k, j)) * (1.0 / cfg.dt);
  };
  auto place_defenders = [&](EngagementState& s, std::size_t t) {
    for (std::size_t j = 0; j < s.defenders.size(); ++j) {
      s.defenders[j] = {defender_path.at(t, j), defender_velocity(t, j)};
    }
  };

  EngagementState state = init_engagement(cfg);
  place_defenders(state, 0);
  EngagementRecord rec = make_record(cfg, rows);
  record_row(rec, 0, state);
  const std::vector<Vec2> no_accel(state.defenders.size());
  for (std::size_t t = 0; t + 1 < rows; ++t) {
    state = step(state, no_accel, tactic, cfg);
    place_defenders(state, t + 1);
    record_row(rec, t + 1, state);
  }
  rec.steps = static_cast<int>(rows) - 1;
  return rec;
}

TrajectoryMatrix plan_trajectory(const DefenderMotionPlan& plan, std::span<const Vec2> start,
                                 const EngagementConfig& cfg, std::size_t steps) {
  if (plan.headings.size() != start.size()) {
    throw std::invalid_argument("plan_trajectory: plan size does not match start positions");
  }
  TrajectoryMatrix out(steps, start.size(), cfg.dt);
  if (steps == 0) return out;
  std::vector<AgentState> defenders(start.size());
  for (std::size_t j = 0; j < start.size(); ++j) {
    defenders[j].position = start[j];
    if (!plan.ramp_to_max) defenders[j].velocity = from_heading(plan.headings[j], plan.speeds[j]);
    out.set(0, j, start[j]);
  }
  for (std::size_t t = 1; t < steps; ++t) {
    const auto accels = plan_accelerations(plan, defenders, cfg);
    for (std::size_t j = 0; j < defenders.size(); ++j) {
      auto& d = defenders[j];
      d.position += cfg.dt * d.velocity;
      d.velocity = clip_magnitude(d.velocity + cfg.dt * accels[j], cfg.defender_max_speed);
      out.set(t, j, d.position);
    }
  }
  return out;
}

}  // namespace swarm
