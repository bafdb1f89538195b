#include "swarm/stp.hpp"

#include "swarm/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace swarm {

std::array<double, kNumTactics> PredictionStack::true_predictions() const {
  std::array<double, kNumTactics> out{};
  for (std::size_t k = 0; k < kNumTactics; ++k) out[k] = p[k][k];
  return out;
}

PredictionStack stack_predictions(const Classifier& classifier, const TrajectoryMatrix& defender_path,
                                  const EngagementConfig& cfg) {
  const auto& spec = classifier.model.spec();
  if (spec.classes != static_cast<int>(kNumTactics)) {
    throw std::invalid_argument("stack_predictions: model has " + std::to_string(spec.classes) + " classes, need " +
                                std::to_string(kNumTactics));
  }
  if (defender_path.steps() < static_cast<std::size_t>(spec.window)) {
    throw std::invalid_argument("stack_predictions: path has " + std::to_string(defender_path.steps()) +
                                " rows, model window is " + std::to_string(spec.window));
  }
  if (spec.features != 4 * cfg.num_adversaries) {
    throw std::invalid_argument("stack_predictions: model expects " + std::to_string(spec.features) +
                                " features, engagement has " + std::to_string(cfg.num_adversaries) + " adversaries");
  }
  PredictionStack out;
  for (Tactic t : kAllTactics) {
    const auto rec = simulate_engagement(cfg, defender_path, t);
    const auto features = adversary_features(rec);
    const auto probs = classifier.classify(features, rec.adversary_positions.steps());
    auto& row = out.p[label_of(t)];
    std::copy(probs.begin(), probs.end(), row.begin());
  }
  return out;
}

double stp(const PredictionStack& stack) {
  double trace = 0.0;
  for (std::size_t k = 0; k < kNumTactics; ++k) trace += stack.p[k][k];
  return 100.0 * trace;
}

TrajectoryMatrix initial_guess(const DefenderMotionPlan& plan, const EngagementConfig& cfg, std::size_t steps) {
  const auto start = init_engagement(cfg, &plan).defender_positions();
  return plan_trajectory(plan, start, cfg, steps);
}

void for_each_constraint(const TrajectoryMatrix& path, const TrajectoryLimits& limits,
                         const std::function<void(const ConstraintTerm&)>& fn) {
  const std::size_t rows = path.steps();
  const std::size_t n = path.agents();
  if (rows < 3) throw std::invalid_argument("constraint evaluation needs at least 3 rows");
  const double dt = path.dt();
  const auto& area = limits.area;
  ConstraintTerm term;

  for (std::size_t t = 0; t + 1 < rows; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 p = path.at(t, j);
      std::size_t best = 0;
      double worst = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < area.edges(); ++k) {
        const double d = area.edge_distance(p, k);
        if (d > worst) {
          worst = d;
          best = k;
        }
      }
      term.family = ConstraintFamily::Area;
      term.value = worst;
      term.count = 1;
      term.partials[0] = {t, j, area.normal(best)};
      fn(term);
    }
  }

  for (std::size_t t = 0; t + 1 < rows; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 v = (1.0 / dt) * (path.at(t + 1, j) - path.at(t, j));
      const double s = norm(v);
      const Vec2 u = s > 0.0 ? (1.0 / s) * v : Vec2{1.0, 0.0};
      term.count = 2;
      term.family = ConstraintFamily::MinSpeed;
      term.value = limits.v_min - s;
      term.partials[0] = {t + 1, j, (-1.0 / dt) * u};
      term.partials[1] = {t, j, (1.0 / dt) * u};
      fn(term);
      term.family = ConstraintFamily::MaxSpeed;
      term.value = s - limits.v_max;
      term.partials[0] = {t + 1, j, (1.0 / dt) * u};
      term.partials[1] = {t, j, (-1.0 / dt) * u};
      fn(term);
    }
  }

  const double inv_dt2 = 1.0 / (dt * dt);
  for (std::size_t t = 0; t + 2 < rows; ++t) {
    for (std::size_t j = 0; j < n; ++j) {
      const Vec2 a = inv_dt2 * (path.at(t + 2, j) - 2.0 * path.at(t + 1, j) + path.at(t, j));
      const double m = norm(a);
      const Vec2 u = m > 0.0 ? (1.0 / m) * a : Vec2{};
      term.family = ConstraintFamily::MaxAccel;
      term.value = m - limits.a_max;
      term.count = 3;
      term.partials[0] = {t + 2, j, inv_dt2 * u};
      term.partials[1] = {t + 1, j, (-2.0 * inv_dt2) * u};
      term.partials[2] = {t, j, inv_dt2 * u};
      fn(term);
    }
  }

  for (std::size_t t = 0; t < rows; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec2 d = path.at(t, i) - path.at(t, j);
        const double r = norm(d);
        const Vec2 u = r > 0.0 ? (1.0 / r) * d : Vec2{1.0, 0.0};
        term.family = ConstraintFamily::Collision;
        term.value = limits.d_min - r;
        term.count = 2;
        term.partials[0] = {t, i, -u};
        term.partials[1] = {t, j, u};
        fn(term);
      }
    }
  }
}

ConstraintValues constraint_eval(const TrajectoryMatrix& path, std::span<const double> initial_row,
                                 const TrajectoryLimits& limits) {
  if (initial_row.size() != path.cols()) throw std::invalid_argument("constraint_eval: initial row width mismatch");
  ConstraintValues out;
  for (std::size_t j = 0; j < path.agents(); ++j) {
    out.initial.push_back(distance(path.at(0, j), Vec2{initial_row[2 * j], initial_row[2 * j + 1]}));
  }
  for_each_constraint(path, limits, [&](const ConstraintTerm& c) {
    switch (c.family) {
      case ConstraintFamily::Area: out.area.push_back(c.value); break;
      case ConstraintFamily::MinSpeed: out.min_speed.push_back(c.value); break;
      case ConstraintFamily::MaxSpeed: out.max_speed.push_back(c.value); break;
      case ConstraintFamily::MaxAccel: out.max_accel.push_back(c.value); break;
      case ConstraintFamily::Collision: out.collision.push_back(c.value); break;
    }
  });
  return out;
}

namespace {
double max_of(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  return m;
}
}  // namespace

ConstraintReport summarize(const ConstraintValues& v) {
  return {max_of(v.initial),   max_of(v.area),      max_of(v.min_speed),
          max_of(v.max_speed), max_of(v.max_accel), max_of(v.collision)};
}

double ConstraintReport::max() const {
  return std::max({initial, area, min_speed, max_speed, max_accel, collision});
}

std::vector<std::string> ConstraintReport::violated(double tol) const {
  std::vector<std::string> out;
  if (initial > tol) out.emplace_back("initial");
  if (area > tol) out.emplace_back("area");
  if (min_speed > tol) out.emplace_back("min_speed");
  if (max_speed > tol) out.emplace_back("max_speed");
  if (max_accel > tol) out.emplace_back("max_accel");
  if (collision > tol) out.emplace_back("collision");
  return out;
}

std::string ConstraintReport::describe() const {
  std::ostringstream os;
  os << "initial=" << initial << " area=" << area << " min_speed=" << min_speed << " max_speed=" << max_speed
     << " max_accel=" << max_accel << " collision=" << collision;
  return os.str();
}

double path_length(const TrajectoryMatrix& path) {
  double total = 0.0;
  for (std::size_t t = 0; t + 1 < path.steps(); ++t) {
    for (std::size_t j = 0; j < path.agents(); ++j) total += distance(path.at(t + 1, j), path.at(t, j));
  }
  return total;
}

}  // namespace swarm
