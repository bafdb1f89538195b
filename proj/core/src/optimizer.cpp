#include "swarm/optimizer.hpp"

#include "swarm/config.hpp"
#include "swarm/error.hpp"
#include "swarm/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace swarm {

std::size_t OptimizationProblem::steps() const {
  if (horizon > 0) return horizon;
  if (!classifier) throw std::invalid_argument("OptimizationProblem: horizon is 0 and no classifier is attached");
  return static_cast<std::size_t>(classifier->model.spec().window);
}

void OptimizationProblem::validate() const {
  engagement.validate();
  const auto n = static_cast<std::size_t>(engagement.num_defenders);
  if (plan.headings.size() != n || plan.speeds.size() != n) {
    throw std::invalid_argument("OptimizationProblem: plan size does not match num_defenders");
  }
  if (horizon != 0 && horizon < 3) throw std::invalid_argument("OptimizationProblem: horizon must be at least 3");
  if (classifier && steps() < static_cast<std::size_t>(classifier->model.spec().window)) {
    throw std::invalid_argument("OptimizationProblem: horizon is shorter than the model window");
  }
  if (limits.area.edges() < 3) throw std::invalid_argument("OptimizationProblem: no operating area");
  if (!(limits.v_min >= 0.0) || !(limits.v_max > limits.v_min)) {
    throw std::invalid_argument("OptimizationProblem: need 0 <= v_min < v_max");
  }
  if (!(limits.a_max > 0.0)) throw std::invalid_argument("OptimizationProblem: a_max must be positive");
  if (!(limits.d_min >= 0.0)) throw std::invalid_argument("OptimizationProblem: d_min must be non-negative");
  if (solver.max_iterations < 0) throw std::invalid_argument("OptimizationProblem: max_iterations must be >= 0");
  if (!(solver.tolerance > 0.0)) throw std::invalid_argument("OptimizationProblem: tolerance must be positive");
  if (!(solver.fd_step >= 0.0)) throw std::invalid_argument("OptimizationProblem: fd_step must be >= 0");
  if (!(solver.trust_radius > 0.0)) throw std::invalid_argument("OptimizationProblem: trust_radius must be positive");
}

std::vector<std::string_view> OptimizationProblem::config_keys() {
  std::vector<std::string_view> keys = {"motion",         "ramp",           "horizon",          "area",
                                        "v_min",          "v_max",          "a_max",            "d_min",
                                        "max_iterations", "tolerance",      "fd_step",          "trust_radius",
                                        "line_search_steps", "stagnation_limit", "initial_penalty", "penalty_growth",
                                        "repair_limit",   "restoration_iterations"};
  for (auto k : EngagementConfig::config_keys()) keys.push_back(k);
  return keys;
}

OptimizationProblem OptimizationProblem::from_config(const KeyValueConfig& cfg) {
  cfg.require_known(config_keys());
  OptimizationProblem p;
  p.engagement = EngagementConfig::from_config(cfg);

  const auto motion_name = cfg.get_string("motion", "Star");
  const auto motion = parse_motion_type(motion_name);
  if (!motion) throw ConfigError(cfg.source() + ": unknown motion '" + motion_name + "'");
  p.plan = motion_plan_for(p.engagement, *motion, cfg.get_bool("ramp", false));

  p.horizon = static_cast<std::size_t>(cfg.get_int("horizon", 0));
  if (cfg.has("area")) {
    const auto xy = cfg.get_doubles("area");
    if (xy.size() % 2 != 0) throw ConfigError(cfg.source() + ": area needs x,y pairs");
    std::vector<Vec2> v;
    for (std::size_t i = 0; i < xy.size(); i += 2) v.push_back({xy[i], xy[i + 1]});
    try {
      p.limits.area = OperationalArea(std::move(v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(cfg.source() + ": " + e.what());
    }
  } else {
    p.limits.area = OperationalArea::box({-50.0, -50.0}, {50.0, 50.0});
  }
  p.limits.v_min = cfg.get_double("v_min", 0.0);
  p.limits.v_max = cfg.get_double("v_max", p.engagement.defender_max_speed);
  p.limits.a_max = cfg.get_double("a_max", p.engagement.defender_max_accel);
  p.limits.d_min = cfg.get_double("d_min", p.limits.d_min);

  auto& s = p.solver;
  s.max_iterations = static_cast<int>(cfg.get_int("max_iterations", s.max_iterations));
  s.tolerance = cfg.get_double("tolerance", s.tolerance);
  s.fd_step = cfg.get_double("fd_step", s.fd_step);
  s.trust_radius = cfg.get_double("trust_radius", s.trust_radius);
  s.line_search_steps = static_cast<int>(cfg.get_int("line_search_steps", s.line_search_steps));
  s.stagnation_limit = static_cast<int>(cfg.get_int("stagnation_limit", s.stagnation_limit));
  s.initial_penalty = cfg.get_double("initial_penalty", s.initial_penalty);
  s.penalty_growth = cfg.get_double("penalty_growth", s.penalty_growth);
  s.repair_limit = cfg.get_double("repair_limit", s.repair_limit);
  s.restoration_iterations = static_cast<int>(cfg.get_int("restoration_iterations", s.restoration_iterations));
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.source() + ": " + e.what());
  }
  return p;
}

namespace {

double max_violation(const TrajectoryMatrix& path, const TrajectoryLimits& limits) {
  double worst = -std::numeric_limits<double>::infinity();
  for_each_constraint(path, limits, [&](const ConstraintTerm& c) { worst = std::max(worst, c.value); });
  return worst;
}

void add_partials(const ConstraintTerm& c, double w, std::vector<double>& grad, std::size_t cols) {
  for (int k = 0; k < c.count; ++k) {
    const auto& p = c.partials[static_cast<std::size_t>(k)];
    if (p.row == 0) continue;
    grad[p.row * cols + 2 * p.agent] += w * p.d.x;
    grad[p.row * cols + 2 * p.agent + 1] += w * p.d.y;
  }
}

/// 0.5 * sum max(0, g + margin)^2 and its gradient over rows >= 1.
double infeasibility(const TrajectoryMatrix& path, const TrajectoryLimits& limits, double margin,
                     std::vector<double>* grad) {
  if (grad) grad->assign(path.data().size(), 0.0);
  double phi = 0.0;
  for_each_constraint(path, limits, [&](const ConstraintTerm& c) {
    const double e = c.value + margin;
    if (e <= 0.0) return;
    phi += 0.5 * e * e;
    if (grad) add_partials(c, e, *grad, path.cols());
  });
  return phi;
}

/// Gradient descent on the squared violation with backtracking. Row 0 is
/// never moved. Returns the final maximum violation.
double restore(TrajectoryMatrix& path, const TrajectoryLimits& limits, const SolverSettings& s) {
  const double margin = 0.25 * s.tolerance;
  std::vector<double> grad;
  double alpha = 1.0;
  double worst = max_violation(path, limits);
  for (int it = 0; it < s.restoration_iterations && worst > 0.0; ++it) {
    const double phi = infeasibility(path, limits, margin, &grad);
    double g2 = 0.0;
    for (double g : grad) g2 += g * g;
    if (g2 == 0.0) break;
    alpha = std::min(alpha * 2.0, 1e3);
    bool moved = false;
    TrajectoryMatrix trial = path;
    for (int ls = 0; ls < 40; ++ls) {
      for (std::size_t i = 0; i < grad.size(); ++i) trial.data()[i] = path.data()[i] - alpha * grad[i];
      if (infeasibility(trial, limits, margin, nullptr) <= phi - 1e-4 * alpha * g2) {
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
    path = std::move(trial);
    worst = max_violation(path, limits);
  }
  return worst;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

}  // namespace

OptimizationResult optimize(const OptimizationProblem& problem) {
  if (!problem.classifier) throw std::invalid_argument("optimize: no classifier attached");
  problem.validate();
  const auto& s = problem.solver;
  const auto& limits = problem.limits;
  const auto& cfg = problem.engagement;
  const Classifier& clf = *problem.classifier;
  const std::size_t rows = problem.steps();

  OptimizationResult r;
  r.guess = initial_guess(problem.plan, cfg, rows);
  const std::vector<double> row0(r.guess.row(0).begin(), r.guess.row(0).end());
  r.initial_stack = stack_predictions(clf, r.guess, cfg);
  r.initial_stp = stp(r.initial_stack);
  r.initial_violations = summarize(constraint_eval(r.guess, row0, limits));
  std::size_t evals = 1;

  TrajectoryMatrix path = r.guess;
  double current = r.initial_stp;
  if (r.initial_violations.max() > s.tolerance) {
    const auto bad = r.initial_violations.violated(s.tolerance);
    if (r.initial_violations.max() > s.repair_limit) {
      throw NumericalError("optimize: initial guess violates " + join(bad) + " beyond the repair limit (" +
                           r.initial_violations.describe() + ")");
    }
    if (restore(path, limits, s) > s.tolerance) {
      throw NumericalError("optimize: could not repair initial guess; violated: " + join(bad));
    }
    r.repaired = true;
    current = stp(stack_predictions(clf, path, cfg));
    ++evals;
  }

  const double h = s.fd_step > 0.0 ? s.fd_step : 1e-2 * limits.area.length_scale();
  const std::size_t cols = path.cols();
  const std::size_t total = path.data().size();
  const std::size_t free = total - cols;

  std::size_t constraint_count = 0;
  for_each_constraint(path, limits, [&](const ConstraintTerm&) { ++constraint_count; });
  std::vector<double> lambda(constraint_count, 0.0);
  double mu = s.initial_penalty;
  double trust = s.trust_radius;
  int stagnation = 0;
  r.termination = "max_iterations";

  std::vector<double> probe(free);
  std::vector<double> grad(total, 0.0);
  std::vector<double> dir(total);
  bool have_gradient = false;
  for (int it = 0; it < s.max_iterations; ++it) {
    IterationRecord rec;
    rec.iteration = it + 1;
    rec.penalty = mu;
    if (!have_gradient) {
      parallel_for(free, s.threads, [&](std::size_t i) {
        TrajectoryMatrix p = path;
        p.data()[cols + i] += h;
        probe[i] = stp(stack_predictions(clf, p, cfg));
      });
      evals += free;
      for (std::size_t i = 0; i < free; ++i) grad[cols + i] = (probe[i] - current) / h;
      have_gradient = true;
    }

    double gmax = 0.0;
    for (double g : grad) gmax = std::max(gmax, std::abs(g));
    if (gmax < s.gradient_tolerance) {
      rec.stp = current;
      rec.max_violation = max_violation(path, limits);
      rec.trust_radius = trust;
      rec.evaluations = evals;
      r.log.push_back(rec);
      r.iterations = it + 1;
      r.termination = "gradient";
      break;
    }

    dir = grad;
    std::size_t idx = 0;
    for_each_constraint(path, limits, [&](const ConstraintTerm& c) {
      const double w = std::max(0.0, lambda[idx++] + mu * c.value);
      if (w > 0.0) add_partials(c, -w, dir, cols);
    });
    double dmax = 0.0;
    for (double d : dir) dmax = std::max(dmax, std::abs(d));

    bool accepted = false;
    TrajectoryMatrix trial = path;
    auto try_point = [&]() {
      if (restore(trial, limits, s) > s.tolerance) return false;
      const double f = stp(stack_predictions(clf, trial, cfg));
      ++evals;
      if (!(f > current)) return false;
      rec.step = 0.0;
      for (std::size_t i = 0; i < total; ++i) rec.step = std::max(rec.step, std::abs(trial.data()[i] - path.data()[i]));
      path = trial;
      current = f;
      return true;
    };

    double alpha = dmax > 0.0 ? trust / dmax : 0.0;
    for (int ls = 0; ls < s.line_search_steps && alpha > 0.0 && !accepted; ++ls, alpha *= 0.5) {
      for (std::size_t i = 0; i < total; ++i) trial.data()[i] = path.data()[i] + alpha * dir[i];
      if (ls == 0) {
        std::size_t k = 0;
        for_each_constraint(trial, limits, [&](const ConstraintTerm& c) {
          lambda[k] = std::max(0.0, lambda[k] + mu * c.value);
          ++k;
        });
      }
      accepted = try_point();
    }

    // Fall back to the best improving coordinate probes.
    if (!accepted) {
      std::vector<std::size_t> order(free);
      for (std::size_t i = 0; i < free; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return probe[a] > probe[b]; });
      for (std::size_t k = 0; k < std::min<std::size_t>(3, free) && !accepted; ++k) {
        if (!(probe[order[k]] > current)) break;
        trial = path;
        trial.data()[cols + order[k]] += h;
        accepted = try_point();
      }
    }

    if (accepted) {
      stagnation = 0;
      have_gradient = false;
      trust = std::min(trust * 1.5, 10.0 * s.trust_radius);
    } else {
      ++stagnation;
      trust *= 0.25;
      mu = std::min(mu * s.penalty_growth, s.max_penalty);
    }
    rec.accepted = accepted;
    rec.stp = current;
    rec.max_violation = max_violation(path, limits);
    rec.trust_radius = trust;
    rec.evaluations = evals;
    r.log.push_back(rec);
    r.iterations = it + 1;
    if (stagnation >= s.stagnation_limit) {
      r.termination = "stagnation";
      break;
    }
    if (trust < s.min_trust_radius) {
      r.termination = "trust_region";
      break;
    }
  }
  if (s.max_iterations == 0) r.termination = "max_iterations";

  r.trajectory = std::move(path);
  r.stack = stack_predictions(clf, r.trajectory, cfg);
  r.optimized_stp = stp(r.stack);
  r.violations = summarize(constraint_eval(r.trajectory, row0, limits));
  r.evaluations = evals + 1;
  return r;
}

std::vector<DefenderMotionPlan> candidate_plans(const EngagementConfig& cfg, const std::vector<bool>& ramp_flags) {
  std::vector<DefenderMotionPlan> out;
  for (bool ramp : ramp_flags) {
    for (MotionType m : kAllMotionTypes) out.push_back(motion_plan_for(cfg, m, ramp));
  }
  return out;
}

std::vector<CandidateScore> evaluate_initial_trajectories(const OptimizationProblem& problem,
                                                          const std::vector<DefenderMotionPlan>& plans) {
  if (!problem.classifier) throw std::invalid_argument("evaluate_initial_trajectories: no classifier attached");
  const std::size_t rows = problem.steps();
  std::vector<CandidateScore> out(plans.size());
  parallel_for(plans.size(), problem.solver.threads, [&](std::size_t i) {
    const auto guess = initial_guess(plans[i], problem.engagement, rows);
    const std::vector<double> row0(guess.row(0).begin(), guess.row(0).end());
    auto& c = out[i];
    c.motion = plans[i].motion;
    c.ramp_to_max = plans[i].ramp_to_max;
    c.stack = stack_predictions(*problem.classifier, guess, problem.engagement);
    c.stp = stp(c.stack);
    c.max_violation = summarize(constraint_eval(guess, row0, problem.limits)).max();
    c.path_length = path_length(guess);
  });
  std::stable_sort(out.begin(), out.end(), [](const CandidateScore& a, const CandidateScore& b) {
    if (a.stp != b.stp) return a.stp > b.stp;
    if (a.max_violation != b.max_violation) return a.max_violation < b.max_violation;
    return a.path_length < b.path_length;
  });
  return out;
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json report_json(const ConstraintReport& c) {
  return {{"initial", finite_or_null(c.initial)},     {"area", finite_or_null(c.area)},
          {"min_speed", finite_or_null(c.min_speed)}, {"max_speed", finite_or_null(c.max_speed)},
          {"max_accel", finite_or_null(c.max_accel)}, {"collision", finite_or_null(c.collision)}};
}

nlohmann::json stack_json(const PredictionStack& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : s.p) rows.push_back(std::vector<double>(row.begin(), row.end()));
  return rows;
}

}  // namespace

std::string result_json(const OptimizationProblem& problem, const OptimizationResult& r) {
  nlohmann::json j;
  j["seed"] = problem.engagement.seed;
  j["num_defenders"] = problem.engagement.num_defenders;
  j["motion"] = std::string(to_string(problem.plan.motion));
  j["ramp_to_max"] = problem.plan.ramp_to_max;
  j["horizon"] = r.trajectory.steps();
  j["initial_stp"] = r.initial_stp;
  j["optimized_stp"] = r.optimized_stp;
  const auto t0 = r.initial_stack.true_predictions();
  const auto t1 = r.stack.true_predictions();
  nlohmann::json tactics = nlohmann::json::object();
  for (Tactic t : kAllTactics) {
    tactics[std::string(to_string(t))] = {{"initial", t0[label_of(t)]}, {"optimized", t1[label_of(t)]}};
  }
  j["true_predictions"] = tactics;
  j["initial_stack"] = stack_json(r.initial_stack);
  j["optimized_stack"] = stack_json(r.stack);
  j["initial_violations"] = report_json(r.initial_violations);
  j["violations"] = report_json(r.violations);
  j["repaired"] = r.repaired;
  j["iterations"] = r.iterations;
  j["evaluations"] = r.evaluations;
  j["termination"] = r.termination;
  nlohmann::json log = nlohmann::json::array();
  for (const auto& e : r.log) {
    log.push_back({{"iteration", e.iteration},
                   {"stp", e.stp},
                   {"max_violation", finite_or_null(e.max_violation)},
                   {"step", e.step},
                   {"trust_radius", e.trust_radius},
                   {"penalty", e.penalty},
                   {"evaluations", e.evaluations},
                   {"accepted", e.accepted}});
  }
  j["log"] = log;
  std::vector<double> area;
  for (Vec2 v : problem.limits.area.vertices()) {
    area.push_back(v.x);
    area.push_back(v.y);
  }
  j["area"] = area;
  j["limits"] = {{"v_min", problem.limits.v_min},
                 {"v_max", problem.limits.v_max},
                 {"a_max", problem.limits.a_max},
                 {"d_min", problem.limits.d_min},
                 {"tolerance", problem.solver.tolerance}};
  return j.dump(2);
}

void write_result_bundle(const OptimizationProblem& problem, const OptimizationResult& result,
                         const std::filesystem::path& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name);
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open(stem + ".json");
    f << result_json(problem, result) << '\n';
  }
  {
    auto f = open(stem + "_defenders.csv");
    write_trajectory_csv(f, result.trajectory);
  }
  {
    auto f = open(stem + "_defenders_initial.csv");
    write_trajectory_csv(f, result.guess);
  }
  for (Tactic t : kAllTactics) {
    const auto rec = simulate_engagement(problem.engagement, result.trajectory, t);
    auto f = open(stem + "_adversaries_" + std::string(to_string(t)) + ".csv");
    write_trajectory_csv(f, rec.adversary_positions);
  }
}

}  // namespace swarm
