#include "swarm/sweep.hpp"

#include "swarm/error.hpp"
#include "swarm/parallel.hpp"

#include <json.hpp>

#include <sstream>

namespace swarm {

std::string SweepCell::label() const {
  return "nd" + std::to_string(num_defenders) + "_" + std::string(to_string(motion)) + (ramp_to_max ? "_ramp" : "");
}

SweepResult sweep(const OptimizationProblem& templ, const std::vector<int>& defender_counts,
                  const std::vector<MotionType>& motions, const std::vector<bool>& ramp_flags, unsigned threads) {
  if (defender_counts.empty() || motions.empty() || ramp_flags.empty()) {
    throw std::invalid_argument("sweep: empty grid");
  }
  SweepResult out;
  out.seed = templ.engagement.seed;
  out.defender_counts = defender_counts;
  out.motions = motions;
  out.ramp_flags = ramp_flags;
  for (int nd : defender_counts) {
    for (bool ramp : ramp_flags) {
      for (MotionType m : motions) {
        SweepCell c;
        c.num_defenders = nd;
        c.motion = m;
        c.ramp_to_max = ramp;
        c.problem = templ;
        c.problem.engagement.num_defenders = nd;
        c.problem.plan = motion_plan_for(c.problem.engagement, m, ramp);
        c.problem.solver.threads = 1;
        out.cells.push_back(std::move(c));
      }
    }
  }

  parallel_for(out.cells.size(), threads, [&](std::size_t i) {
    auto& c = out.cells[i];
    try {
      c.result = optimize(c.problem);
    } catch (const std::exception& e) {
      c.error = c.label() + ": " + e.what();
    }
  });

  bool any = false;
  for (int nd : defender_counts) {
    ContourPoint p;
    p.num_defenders = nd;
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
      const auto& c = out.cells[i];
      if (c.num_defenders != nd || !c.ok()) continue;
      if (!p.best || c.result->optimized_stp > p.stp) {
        p.best = i;
        p.stp = c.result->optimized_stp;
      }
    }
    any = any || p.best.has_value();
    out.contour.push_back(p);
  }
  if (!any) {
    std::string msg = "sweep: every cell failed";
    if (!out.cells.empty()) msg += "; first: " + out.cells.front().error;
    throw NumericalError(msg);
  }
  return out;
}

std::optional<DefenderSelection> min_defenders(const SweepResult& s, double threshold) {
  std::optional<DefenderSelection> best;
  for (const auto& p : s.contour) {
    if (!p.best || p.stp < threshold) continue;
    if (best && best->num_defenders <= p.num_defenders) continue;
    const auto& c = s.cells[*p.best];
    best = DefenderSelection{p.num_defenders, c.motion, c.ramp_to_max, p.stp};
  }
  return best;
}

std::string sweep_grid_csv(const SweepResult& s) {
  std::ostringstream os;
  os.precision(10);
  os << "num_defenders,motion,ramp,initial_stp,optimized_stp,max_violation,iterations,status\n";
  for (const auto& c : s.cells) {
    os << c.num_defenders << ',' << to_string(c.motion) << ',' << (c.ramp_to_max ? 1 : 0) << ',';
    if (c.ok()) {
      const auto& r = *c.result;
      os << r.initial_stp << ',' << r.optimized_stp << ',' << r.violations.max() << ',' << r.iterations << ",ok\n";
    } else {
      os << ",,,,failed\n";
    }
  }
  return os.str();
}

std::string sweep_plot_csv(const SweepResult& s) {
  std::ostringstream os;
  os.precision(10);
  os << "num_defenders";
  for (bool ramp : s.ramp_flags) {
    for (MotionType m : s.motions) os << ',' << to_string(m) << (ramp ? "_ramp" : "");
  }
  os << ",best\n";
  for (const auto& p : s.contour) {
    os << p.num_defenders;
    for (const auto& c : s.cells) {
      if (c.num_defenders != p.num_defenders) continue;
      os << ',';
      if (c.ok()) os << c.result->optimized_stp;
    }
    os << ',';
    if (p.best) os << p.stp;
    os << '\n';
  }
  return os.str();
}

std::string selection_json(const SweepResult& s, const std::vector<double>& thresholds) {
  nlohmann::json j;
  j["seed"] = s.seed;
  nlohmann::json contour = nlohmann::json::array();
  for (const auto& p : s.contour) {
    nlohmann::json e = {{"num_defenders", p.num_defenders}};
    if (p.best) {
      const auto& c = s.cells[*p.best];
      e["stp"] = p.stp;
      e["motion"] = std::string(to_string(c.motion));
      e["ramp_to_max"] = c.ramp_to_max;
    } else {
      e["stp"] = nullptr;
    }
    contour.push_back(e);
  }
  j["contour"] = contour;
  nlohmann::json sel = nlohmann::json::array();
  for (double t : thresholds) {
    nlohmann::json e = {{"threshold", t}};
    if (auto m = min_defenders(s, t)) {
      e["num_defenders"] = m->num_defenders;
      e["motion"] = std::string(to_string(m->motion));
      e["ramp_to_max"] = m->ramp_to_max;
      e["stp"] = m->stp;
    } else {
      e["num_defenders"] = nullptr;
    }
    sel.push_back(e);
  }
  j["selections"] = sel;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& c : s.cells) {
    if (!c.ok()) failures.push_back(c.error);
  }
  j["failures"] = failures;
  return j.dump(2);
}

}  // namespace swarm
