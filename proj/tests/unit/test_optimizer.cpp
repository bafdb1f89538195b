#include "swarm/config.hpp"
#include "swarm/error.hpp"
#include "swarm/optimizer.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>

using namespace swarm;

namespace {

Classifier random_model(int window, std::uint64_t seed) {
  CnnSpec s;
  s.window = window;
  s.features = 40;
  s.conv = {{6, 3}};
  s.pool = 2;
  s.dropout = 0.0;
  Classifier c{CnnModel(s), ScalerStats{std::vector<double>(40, 0.0), std::vector<double>(40, 2500.0)}};
  c.model.initialize(seed);
  // Sharpen the output so STP reacts to the input.
  auto p = c.model.parameters();
  for (auto& w : p) w *= 20.0;
  return c;
}

OptimizationProblem problem_for(const Classifier& clf, int defenders, MotionType m, std::uint64_t seed) {
  OptimizationProblem p;
  p.classifier = &clf;
  p.engagement.num_defenders = defenders;
  p.engagement.seed = seed;
  p.plan = motion_plan_for(p.engagement, m);
  p.limits.area = OperationalArea::box({-50, -50}, {50, 50});
  p.solver.max_iterations = 4;
  p.solver.threads = 1;
  return p;
}

}  // namespace

TEST_SUITE("optimizer") {
  TEST_CASE("zero iterations returns the initial guess") {
    const auto clf = random_model(10, 1);
    auto p = problem_for(clf, 3, MotionType::PerpL, 1301);
    p.solver.max_iterations = 0;
    const auto r = optimize(p);
    CHECK(r.trajectory == r.guess);
    CHECK(r.optimized_stp == r.initial_stp);
    CHECK(r.iterations == 0);
    CHECK(r.trajectory == initial_guess(p.plan, p.engagement, 10));
  }

  TEST_CASE("runs are monotone, feasible and reproducible") {
    const auto clf = random_model(10, 2);
    for (MotionType m : {MotionType::Star, MotionType::Straight}) {
      auto p = problem_for(clf, 4, m, 1302);
      const auto r = optimize(p);
      CHECK(r.optimized_stp >= r.initial_stp);
      CHECK(r.violations.max() <= p.solver.tolerance);
      CHECK(r.violations.initial == 0.0);
      CHECK(stp(stack_predictions(clf, r.trajectory, p.engagement)) == r.optimized_stp);
      for (std::size_t i = 1; i < r.log.size(); ++i) CHECK(r.log[i].stp >= r.log[i - 1].stp);
      for (const auto& e : r.log) CHECK(e.max_violation <= p.solver.tolerance);

      p.solver.threads = 3;
      const auto again = optimize(p);
      CHECK(again.trajectory == r.trajectory);
      CHECK(again.evaluations == r.evaluations);
    }
  }

  TEST_CASE("infeasible guess is repaired or refused") {
    const auto clf = random_model(10, 3);
    auto p = problem_for(clf, 3, MotionType::Semi, 1303);
    p.limits.d_min = 0.0;
    p.limits.v_min = 0.9;
    p.solver.max_iterations = 1;
    const auto r = optimize(p);
    CHECK(r.initial_violations.min_speed > p.solver.tolerance);
    CHECK(r.repaired);
    CHECK(r.violations.max() <= p.solver.tolerance);

    auto far = problem_for(clf, 3, MotionType::Semi, 1303);
    far.limits.area = OperationalArea::box({100, 100}, {200, 200});
    try {
      (void)optimize(far);
      FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("area") != std::string::npos);
    }
  }

  TEST_CASE("initial candidates are ranked without drops") {
    const auto clf = random_model(10, 4);
    const auto p = problem_for(clf, 5, MotionType::Star, 1304);
    const auto plans = candidate_plans(p.engagement, {false, true});
    REQUIRE(plans.size() == 10);
    const auto ranking = evaluate_initial_trajectories(p, plans);
    REQUIRE(ranking.size() == 10);
    for (std::size_t i = 1; i < ranking.size(); ++i) CHECK(ranking[i - 1].stp >= ranking[i].stp);
    int count[5][2] = {};
    for (const auto& c : ranking) {
      ++count[static_cast<int>(c.motion)][c.ramp_to_max];
      CHECK(c.stack.true_predictions().size() == 4);
    }
    for (auto& row : count) {
      CHECK(row[0] == 1);
      CHECK(row[1] == 1);
    }
    const auto same = evaluate_initial_trajectories(p, {plans[2], plans[2]});
    CHECK(same[0].stp == same[1].stp);
  }

  TEST_CASE("ties in initial STP prefer lower violation then shorter path") {
    CnnSpec s;
    s.window = 10;
    s.features = 40;
    s.conv = {{2, 3}};
    s.pool = 2;
    Classifier uniform{CnnModel(s), ScalerStats{std::vector<double>(40, 0.0), std::vector<double>(40, 1.0)}};
    auto p = problem_for(uniform, 3, MotionType::Star, 1305);
    p.limits.d_min = 0.0;
    auto slow = motion_plan_for(p.engagement, MotionType::Straight);
    auto fast = slow;
    for (auto& v : slow.speeds) v = 0.3;
    for (auto& v : fast.speeds) v = 0.9;
    const auto r = evaluate_initial_trajectories(p, {fast, slow});
    CHECK(r[0].stp == r[1].stp);
    CHECK(r[0].path_length < r[1].path_length);
  }

  TEST_CASE("problem file") {
    const auto cfg = KeyValueConfig::parse(
        "seed = 1500\nnum_defenders = 4\nmotion = PerpR\nramp = true\narea = -30,-30, 30,-30, 30,30, -30,30\n"
        "d_min = 0.75\nmax_iterations = 3\nhorizon = 20\n",
        "problem.cfg");
    const auto p = OptimizationProblem::from_config(cfg);
    CHECK(p.engagement.seed == 1500);
    CHECK(p.plan.motion == MotionType::PerpR);
    CHECK(p.plan.ramp_to_max);
    CHECK(p.plan.headings.size() == 4);
    CHECK(p.limits.area.area() == 3600.0);
    CHECK(p.limits.d_min == 0.75);
    CHECK(p.limits.v_max == p.engagement.defender_max_speed);
    CHECK(p.solver.max_iterations == 3);
    CHECK(p.steps() == 20);
    CHECK_THROWS_AS(OptimizationProblem::from_config(KeyValueConfig::parse("motion = Zigzag\n")), ConfigError);
    CHECK_THROWS_AS(OptimizationProblem::from_config(KeyValueConfig::parse("area = 0,0, 1,0, 1\n")), ConfigError);
    CHECK_THROWS_AS(OptimizationProblem::from_config(KeyValueConfig::parse("area = 0,0, 0,1, 1,1, 1,0\n")),
                    ConfigError);
    CHECK_THROWS_AS(OptimizationProblem::from_config(KeyValueConfig::parse("colour = red\n")), ConfigError);
  }

  TEST_CASE("result JSON carries the summary") {
    const auto clf = random_model(10, 6);
    auto p = problem_for(clf, 2, MotionType::Semi, 1306);
    p.solver.max_iterations = 1;
    const auto r = optimize(p);
    const auto j = result_json(p, r);
    CHECK(j.find("\"optimized_stp\"") != std::string::npos);
    CHECK(j.find("\"Auction+\"") != std::string::npos);
  }
}
