#include "swarm/stp.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

using namespace swarm;

namespace {

Classifier model_for(int window, std::uint64_t seed) {
  CnnSpec s;
  s.window = window;
  s.features = 40;
  s.conv = {{6, 3}};
  s.pool = 2;
  s.dropout = 0.0;
  Classifier c{CnnModel(s), ScalerStats{std::vector<double>(40, 0.0), std::vector<double>(40, 2500.0)}};
  if (seed != 0) c.model.initialize(seed);
  return c;
}

TrajectoryLimits box_limits() {
  TrajectoryLimits l;
  l.area = OperationalArea::box({-50, -50}, {50, 50});
  return l;
}

}  // namespace

TEST_SUITE("stp") {
  TEST_CASE("stp is 100 times the trace") {
    PredictionStack s;
    for (auto& row : s.p) row.fill(0.25);
    CHECK(stp(s) == 100.0);
    PredictionStack id;
    for (std::size_t k = 0; k < 4; ++k) id.p[k][k] = 1.0;
    CHECK(stp(id) == 400.0);
    PredictionStack one;
    one.p[0] = {0.94, 0.01, 0.03, 0.02};
    CHECK(stp(one) == doctest::Approx(94.0));
    CHECK(one.true_predictions()[0] == 0.94);
  }

  TEST_CASE("uniform classifier stack") {
    const auto clf = model_for(12, 0);
    EngagementConfig cfg;
    cfg.seed = 1300;
    const auto path = initial_guess(motion_plan_for(cfg, MotionType::Star), cfg, 12);
    const auto s = stack_predictions(clf, path, cfg);
    for (const auto& row : s.p) {
      for (double v : row) CHECK(v == 0.25);
    }
    CHECK(stp(s) == 100.0);
  }

  TEST_CASE("rows are distributions and STP stays in range") {
    const auto clf = model_for(12, 3);
    EngagementConfig cfg;
    cfg.seed = 1301;
    for (MotionType m : kAllMotionTypes) {
      const auto s = stack_predictions(clf, initial_guess(motion_plan_for(cfg, m), cfg, 14), cfg);
      for (const auto& row : s.p) {
        double sum = 0.0;
        for (double v : row) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
          sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
      }
      CHECK(stp(s) >= 0.0);
      CHECK(stp(s) <= 400.0);
    }
  }

  TEST_CASE("stack_predictions rejects short paths and feature mismatch") {
    const auto clf = model_for(12, 3);
    EngagementConfig cfg;
    const auto path = initial_guess(motion_plan_for(cfg, MotionType::Star), cfg, 11);
    CHECK_THROWS_AS(stack_predictions(clf, path, cfg), std::invalid_argument);
    EngagementConfig fewer = cfg;
    fewer.num_adversaries = 5;
    CHECK_THROWS_AS(stack_predictions(clf, initial_guess(motion_plan_for(fewer, MotionType::Star), fewer, 12), fewer),
                    std::invalid_argument);
  }

  TEST_CASE("ramp flag changes the initial STP") {
    const auto clf = model_for(12, 5);
    EngagementConfig cfg;
    cfg.seed = 1302;
    const auto a = initial_guess(motion_plan_for(cfg, MotionType::Semi, false), cfg, 12);
    const auto b = initial_guess(motion_plan_for(cfg, MotionType::Semi, true), cfg, 12);
    CHECK(a.row(0)[0] == b.row(0)[0]);
    CHECK(stp(stack_predictions(clf, a, cfg)) != stp(stack_predictions(clf, b, cfg)));
  }

  TEST_CASE("straight plan bearings") {
    EngagementConfig cfg;
    const auto path = initial_guess(motion_plan_for(cfg, MotionType::Straight), cfg, 8);
    for (std::size_t d = 0; d < path.agents(); ++d) {
      const Vec2 disp = path.at(7, d) - path.at(0, d);
      CHECK(rad_to_deg(std::atan2(disp.y, disp.x)) == doctest::Approx(45.0).epsilon(1e-12));
    }
  }

  TEST_CASE("constraint values") {
    auto lim = box_limits();
    lim.v_min = 0.0;
    lim.d_min = 1.0;
    TrajectoryMatrix still(5, 2, 1.0);
    for (std::size_t t = 0; t < 5; ++t) {
      still.set(t, 0, {0, 0});
      still.set(t, 1, {3, 0});
    }
    const std::vector<double> row0(still.row(0).begin(), still.row(0).end());
    const auto v = constraint_eval(still, row0, lim);
    CHECK(v.area.size() == 4 * 2);
    CHECK(v.max_speed.size() == 4 * 2);
    CHECK(v.max_accel.size() == 3 * 2);
    CHECK(v.collision.size() == 5);
    CHECK(summarize(v).max() <= 0.0);

    // Defender 1 coincident with defender 0 at t = 2.
    auto hit = still;
    hit.set(2, 1, {0, 0});
    CHECK(summarize(constraint_eval(hit, row0, lim)).collision == 1.0);

    // One point 4 units past the right edge.
    auto out = still;
    out.set(1, 1, {54, 0});
    const auto r = summarize(constraint_eval(out, row0, lim));
    CHECK(r.area == doctest::Approx(4.0));
    CHECK(r.max_speed == doctest::Approx(51.0 - lim.v_max));
    CHECK(r.violated(1e-3) == std::vector<std::string>{"area", "max_speed", "max_accel"});

    // Moving the initial row is reported.
    auto moved = still;
    moved.set(0, 0, {0.5, 0});
    CHECK(summarize(constraint_eval(moved, row0, lim)).initial == 0.5);

    lim.v_min = 0.2;
    CHECK(summarize(constraint_eval(still, row0, lim)).min_speed == doctest::Approx(0.2));
  }

  TEST_CASE("constraint gradients match finite differences") {
    auto lim = box_limits();
    lim.v_min = 0.3;
    lim.d_min = 2.0;
    EngagementConfig cfg;
    cfg.num_defenders = 3;
    auto path = initial_guess(motion_plan_for(cfg, MotionType::Semi), cfg, 6);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 0.3);
    for (auto& v : path.data()) v += g(rng);
    std::vector<ConstraintTerm> terms;
    for_each_constraint(path, lim, [&](const ConstraintTerm& c) { terms.push_back(c); });
    const double h = 1e-6;
    for (std::size_t i = 0; i < path.data().size(); ++i) {
      auto plus = path, minus = path;
      plus.data()[i] += h;
      minus.data()[i] -= h;
      std::vector<double> vp, vm;
      for_each_constraint(plus, lim, [&](const ConstraintTerm& c) { vp.push_back(c.value); });
      for_each_constraint(minus, lim, [&](const ConstraintTerm& c) { vm.push_back(c.value); });
      const std::size_t row = i / path.cols();
      const std::size_t agent = (i % path.cols()) / 2;
      const bool is_x = i % 2 == 0;
      for (std::size_t k = 0; k < terms.size(); ++k) {
        double analytic = 0.0;
        for (int q = 0; q < terms[k].count; ++q) {
          const auto& p = terms[k].partials[static_cast<std::size_t>(q)];
          if (p.row == row && p.agent == agent) analytic += is_x ? p.d.x : p.d.y;
        }
        CHECK(analytic == doctest::Approx((vp[k] - vm[k]) / (2 * h)).epsilon(1e-5).scale(1.0));
      }
    }
  }

  TEST_CASE("path length") {
    TrajectoryMatrix p(3, 1, 1.0);
    p.set(1, 0, {3, 4});
    p.set(2, 0, {3, 0});
    CHECK(path_length(p) == 9.0);
  }
}
