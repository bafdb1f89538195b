#include "swarm/engagement.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace swarm;

TEST_SUITE("engagement") {
  TEST_CASE("motion plan headings and speeds") {
    for (MotionType m : kAllMotionTypes) {
      const auto [lo, hi] = heading_interval_deg(m);
      const auto plan = generate_motion_plan(m, 50, 0.25, 1.0, 9);
      REQUIRE(plan.headings.size() == 50);
      for (std::size_t i = 0; i < 50; ++i) {
        const double deg = rad_to_deg(plan.headings[i]);
        CHECK(deg >= lo - 1e-9);
        CHECK(deg <= hi + 1e-9);
        CHECK(plan.speeds[i] >= 0.25);
        CHECK(plan.speeds[i] <= 1.0);
      }
    }
    CHECK(heading_interval_deg(MotionType::Star) == std::pair{0.0, 90.0});
    CHECK(heading_interval_deg(MotionType::Semi) == std::pair{-45.0, 135.0});
    CHECK(heading_interval_deg(MotionType::Straight) == std::pair{45.0, 45.0});
    CHECK(heading_interval_deg(MotionType::PerpL) == std::pair{135.0, 135.0});
    CHECK(heading_interval_deg(MotionType::PerpR) == std::pair{-45.0, -45.0});
  }

  TEST_CASE("initialisation is reproducible and independent of defender count") {
    EngagementConfig a;
    a.seed = 17;
    EngagementConfig b = a;
    b.num_defenders = 3;
    const auto sa = init_engagement(a);
    CHECK(init_engagement(a) == sa);
    CHECK(init_engagement(b).adversaries == sa.adversaries);
    for (std::size_t i = 0; i < sa.defenders.size(); ++i) {
      CHECK(norm(sa.defenders[i].position) <= a.defender_dispersion);
      for (std::size_t j = i + 1; j < sa.defenders.size(); ++j) {
        CHECK(distance(sa.defenders[i].position, sa.defenders[j].position) >= a.defender_min_spacing);
      }
    }
    for (const auto& adv : sa.adversaries) {
      CHECK(distance(adv.position, a.adversary_center()) <= a.adversary_dispersion);
      CHECK(adv.velocity == Vec2{});
    }
  }

  TEST_CASE("simulation is deterministic and respects speed caps") {
    EngagementConfig cfg;
    cfg.seed = 5;
    for (Tactic t : kAllTactics) {
      const auto plan = motion_plan_for(cfg, MotionType::Semi);
      const auto r1 = simulate_engagement(cfg, plan, t);
      const auto r2 = simulate_engagement(cfg, plan, t);
      CHECK(r1.adversary_positions == r2.adversary_positions);
      CHECK(r1.adversary_positions.steps() == static_cast<std::size_t>(r1.steps + 1));
      for (std::size_t s = 0; s < r1.adversary_velocities.steps(); ++s) {
        for (std::size_t a = 0; a < r1.adversary_velocities.agents(); ++a) {
          CHECK(norm(r1.adversary_velocities.at(s, a)) <= cfg.adversary_max_speed + 1e-12);
        }
      }
      const auto k = derive_kinematics(r1.defender_positions);
      for (std::size_t s = 0; s < k.velocity.steps(); ++s) {
        for (std::size_t d = 0; d < k.velocity.agents(); ++d) {
          CHECK(norm(k.velocity.at(s, d)) <= cfg.defender_max_speed + 1e-9);
        }
      }
    }
  }

  TEST_CASE("tactics share the initial condition but differ in response") {
    EngagementConfig cfg;
    cfg.seed = 8;
    const auto plan = motion_plan_for(cfg, MotionType::Star);
    const auto g = simulate_engagement(cfg, plan, Tactic::Greedy);
    const auto gp = simulate_engagement(cfg, plan, Tactic::GreedyPlus);
    CHECK(g.adversary_positions.head(1) == gp.adversary_positions.head(1));
    CHECK_FALSE(g.adversary_positions.head(10) == gp.adversary_positions.head(10));
  }

  TEST_CASE("update order: position uses the pre-update velocity") {
    EngagementConfig cfg;
    cfg.num_defenders = 1;
    cfg.num_adversaries = 1;
    EngagementState s;
    s.defenders = {{{0, 0}, {1, 0}}};
    s.adversaries = {{{100, 100}, {0, 0}}};
    const std::vector<Vec2> acc = {{0, 0.5}};
    const auto n = step(s, acc, Tactic::Greedy, cfg);
    CHECK(n.defenders[0].position == Vec2{1, 0});
    CHECK(n.defenders[0].velocity.x == doctest::Approx(1.0 / std::sqrt(1.25)));
    CHECK(norm(n.defenders[0].velocity) == doctest::Approx(cfg.defender_max_speed));
  }

  TEST_CASE("derive_kinematics of a parabola") {
    TrajectoryMatrix p(6, 1, 1.0);
    for (std::size_t t = 0; t < 6; ++t) p.set(t, 0, {double(t * t), 0.0});
    const auto k = derive_kinematics(p);
    REQUIRE(k.velocity.steps() == 5);
    REQUIRE(k.acceleration.steps() == 4);
    for (std::size_t t = 0; t < 4; ++t) CHECK(k.acceleration.at(t, 0).x == 2.0);
    CHECK(k.velocity.at(2, 0).x == 5.0);
    CHECK_THROWS_AS(derive_kinematics(p.head(2)), std::invalid_argument);
  }

  TEST_CASE("ramp plan accelerates from rest to the cap") {
    EngagementConfig cfg;
    auto plan = motion_plan_for(cfg, MotionType::Straight, true);
    const auto start = init_engagement(cfg, &plan).defender_positions();
    const auto path = plan_trajectory(plan, start, cfg, 12);
    const auto k = derive_kinematics(path);
    for (std::size_t d = 0; d < path.agents(); ++d) {
      double prev = -1.0;
      for (std::size_t t = 0; t < k.velocity.steps(); ++t) {
        const double s = norm(k.velocity.at(t, d));
        CHECK(s >= prev - 1e-12);
        CHECK(s <= cfg.defender_max_speed + 1e-12);
        prev = s;
      }
      CHECK(prev == doctest::Approx(cfg.defender_max_speed));
      const Vec2 disp = path.at(11, d) - path.at(0, d);
      CHECK(rad_to_deg(std::atan2(disp.y, disp.x)) == doctest::Approx(45.0));
    }
  }

  TEST_CASE("explicit defender path is followed verbatim") {
    EngagementConfig cfg;
    const auto plan = motion_plan_for(cfg, MotionType::PerpL);
    const auto path = plan_trajectory(plan, init_engagement(cfg, &plan).defender_positions(), cfg, 15);
    const auto rec = simulate_engagement(cfg, path, Tactic::Auction);
    CHECK(rec.defender_positions == path);
    CHECK(rec.adversary_positions.steps() == 15);
    TrajectoryMatrix wrong(15, 2, 1.0);
    CHECK_THROWS_AS(simulate_engagement(cfg, wrong, Tactic::Auction), std::invalid_argument);
  }

  TEST_CASE("config validation") {
    EngagementConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.defender_min_speed = 2.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}
