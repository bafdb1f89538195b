#include "swarm/polygon.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>

using namespace swarm;

TEST_SUITE("polygon") {
  TEST_CASE("validation") {
    CHECK_THROWS_AS(OperationalArea({{0, 0}, {1, 0}}), std::invalid_argument);
    // Clockwise.
    CHECK_THROWS_AS(OperationalArea({{0, 0}, {0, 1}, {1, 1}, {1, 0}}), std::invalid_argument);
    // Collinear vertex.
    CHECK_THROWS_AS(OperationalArea({{0, 0}, {1, 0}, {2, 0}, {2, 2}}), std::invalid_argument);
    // Reflex vertex.
    CHECK_THROWS_AS(OperationalArea({{0, 0}, {4, 0}, {2, 1}, {4, 4}, {0, 4}}), std::invalid_argument);
    // Pentagram: every turn is left but it winds twice.
    std::vector<Vec2> star;
    for (int k = 0; k < 5; ++k) star.push_back(from_heading(deg_to_rad(90.0 + 144.0 * k), 1.0));
    CHECK_THROWS_AS(OperationalArea{star}, std::invalid_argument);
    CHECK_NOTHROW(OperationalArea({{0, 0}, {1, 0}, {0, 1}}));
  }

  TEST_CASE("signed distances") {
    const auto box = OperationalArea::box({-2, -1}, {2, 1});
    CHECK(box.area() == 8.0);
    CHECK(box.violation({0, 0}) == -1.0);
    CHECK(box.violation({0, 3.5}) == doctest::Approx(2.5));
    CHECK(box.violation({-2.75, 0.2}) == doctest::Approx(0.75));
    CHECK(box.contains({2, 1}));
    CHECK_FALSE(box.contains({2.001, 0}));

    const OperationalArea tri({{0, 0}, {4, 0}, {0, 4}});
    // Outside the hypotenuse x + y = 4 by d along its normal.
    const double d = 1.3;
    const Vec2 p = Vec2{2, 2} + d * Vec2{1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
    CHECK(tri.violation(p) == doctest::Approx(d).epsilon(1e-12));
    for (std::size_t k = 0; k < tri.edges(); ++k) CHECK(norm(tri.normal(k)) == doctest::Approx(1.0));
  }
}
