#include "swarm/assignment.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <numeric>
#include <random>

using namespace swarm;

namespace {

// Exhaustive minimum over injective maps from the smaller side to the larger.
double brute_force_min(const std::vector<double>& cost, int rows, int cols) {
  const int k = std::min(rows, cols);
  std::vector<int> big(static_cast<std::size_t>(std::max(rows, cols)));
  std::iota(big.begin(), big.end(), 0);
  double best = 1e300;
  do {
    double s = 0.0;
    for (int i = 0; i < k; ++i) {
      const int r = rows <= cols ? i : big[static_cast<std::size_t>(i)];
      const int c = rows <= cols ? big[static_cast<std::size_t>(i)] : i;
      s += cost[static_cast<std::size_t>(r * cols + c)];
    }
    best = std::min(best, s);
  } while (std::next_permutation(big.begin(), big.end()));
  return best;
}

}  // namespace

TEST_SUITE("assignment") {
  TEST_CASE("hungarian matches exhaustive search on small matrices") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> size(1, 5);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
      const int rows = size(rng);
      const int cols = size(rng);
      std::vector<double> cost(static_cast<std::size_t>(rows * cols));
      for (auto& c : cost) c = u(rng);
      const auto match = min_cost_assignment(cost, rows, cols);
      REQUIRE(match.size() == static_cast<std::size_t>(rows));
      double total = 0.0;
      std::vector<int> used(static_cast<std::size_t>(cols), 0);
      int matched = 0;
      for (int r = 0; r < rows; ++r) {
        const int c = match[static_cast<std::size_t>(r)];
        if (c < 0) continue;
        ++matched;
        CHECK(++used[static_cast<std::size_t>(c)] == 1);
        total += cost[static_cast<std::size_t>(r * cols + c)];
      }
      CHECK(matched == std::min(rows, cols));
      CHECK(total == doctest::Approx(brute_force_min(cost, rows, cols)).epsilon(1e-12));
    }
  }

  TEST_CASE("nearest defender breaks ties toward the lower index") {
    const std::vector<Vec2> adv = {{0, 0}, {5, 0}};
    const std::vector<Vec2> def = {{1, 0}, {-1, 0}, {5, 2}, {5, -2}};
    CHECK(nearest_defender(adv, def) == std::vector<int>{0, 2});
  }

  TEST_CASE("auction is one-to-one when defenders suffice") {
    const std::vector<Vec2> adv = {{0, 0}, {0.5, 0}};
    const std::vector<Vec2> def = {{1, 0}, {-3, 0}};
    CHECK(assign_targets(adv, def, Tactic::Greedy) == std::vector<int>{0, 0});
    const auto a = assign_targets(adv, def, Tactic::Auction);
    CHECK(a[0] != a[1]);
    CHECK(assign_targets(adv, def, Tactic::AuctionPlus) == a);
  }

  TEST_CASE("surplus adversaries fall back to nearest") {
    const std::vector<Vec2> adv = {{0, 0}, {10, 0}, {11, 0}};
    const std::vector<Vec2> def = {{10.5, 0}};
    CHECK(assign_targets(adv, def, Tactic::Auction) == std::vector<int>{0, 0, 0});
  }

  TEST_CASE("no defenders is an error") {
    const std::vector<Vec2> adv = {{0, 0}};
    CHECK_THROWS_AS(assign_targets(adv, {}, Tactic::Greedy), std::invalid_argument);
  }

  TEST_CASE("assignment_cost skips unmatched entries") {
    const std::vector<Vec2> adv = {{0, 0}, {3, 4}};
    const std::vector<Vec2> def = {{0, 0}};
    const std::vector<int> t = {-1, 0};
    CHECK(assignment_cost(adv, def, t) == 5.0);
  }
}
