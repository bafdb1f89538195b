#include "swarm/cnn.hpp"
#include "swarm/training.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace swarm;

namespace {

CnnSpec small_spec() {
  CnnSpec s;
  s.window = 9;
  s.features = 4;
  s.conv = {{3, 3}, {2, 2}};
  s.pool = 2;
  s.dropout = 0.2;
  s.classes = 4;
  return s;
}

std::vector<double> random_input(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

}  // namespace

TEST_SUITE("cnn") {
  TEST_CASE("same-padded convolution of a ramp") {
    CnnSpec s;
    s.window = 5;
    s.features = 1;
    s.conv = {{1, 3}};
    s.pool = 1;
    s.dropout = 0.0;
    CnnModel m(s);
    auto p = m.parameters();
    std::fill(p.begin(), p.end(), 0.0);
    p[0] = 1.0;
    p[1] = 0.0;
    p[2] = -1.0;
    const std::vector<double> ramp = {0, 1, 2, 3, 4};
    CHECK(m.conv_output(ramp, 0) == std::vector<double>{-1, -2, -2, -2, 3});
  }

  TEST_CASE("layer lengths use ceil pooling") {
    const auto s = CnnSpec::defender_motion();
    CHECK(s.lengths() == std::vector<int>{20, 7, 3, 1});
    CHECK(CnnSpec::defender_number().lengths() == std::vector<int>{20, 4});
    CHECK(CnnSpec::measurement_noise().lengths() == std::vector<int>{50, 17, 6, 2});
    CnnSpec bad = s;
    bad.conv.back().kernel = 9;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("preset specs") {
    const auto n = CnnSpec::defender_number();
    CHECK(n.window == 20);
    CHECK(n.conv == std::vector<ConvLayerSpec>{{32, 7}});
    CHECK(n.pool == 5);
    CHECK(n.dropout == 0.1);
    const auto m = CnnSpec::defender_motion();
    CHECK(m.conv == std::vector<ConvLayerSpec>{{64, 7}, {64, 5}, {64, 3}});
    CHECK(m.pool == 3);
    CHECK(m.dropout == 0.4);
    CHECK(CnnSpec::measurement_noise().window == 50);
    // conv 7*40*32+32, dense 32*4+4.
    CHECK(n.parameter_count() == 7 * 40 * 32 + 32 + 32 * 4 + 4);
    CHECK(CnnModel(n).parameters().size() == n.parameter_count());
  }

  TEST_CASE("softmax output and inference determinism") {
    const auto s = small_spec();
    CnnModel m(s);
    m.initialize(3);
    const auto x = random_input(9 * 4, 1);
    const auto p = m.forward(x);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.forward(x) == p);
    std::vector<double> batch(x);
    batch.insert(batch.end(), x.begin(), x.end());
    std::vector<double> probs(8);
    m.predict(batch, 2, probs);
    for (int k = 0; k < 4; ++k) {
      CHECK(probs[static_cast<std::size_t>(k)] == doctest::Approx(p[static_cast<std::size_t>(k)]).epsilon(1e-12));
      CHECK(probs[static_cast<std::size_t>(4 + k)] == doctest::Approx(p[static_cast<std::size_t>(k)]).epsilon(1e-12));
    }
    CHECK(m.forward_train(x, 7) == m.forward_train(x, 7));
  }

  TEST_CASE("zero weights give a uniform classifier") {
    CnnModel m(small_spec());
    for (double p : m.forward(random_input(36, 2))) CHECK(p == 0.25);
  }

  TEST_CASE("reverse-mode gradients agree with central differences") {
    const auto s = small_spec();
    CnnModel m(s);
    m.initialize(11);
    const auto x = random_input(36, 4);
    const double h = 1e-4;
    for (const GradientHead head : {GradientHead::loss(2), GradientHead::probability(1), GradientHead::logit(3)}) {
      const auto g = gradient(m, x, head);
      auto value = [&](const CnnModel& mm, std::span<const double> in) { return gradient(mm, in, head).value; };
      double worst = 0.0;
      for (std::size_t i = 0; i < g.weights.size(); ++i) {
        CnnModel a = m, b = m;
        a.parameters()[i] += h;
        b.parameters()[i] -= h;
        worst = std::max(worst, rel_err(g.weights[i], (value(a, x) - value(b, x)) / (2 * h)));
      }
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto a = x, b = x;
        a[i] += h;
        b[i] -= h;
        worst = std::max(worst, rel_err(g.input[i], (value(m, a) - value(m, b)) / (2 * h)));
      }
      CHECK(worst < 1e-3);
    }
  }

  TEST_CASE("batch loss gradient is the mean of per-sample gradients") {
    const auto s = small_spec();
    CnnModel m(s);
    m.initialize(8);
    const auto x = random_input(3 * 36, 9);
    const std::vector<std::uint8_t> labels = {0, 3, 1};
    std::vector<double> grad(m.parameters().size(), 0.0);
    const double loss = m.loss_and_gradient(x, labels, grad, 0);
    std::vector<double> expect(grad.size(), 0.0);
    double expect_loss = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const auto g = gradient(m, std::span<const double>(x).subspan(i * 36, 36), GradientHead::loss(labels[i]));
      expect_loss += g.value / 3.0;
      for (std::size_t k = 0; k < grad.size(); ++k) expect[k] += g.weights[k] / 3.0;
    }
    CHECK(loss == doctest::Approx(expect_loss).epsilon(1e-12));
    for (std::size_t k = 0; k < grad.size(); ++k) CHECK(grad[k] == doctest::Approx(expect[k]).epsilon(1e-9).scale(1e-9));
  }

  TEST_CASE("saliency aggregates per agent") {
    CnnModel m(small_spec());
    m.initialize(2);
    const auto x = random_input(36, 6);
    const auto map = saliency_map(m, x, 1);
    REQUIRE(map.size() == 36);
    for (double v : map) CHECK(v >= 0.0);
    const auto agents = aggregate_by_agent(map, 9, 4);
    REQUIRE(agents.size() == 9);
    CHECK(agents[3] == doctest::Approx(map[12] + map[13] + map[14] + map[15]));
  }

  TEST_CASE("normalized error rate") {
    CHECK(normalized_error_rate(1.0) == 0.0);
    CHECK(normalized_error_rate(0.25) == 1.0);
    CHECK(normalized_error_rate(0.625) == 0.5);
  }
}
