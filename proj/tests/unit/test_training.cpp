#include "swarm/training.hpp"

#include <doctest.h>

#include <stdexcept>

#include <random>
#include <sstream>

using namespace swarm;

namespace {

// Class k has a bump on feature k at a random time step.
LabeledDataset toy(std::size_t per_class, std::uint64_t seed) {
  LabeledDataset d;
  d.steps = 8;
  d.features = 4;
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> noise(0.0f, 0.1f);
  std::uniform_int_distribution<int> when(0, 7);
  for (std::size_t i = 0; i < 4 * per_class; ++i) {
    const int k = static_cast<int>(i % 4);
    const int t0 = when(rng);
    for (int t = 0; t < 8; ++t) {
      for (int f = 0; f < 4; ++f) d.values.push_back(noise(rng) + (f == k && t == t0 ? 3.0f : 0.0f));
    }
    d.labels.push_back(static_cast<std::uint8_t>(k));
    d.provenance.push_back({});
  }
  return d;
}

CnnSpec toy_spec() {
  CnnSpec s;
  s.window = 8;
  s.features = 4;
  s.conv = {{8, 3}};
  s.pool = 2;
  s.dropout = 0.0;
  return s;
}

}  // namespace

TEST_SUITE("training") {
  TEST_CASE("learns a separable toy problem") {
    const auto tr = toy(40, 1);
    const auto va = toy(10, 2);
    TrainConfig cfg;
    cfg.max_epochs = 150;
    cfg.patience = 150;
    cfg.learning_rate = 1e-2;
    cfg.batch_size = 16;
    const auto r = train(toy_spec(), tr, va, cfg);
    CHECK(evaluate(r.model, tr).accuracy == 1.0);
    CHECK(evaluate(r.model, toy(10, 3)).accuracy >= 0.9);
    CHECK(r.best_epoch >= 1);
    CHECK(r.history.size() <= 150);
    std::ostringstream os;
    write_history_csv(os, r.history);
    CHECK(os.str().rfind("epoch,", 0) == 0);
  }

  TEST_CASE("training is reproducible and independent of slicing") {
    const auto tr = toy(8, 4);
    const auto va = toy(4, 5);
    TrainConfig cfg;
    cfg.max_epochs = 3;
    const auto a = train(toy_spec(), tr, va, cfg);
    const auto b = train(toy_spec(), tr, va, cfg);
    CHECK(a.model == b.model);
    cfg.batch_slices = 4;
    cfg.threads = 2;
    const auto c = train(toy_spec(), tr, va, cfg);
    for (std::size_t i = 0; i < a.model.parameters().size(); ++i) {
      CHECK(c.model.parameters()[i] == doctest::Approx(a.model.parameters()[i]).epsilon(1e-9));
    }
  }

  TEST_CASE("early stopping keeps the best validation epoch") {
    const auto tr = toy(8, 6);
    const auto va = toy(4, 7);
    TrainConfig cfg;
    cfg.max_epochs = 40;
    cfg.patience = 2;
    const auto r = train(toy_spec(), tr, va, cfg);
    double best = 1e300;
    int best_epoch = 0;
    for (const auto& e : r.history) {
      if (e.val_loss < best) {
        best = e.val_loss;
        best_epoch = e.epoch;
      }
    }
    CHECK(r.best_epoch == best_epoch);
    CHECK(evaluate(r.model, va).mean_loss == doctest::Approx(best).epsilon(1e-9));
  }

  TEST_CASE("evaluation bookkeeping") {
    const auto d = toy(5, 8);
    CnnModel m(toy_spec());
    const auto e = evaluate(m, d);
    CHECK(e.count == 20);
    std::size_t total = 0;
    for (const auto& row : e.confusion) {
      for (auto c : row) total += c;
    }
    CHECK(total == 20);
    CHECK_THROWS(evaluate(m, LabeledDataset{8, 4, {}, {}, {}, {}}));
    CHECK_THROWS(train(toy_spec(), d, d, TrainConfig{.learning_rate = -1.0}));
  }
}
