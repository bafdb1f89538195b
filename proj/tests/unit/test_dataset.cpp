#include "swarm/dataset.hpp"
#include "swarm/voi.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>

using namespace swarm;

namespace {

LabeledDataset synthetic(std::size_t per_label, std::size_t steps, std::size_t features, std::uint64_t seed) {
  LabeledDataset d;
  d.steps = steps;
  d.features = features;
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(3.0f, 2.0f);
  for (std::size_t i = 0; i < 4 * per_label; ++i) {
    d.labels.push_back(static_cast<std::uint8_t>(i % 4));
    d.provenance.push_back({i, 1, 0, 0, 0.0f});
    for (std::size_t k = 0; k < steps * features; ++k) d.values.push_back(n(rng));
  }
  return d;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("generate_subdataset yields four balanced instances per engagement") {
    SubDatasetRequest req;
    req.engagements = 6;
    req.first_seed = 40;
    req.point.num_defenders = 4;
    req.point.motion = MotionType::PerpR;
    GenerationReport rep;
    const auto d = generate_subdataset(req, &rep);
    CHECK(d.size() == 24);
    CHECK(d.features == 40);
    CHECK(d.steps >= req.min_rows);
    CHECK(d.class_counts() == std::vector<std::size_t>{6, 6, 6, 6});
    CHECK(d.provenance[0].num_defenders == 4);
    CHECK(d.provenance[0].motion == static_cast<int>(MotionType::PerpR));
    CHECK(d.provenance[0].seed == 40);
    CHECK(rep.rejected_engagements == 0);
    // Same seed, same data.
    CHECK(generate_subdataset(req) == d);
  }

  TEST_CASE("short engagements are rejected whole") {
    SubDatasetRequest req;
    req.engagements = 3;
    req.min_rows = 500;
    req.base.max_steps = 20;
    GenerationReport rep;
    const auto d = generate_subdataset(req, &rep);
    CHECK(d.size() == 0);
    CHECK(rep.rejected_engagements == 3);
    CHECK_FALSE(rep.diagnostics.empty());
  }

  TEST_CASE("stratified split counts") {
    const auto d = synthetic(1200, 2, 3, 1);
    const auto s = split(d, {}, 7);
    CHECK(s.train.size() == 2880);
    CHECK(s.validation.size() == 720);
    CHECK(s.test.size() == 1200);
    CHECK(s.train.class_counts() == std::vector<std::size_t>{720, 720, 720, 720});
    CHECK(s.test.class_counts() == std::vector<std::size_t>{300, 300, 300, 300});
    // Disjoint and exhaustive by provenance seed.
    std::vector<int> seen(d.size(), 0);
    for (const auto* part : {&s.train, &s.validation, &s.test}) {
      for (const auto& p : part->provenance) ++seen[p.seed];
    }
    for (int c : seen) CHECK(c == 1);
    CHECK(split(d, {}, 7) == s);
    CHECK_THROWS_AS(split(d, {0.5, 0.2, 0.2}, 7), std::invalid_argument);
  }

  TEST_CASE("combine concatenates and truncates") {
    auto a = synthetic(2, 5, 3, 1);
    auto b = synthetic(3, 4, 3, 2);
    const auto first = std::vector<float>(a.instance(0).begin(), a.instance(0).begin() + 12);
    const auto c = combine({a, b});
    CHECK(c.size() == 20);
    CHECK(c.steps == 4);
    CHECK(std::vector<float>(c.instance(0).begin(), c.instance(0).end()) == first);
    CHECK_THROWS_AS(combine({a, synthetic(1, 4, 2, 3)}), std::invalid_argument);
  }

  TEST_CASE("noise statistics") {
    LabeledDataset d;
    d.steps = 100;
    d.features = 4;
    d.values.assign(200 * 100 * 4, 1.0f);
    d.labels.assign(200, 0);
    d.provenance.assign(200, {});
    const double sigma = 10.0;
    const auto all = add_noise(d, sigma, 3);
    double sum = 0.0, sq = 0.0;
    for (float v : all.values) {
      sum += v - 1.0;
      sq += (v - 1.0) * (v - 1.0);
    }
    const double n = double(all.values.size());
    const double mean = sum / n;
    const double sd = std::sqrt(sq / n - mean * mean);
    // 80,000 draws: standard error of the mean is sigma / sqrt(n) ~ 0.035.
    CHECK(std::abs(mean) < 0.15);
    CHECK(sd == doctest::Approx(sigma).epsilon(0.02));
    CHECK(all.provenance[0].noise_sigma == 10.0f);

    const auto pos = add_noise(d, sigma, 3, NoiseChannels::PositionsOnly);
    for (std::size_t k = 0; k < pos.values.size(); k += 4) {
      CHECK(pos.values[k + 2] == 1.0f);
      CHECK(pos.values[k + 3] == 1.0f);
    }
    CHECK(add_noise(d, 0.0, 3).values == d.values);
    CHECK_THROWS_AS(add_noise(d, -1.0, 3), std::invalid_argument);
  }

  TEST_CASE("scaler standardises the fitting data") {
    const auto d = synthetic(50, 6, 5, 4);
    const auto stats = fit_scaler(d);
    const auto z = apply_scaler(d, stats);
    for (std::size_t f = 0; f < 5; ++f) {
      double s = 0.0, s2 = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t t = 0; t < 6; ++t) {
          const double v = z.instance(i)[t * 5 + f];
          s += v;
          s2 += v * v;
          ++n;
        }
      }
      CHECK(s / double(n) == doctest::Approx(0.0).scale(1.0).epsilon(1e-5));
      CHECK(s2 / double(n) == doctest::Approx(1.0).epsilon(1e-4));
    }
    CHECK(z.manifest.at("scaled_with") == stats.fingerprint());

    ScalerStats identity{std::vector<double>(5, 0.0), std::vector<double>(5, 1.0)};
    CHECK(apply_scaler(d, identity).values == d.values);
  }

  TEST_CASE("zero-variance feature is named") {
    auto d = synthetic(2, 3, 8, 5);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t t = 0; t < 3; ++t) d.instance(i)[t * 8 + 6] = 2.0f;
    }
    try {
      (void)fit_scaler(d);
      FAIL("expected invalid_argument");
    } catch (const std::invalid_argument& e) {
      const std::string msg = e.what();
      CHECK(msg.find("agent 1") != std::string::npos);
    }
  }

  TEST_CASE("VOI experiment shares one scaler across parts") {
    VoiSpec spec;
    spec.dimension = VoiDimension::DefenderNumber;
    spec.engagements_per_point = 8;
    for (int n : {2, 3}) {
      VoiPoint p;
      p.num_defenders = n;
      spec.grid.push_back(p);
    }
    const auto ex = build_voi_experiment(spec);
    REQUIRE(ex.parts.size() == 2);
    CHECK(ex.combined.train.size() == ex.parts[0].train.size() + ex.parts[1].train.size());
    CHECK(ex.combined.test.size() == ex.parts[0].test.size() + ex.parts[1].test.size());
    const auto fp = ex.scaler.fingerprint();
    for (const auto& p : ex.parts) {
      CHECK(p.test.manifest.at("scaler_fingerprint") == fp);
      CHECK(p.train.steps == ex.combined.train.steps);
    }
    CHECK(ex.scaler == fit_scaler(ex.combined.train));

    VoiSpec bad = spec;
    bad.first_seed = 1199;
    CHECK_THROWS(bad.validate());
  }

  TEST_CASE("noise grid reuses the base split") {
    VoiSpec spec;
    spec.dimension = VoiDimension::Noise;
    spec.engagements_per_point = 8;
    for (double s : {0.0, 20.0}) {
      VoiPoint p;
      p.noise_sigma = s;
      spec.grid.push_back(p);
    }
    const auto ex = build_voi_experiment(spec);
    REQUIRE(ex.parts.size() == 2);
    CHECK(ex.parts[0].test.provenance.size() == ex.parts[1].test.provenance.size());
    for (std::size_t i = 0; i < ex.parts[0].test.size(); ++i) {
      CHECK(ex.parts[0].test.provenance[i].seed == ex.parts[1].test.provenance[i].seed);
    }
    CHECK(ex.parts[0].test.values != ex.parts[1].test.values);
  }
}
