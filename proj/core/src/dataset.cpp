#include "swarm/dataset.hpp"

#include "swarm/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace swarm {

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(kNumTactics, 0);
  for (auto l : labels) ++counts.at(l);
  return counts;
}

void LabeledDataset::truncate(std::size_t new_steps) {
  if (new_steps > steps) throw std::invalid_argument("LabeledDataset::truncate: cannot extend instances");
  if (new_steps == steps) return;
  const std::size_t old_stride = steps * features;
  const std::size_t new_stride = new_steps * features;
  for (std::size_t i = 0; i < size(); ++i) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(i * old_stride), new_stride,
                values.begin() + static_cast<std::ptrdiff_t>(i * new_stride));
  }
  values.resize(size() * new_stride);
  values.shrink_to_fit();
  steps = new_steps;
}

std::vector<double> adversary_features(const EngagementRecord& rec) {
  const auto& p = rec.adversary_positions;
  const auto& v = rec.adversary_velocities;
  const std::size_t agents = p.agents();
  const std::size_t f = 4 * agents;
  std::vector<double> out(p.steps() * f);
  for (std::size_t t = 0; t < p.steps(); ++t) {
    for (std::size_t a = 0; a < agents; ++a) {
      const Vec2 pos = p.at(t, a);
      const Vec2 vel = v.at(t, a);
      double* dst = &out[t * f + 4 * a];
      dst[0] = pos.x;
      dst[1] = pos.y;
      dst[2] = vel.x;
      dst[3] = vel.y;
    }
  }
  return out;
}

std::string VoiPoint::label() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "nd%02d_%s%s_sigma%g", num_defenders, std::string(to_string(motion)).c_str(),
                ramp_to_max ? "_ramp" : "", noise_sigma);
  return buf;
}

LabeledDataset generate_subdataset(const SubDatasetRequest& req, GenerationReport* report) {
  if (req.engagements < 0) throw std::invalid_argument("generate_subdataset: negative engagement count");
  EngagementConfig base = req.base;
  base.num_defenders = req.point.num_defenders;
  base.validate();

  const std::size_t n = static_cast<std::size_t>(req.engagements);
  const std::size_t features = 4 * static_cast<std::size_t>(base.num_adversaries);
  struct Slot {
    std::array<std::vector<double>, kNumTactics> rows;
    std::size_t length = 0;
    bool rejected = false;
    std::string diagnostic;
  };
  std::vector<Slot> slots(n);

  parallel_for(n, req.threads, [&](std::size_t e) {
    EngagementConfig cfg = base;
    cfg.seed = req.first_seed + e;
    const auto plan = motion_plan_for(cfg, req.point.motion, req.point.ramp_to_max);
    Slot& slot = slots[e];
    slot.length = std::numeric_limits<std::size_t>::max();
    for (Tactic t : kAllTactics) {
      const auto rec = simulate_engagement(cfg, plan, t);
      const std::size_t rows = rec.adversary_positions.steps();
      slot.length = std::min(slot.length, rows);
      slot.rows[label_of(t)] = adversary_features(rec);
    }
    if (slot.length < req.min_rows) {
      slot.rejected = true;
      slot.diagnostic = "seed " + std::to_string(cfg.seed) + " (" + req.point.label() + "): engagement lasted " +
                        std::to_string(slot.length) + " rows, need " + std::to_string(req.min_rows);
    }
  });

  std::size_t steps = std::numeric_limits<std::size_t>::max();
  std::size_t accepted = 0;
  for (auto& s : slots) {
    if (s.rejected) {
      if (report) {
        ++report->rejected_engagements;
        report->diagnostics.push_back(s.diagnostic);
      }
      continue;
    }
    ++accepted;
    steps = std::min(steps, s.length);
  }

  LabeledDataset ds;
  ds.features = features;
  ds.steps = accepted == 0 ? 0 : steps;
  ds.values.reserve(accepted * kNumTactics * ds.steps * features);
  ds.labels.reserve(accepted * kNumTactics);
  ds.provenance.reserve(accepted * kNumTactics);
  for (std::size_t e = 0; e < n; ++e) {
    if (slots[e].rejected) continue;
    for (int k = 0; k < kNumTactics; ++k) {
      const auto& rows = slots[e].rows[k];
      for (std::size_t i = 0; i < ds.steps * features; ++i) ds.values.push_back(static_cast<float>(rows[i]));
      ds.labels.push_back(static_cast<std::uint8_t>(k));
      ds.provenance.push_back({req.first_seed + e, req.point.num_defenders, static_cast<std::int32_t>(req.point.motion),
                               req.point.ramp_to_max ? 1 : 0, 0.0f});
    }
    slots[e] = Slot{};
  }
  ds.manifest["point"] = req.point.label();
  ds.manifest["engagements"] = std::to_string(accepted);
  ds.manifest["first_seed"] = std::to_string(req.first_seed);
  return ds;
}

LabeledDataset combine(std::vector<LabeledDataset> parts) {
  LabeledDataset out;
  if (parts.empty()) return out;
  out.features = parts.front().features;
  out.steps = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.features != out.features) {
      throw std::invalid_argument("combine: feature count mismatch (" + std::to_string(p.features) + " vs " +
                                  std::to_string(out.features) + ")");
    }
    out.steps = std::min(out.steps, p.steps);
    total += p.size();
  }
  out.values.reserve(total * out.steps * out.features);
  out.labels.reserve(total);
  out.provenance.reserve(total);
  for (auto& p : parts) {
    p.truncate(out.steps);
    out.values.insert(out.values.end(), p.values.begin(), p.values.end());
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    out.provenance.insert(out.provenance.end(), p.provenance.begin(), p.provenance.end());
    p = LabeledDataset{};
  }
  out.manifest["parts"] = std::to_string(parts.size());
  return out;
}

LabeledDataset add_noise(const LabeledDataset& data, double sigma, std::uint64_t seed, NoiseChannels channels) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("add_noise: sigma must be non-negative");
  LabeledDataset out = data;
  for (auto& p : out.provenance) p.noise_sigma = static_cast<float>(sigma);
  out.manifest["noise_sigma"] = std::to_string(sigma);
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  const std::size_t f = out.features;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    if (channels == NoiseChannels::PositionsOnly && (i % f) % 4 >= 2) continue;
    out.values[i] = static_cast<float>(static_cast<double>(out.values[i]) + noise(rng));
  }
  return out;
}

std::string ScalerStats::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const std::vector<double>& v) {
    for (double d : v) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &d, sizeof d);
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
      }
    }
  };
  mix(mean);
  mix(variance);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ScalerStats fit_scaler(const LabeledDataset& data) {
  const std::size_t f = data.features;
  const std::size_t rows = data.size() * data.steps;
  if (rows == 0 || f == 0) throw std::invalid_argument("fit_scaler: empty dataset");
  ScalerStats s{std::vector<double>(f, 0.0), std::vector<double>(f, 0.0)};
  for (std::size_t r = 0; r < rows; ++r) {
    const float* row = &data.values[r * f];
    for (std::size_t c = 0; c < f; ++c) s.mean[c] += row[c];
  }
  for (auto& m : s.mean) m /= static_cast<double>(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const float* row = &data.values[r * f];
    for (std::size_t c = 0; c < f; ++c) {
      const double d = row[c] - s.mean[c];
      s.variance[c] += d * d;
    }
  }
  for (std::size_t c = 0; c < f; ++c) {
    s.variance[c] /= static_cast<double>(rows);
    if (!(s.variance[c] > 0.0)) {
      throw std::invalid_argument("fit_scaler: feature " + std::to_string(c) + " (agent " + std::to_string(c / 4) +
                                  ", channel " + std::to_string(c % 4) + ") has zero variance");
    }
  }
  return s;
}

namespace {
void check_scaler(std::size_t features, const ScalerStats& stats) {
  if (stats.mean.size() != features || stats.variance.size() != features) {
    throw std::invalid_argument("apply_scaler: scaler has " + std::to_string(stats.mean.size()) +
                                " features, data has " + std::to_string(features));
  }
}
}  // namespace

LabeledDataset apply_scaler(const LabeledDataset& data, const ScalerStats& stats) {
  check_scaler(data.features, stats);
  LabeledDataset out = data;
  const std::size_t f = data.features;
  std::vector<double> inv_sd(f);
  for (std::size_t c = 0; c < f; ++c) inv_sd[c] = 1.0 / std::sqrt(stats.variance[c]);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    const std::size_t c = i % f;
    out.values[i] = static_cast<float>((static_cast<double>(out.values[i]) - stats.mean[c]) * inv_sd[c]);
  }
  out.manifest["scaled_with"] = stats.fingerprint();
  return out;
}

void apply_scaler_inplace(std::span<double> rows, std::size_t features, const ScalerStats& stats) {
  check_scaler(features, stats);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t c = i % features;
    rows[i] = (rows[i] - stats.mean[c]) / std::sqrt(stats.variance[c]);
  }
}

LabeledDataset subset(const LabeledDataset& data, std::span<const std::size_t> indices) {
  LabeledDataset out;
  out.steps = data.steps;
  out.features = data.features;
  out.manifest = data.manifest;
  out.values.reserve(indices.size() * data.instance_stride());
  out.labels.reserve(indices.size());
  out.provenance.reserve(indices.size());
  for (std::size_t i : indices) {
    const auto inst = data.instance(i);
    out.values.insert(out.values.end(), inst.begin(), inst.end());
    out.labels.push_back(data.labels[i]);
    out.provenance.push_back(data.provenance[i]);
  }
  return out;
}

DatasetSplit split(const LabeledDataset& data, SplitFractions fr, std::uint64_t seed) {
  if (fr.train < 0 || fr.validation < 0 || fr.test < 0 || std::abs(fr.train + fr.validation + fr.test - 1.0) > 1e-9) {
    throw std::invalid_argument("split: fractions must be non-negative and sum to 1");
  }
  std::array<std::vector<std::size_t>, kNumTactics> by_label;
  for (std::size_t i = 0; i < data.size(); ++i) by_label.at(data.labels[i]).push_back(i);

  std::vector<std::size_t> train, val, test;
  for (int k = 0; k < kNumTactics; ++k) {
    auto& idx = by_label[k];
    const auto n = static_cast<double>(idx.size());
    const auto n_train = static_cast<std::size_t>(std::llround(n * fr.train));
    const auto n_val = static_cast<std::size_t>(std::llround(n * fr.validation));
    if (n_train + n_val > idx.size()) throw std::invalid_argument("split: rounding overflow");
    const std::size_t n_test = idx.size() - n_train - n_val;
    if ((fr.train > 0 && n_train == 0) || (fr.validation > 0 && n_val == 0) || (fr.test > 0 && n_test == 0)) {
      throw std::invalid_argument("split: label " + std::to_string(k) + " has " + std::to_string(idx.size()) +
                                  " instances, too few to stratify");
    }
    auto rng = make_rng(seed, SeedStream::Split, static_cast<std::uint64_t>(k));
    std::shuffle(idx.begin(), idx.end(), rng);
    train.insert(train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    val.insert(val.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train),
               idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    test.insert(test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  std::sort(test.begin(), test.end());

  DatasetSplit out{subset(data, train), subset(data, val), subset(data, test)};
  out.train.manifest["split"] = "train";
  out.validation.manifest["split"] = "validation";
  out.test.manifest["split"] = "test";
  return out;
}

}  // namespace swarm
