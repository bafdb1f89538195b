#include "swarm/voi.hpp"

#include "swarm/config.hpp"
#include "swarm/error.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace swarm {

std::string_view to_string(VoiDimension d) {
  switch (d) {
    case VoiDimension::DefenderNumber: return "defender_number";
    case VoiDimension::DefenderMotion: return "defender_motion";
    case VoiDimension::Noise: return "noise";
    case VoiDimension::DefenderNumberAndMotion: return "defender_number_and_motion";
  }
  return "?";
}

int VoiSpec::effective_engagements() const { return std::max(1, engagements_per_point / std::max(1, desk_scale_factor)); }

void VoiSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("VoiSpec: empty grid");
  if (engagements_per_point < 1) throw std::invalid_argument("VoiSpec: engagements_per_point must be >= 1");
  if (desk_scale_factor < 1) throw std::invalid_argument("VoiSpec: desk_scale_factor must be >= 1");
  const auto last_seed = first_seed + static_cast<std::uint64_t>(effective_engagements()) - 1;
  if (last_seed > reserved_seed_threshold) {
    throw std::invalid_argument("VoiSpec: training seeds " + std::to_string(first_seed) + ".." +
                                std::to_string(last_seed) + " overlap evaluation seeds above " +
                                std::to_string(reserved_seed_threshold));
  }
  base.validate();
}

VoiSpec VoiSpec::from_config(const KeyValueConfig& cfg) {
  std::vector<std::string_view> known = {"name",        "dimension",        "defender_numbers", "motions",
                                         "noise_levels", "ramp",           "engagements_per_point",
                                         "desk_scale_factor", "first_seed", "reserved_seed_threshold",
                                         "min_rows",    "split_seed",       "noise_seed",       "noise_channels"};
  for (auto k : EngagementConfig::config_keys()) known.push_back(k);
  cfg.require_known(known);

  VoiSpec s;
  s.base = EngagementConfig::from_config(cfg);
  s.name = cfg.get_string("name", s.name);
  s.engagements_per_point = static_cast<int>(cfg.get_int("engagements_per_point", s.engagements_per_point));
  s.desk_scale_factor = static_cast<int>(cfg.get_int("desk_scale_factor", s.desk_scale_factor));
  s.first_seed = static_cast<std::uint64_t>(cfg.get_int("first_seed", static_cast<long long>(s.first_seed)));
  s.reserved_seed_threshold = static_cast<std::uint64_t>(
      cfg.get_int("reserved_seed_threshold", static_cast<long long>(s.reserved_seed_threshold)));
  s.min_rows = static_cast<std::size_t>(cfg.get_int("min_rows", static_cast<long long>(s.min_rows)));
  s.split_seed = static_cast<std::uint64_t>(cfg.get_int("split_seed", static_cast<long long>(s.split_seed)));
  s.noise_seed = static_cast<std::uint64_t>(cfg.get_int("noise_seed", static_cast<long long>(s.noise_seed)));
  const auto channels = cfg.get_string("noise_channels", "all");
  if (channels == "all") {
    s.noise_channels = NoiseChannels::All;
  } else if (channels == "positions") {
    s.noise_channels = NoiseChannels::PositionsOnly;
  } else {
    throw ConfigError(cfg.source() + ": noise_channels must be 'all' or 'positions'");
  }

  s.reference.num_defenders = s.base.num_defenders;
  s.reference.ramp_to_max = cfg.get_bool("ramp", false);

  const auto dim = cfg.get_string("dimension");
  std::vector<long long> numbers{s.base.num_defenders};
  std::vector<MotionType> motions{MotionType::Star};
  if (cfg.has("defender_numbers")) numbers = cfg.get_int_range("defender_numbers");
  if (cfg.has("motions")) {
    motions.clear();
    for (const auto& m : cfg.get_list("motions")) {
      if (m == "all") {
        motions.assign(kAllMotionTypes.begin(), kAllMotionTypes.end());
        continue;
      }
      const auto parsed = parse_motion_type(m);
      if (!parsed) throw ConfigError(cfg.source() + ": unknown motion type '" + m + "'");
      motions.push_back(*parsed);
    }
  }
  s.reference.motion = motions.front();

  auto point = [&](long long nd, MotionType m, double sigma) {
    VoiPoint p = s.reference;
    p.num_defenders = static_cast<int>(nd);
    p.motion = m;
    p.noise_sigma = sigma;
    return p;
  };
  if (dim == "defender_number") {
    s.dimension = VoiDimension::DefenderNumber;
    for (auto nd : numbers) s.grid.push_back(point(nd, s.reference.motion, 0.0));
  } else if (dim == "defender_motion") {
    s.dimension = VoiDimension::DefenderMotion;
    for (auto m : motions) s.grid.push_back(point(s.base.num_defenders, m, 0.0));
  } else if (dim == "noise") {
    s.dimension = VoiDimension::Noise;
    if (!cfg.has("noise_levels")) throw ConfigError(cfg.source() + ": noise dimension needs noise_levels");
    for (auto sigma : cfg.get_int_range("noise_levels")) {
      s.grid.push_back(point(s.base.num_defenders, s.reference.motion, static_cast<double>(sigma)));
    }
  } else if (dim == "defender_number_and_motion") {
    s.dimension = VoiDimension::DefenderNumberAndMotion;
    for (auto m : motions) {
      for (auto nd : numbers) s.grid.push_back(point(nd, m, 0.0));
    }
  } else {
    throw ConfigError(cfg.source() + ": unknown dimension '" + dim + "'");
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.source() + ": " + e.what());
  }
  return s;
}

Manifest describe(const VoiSpec& spec) {
  Manifest m;
  m["experiment"] = spec.name;
  m["voi_dimension"] = std::string(to_string(spec.dimension));
  std::ostringstream grid;
  for (std::size_t i = 0; i < spec.grid.size(); ++i) grid << (i ? "," : "") << spec.grid[i].label();
  m["voi_grid"] = grid.str();
  m["engagements_per_point"] = std::to_string(spec.engagements_per_point);
  m["desk_scale_factor"] = std::to_string(spec.desk_scale_factor);
  m["effective_engagements_per_point"] = std::to_string(spec.effective_engagements());
  m["first_seed"] = std::to_string(spec.first_seed);
  m["split_seed"] = std::to_string(spec.split_seed);
  m["noise_seed"] = std::to_string(spec.noise_seed);
  return m;
}

namespace {

LabeledDataset noised(const LabeledDataset& d, const VoiSpec& spec, std::size_t point_index, std::uint64_t part) {
  const double sigma = spec.grid[point_index].noise_sigma;
  auto rng = make_rng(spec.noise_seed, SeedStream::Noise, point_index * 3 + part);
  auto out = add_noise(d, sigma, rng(), spec.noise_channels);
  return out;
}

}  // namespace

VoiExperiment build_voi_experiment(const VoiSpec& spec) {
  spec.validate();
  VoiExperiment ex;
  ex.spec = spec;
  ex.points = spec.grid;

  auto request = [&](const VoiPoint& p) {
    SubDatasetRequest r;
    r.base = spec.base;
    r.point = p;
    r.engagements = spec.effective_engagements();
    r.first_seed = spec.first_seed;
    r.min_rows = spec.min_rows;
    r.threads = spec.threads;
    return r;
  };

  if (spec.dimension == VoiDimension::Noise) {
    VoiPoint ref = spec.reference;
    ref.noise_sigma = 0.0;
    const auto base = generate_subdataset(request(ref), &ex.report);
    const auto base_split = split(base, spec.fractions, spec.split_seed);
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
      ex.parts.push_back({noised(base_split.train, spec, i, 0), noised(base_split.validation, spec, i, 1),
                          noised(base_split.test, spec, i, 2)});
    }
  } else {
    for (const auto& p : spec.grid) {
      const auto sub = generate_subdataset(request(p), &ex.report);
      ex.parts.push_back(split(sub, spec.fractions, spec.split_seed));
    }
  }

  std::size_t steps = std::numeric_limits<std::size_t>::max();
  for (const auto& p : ex.parts) steps = std::min(steps, p.train.steps);
  std::vector<LabeledDataset> train, val, test;
  for (std::size_t i = 0; i < ex.parts.size(); ++i) {
    auto& p = ex.parts[i];
    p.train.truncate(steps);
    p.validation.truncate(steps);
    p.test.truncate(steps);
    for (auto* d : {&p.train, &p.validation, &p.test}) d->manifest["point"] = spec.grid[i].label();
    train.push_back(p.train);
    val.push_back(p.validation);
    test.push_back(p.test);
  }
  ex.combined = {combine(std::move(train)), combine(std::move(val)), combine(std::move(test))};
  ex.combined.train.manifest["split"] = "train";
  ex.combined.validation.manifest["split"] = "validation";
  ex.combined.test.manifest["split"] = "test";
  ex.scaler = fit_scaler(ex.combined.train);

  const auto desc = describe(spec);
  const auto fp = ex.scaler.fingerprint();
  auto stamp = [&](LabeledDataset& d) {
    for (const auto& [k, v] : desc) d.manifest[k] = v;
    d.manifest["scaler_fingerprint"] = fp;
    d.manifest["steps"] = std::to_string(d.steps);
  };
  for (auto& p : ex.parts) {
    stamp(p.train);
    stamp(p.validation);
    stamp(p.test);
  }
  stamp(ex.combined.train);
  stamp(ex.combined.validation);
  stamp(ex.combined.test);
  for (auto* d : {&ex.combined.train, &ex.combined.validation, &ex.combined.test}) d->manifest["point"] = "combined";
  return ex;
}

}  // namespace swarm
