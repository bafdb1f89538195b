#include "swarm/dataset_io.hpp"

#include "swarm/binary_io.hpp"

#include <json.hpp>

#include <fstream>
#include <limits>
#include <sstream>

namespace swarm {
namespace {

constexpr char kMagic[9] = "SWDSET01";
constexpr char kTrailer[9] = "SWDSEND!";
constexpr std::uint64_t kMaxManifestBytes = 64ull << 20;

}  // namespace

void write_dataset(std::ostream& out, const LabeledDataset& d) {
  if (d.values.size() != d.size() * d.steps * d.features || d.provenance.size() != d.size()) {
    throw std::invalid_argument("write_dataset: inconsistent dataset shape");
  }
  out.write(kMagic, 8);
  const std::string manifest = nlohmann::json(d.manifest).dump();
  binio::put<std::uint64_t>(out, manifest.size());
  out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
  binio::put<std::uint64_t>(out, d.size());
  binio::put<std::uint64_t>(out, d.steps);
  binio::put<std::uint64_t>(out, d.features);
  binio::put_array(out, d.values.data(), d.values.size());
  binio::put_array(out, d.labels.data(), d.labels.size());
  for (const auto& p : d.provenance) {
    binio::put<std::uint64_t>(out, p.seed);
    binio::put<std::int32_t>(out, p.num_defenders);
    binio::put<std::int32_t>(out, p.motion);
    binio::put<std::int32_t>(out, p.ramp);
    binio::put<float>(out, p.noise_sigma);
  }
  out.write(kTrailer, 8);
  if (!out) throw std::runtime_error("write_dataset: write failed");
}

LabeledDataset read_dataset(std::istream& in) {
  binio::expect_magic(in, kMagic, "magic");
  LabeledDataset d;

  const auto manifest_len = binio::get<std::uint64_t>(in, "manifest");
  if (manifest_len > kMaxManifestBytes) throw FormatError("manifest", "implausible length");
  std::string manifest(manifest_len, '\0');
  binio::get_array(in, manifest.data(), manifest.size(), "manifest");
  try {
    d.manifest = nlohmann::json::parse(manifest).get<Manifest>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest", e.what());
  }

  const auto n = binio::get<std::uint64_t>(in, "shape");
  d.steps = binio::get<std::uint64_t>(in, "shape");
  d.features = binio::get<std::uint64_t>(in, "shape");
  constexpr std::uint64_t kLimit = std::uint64_t{1} << 40;
  if (n > kLimit || d.steps > kLimit || d.features > kLimit ||
      (d.steps && d.features && n > kLimit / (d.steps * d.features))) {
    throw FormatError("shape", "implausible dimensions");
  }

  d.values.resize(n * d.steps * d.features);
  binio::get_array(in, d.values.data(), d.values.size(), "values");
  d.labels.resize(n);
  binio::get_array(in, d.labels.data(), d.labels.size(), "labels");
  for (auto l : d.labels) {
    if (l >= 4) throw FormatError("labels", "label out of range");
  }
  d.provenance.resize(n);
  for (auto& p : d.provenance) {
    p.seed = binio::get<std::uint64_t>(in, "provenance");
    p.num_defenders = binio::get<std::int32_t>(in, "provenance");
    p.motion = binio::get<std::int32_t>(in, "provenance");
    p.ramp = binio::get<std::int32_t>(in, "provenance");
    p.noise_sigma = binio::get<float>(in, "provenance");
  }
  binio::expect_magic(in, kTrailer, "trailer");
  return d;
}

void save_dataset(const LabeledDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_dataset: cannot open " + path.string());
  write_dataset(out, data);
}

LabeledDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("file", "cannot open " + path.string());
  return read_dataset(in);
}

void save_scaler(const ScalerStats& stats, const std::filesystem::path& path) {
  nlohmann::json j;
  j["mean"] = stats.mean;
  j["variance"] = stats.variance;
  j["fingerprint"] = stats.fingerprint();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_scaler: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

ScalerStats load_scaler(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("file", "cannot open " + path.string());
  try {
    const auto j = nlohmann::json::parse(in);
    ScalerStats s{j.at("mean").get<std::vector<double>>(), j.at("variance").get<std::vector<double>>()};
    if (s.mean.size() != s.variance.size()) throw FormatError("scaler", "mean/variance length mismatch");
    if (j.contains("fingerprint") && j["fingerprint"].get<std::string>() != s.fingerprint()) {
      throw FormatError("scaler", "fingerprint does not match statistics");
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("scaler", e.what());
  }
}

}  // namespace swarm
