#include "swarm/model_io.hpp"

#include "swarm/binary_io.hpp"

#include <fstream>

namespace swarm {
namespace {
constexpr char kMagic[9] = "SWCNN001";
constexpr char kTrailer[9] = "SWCNNEND";
}  // namespace

std::vector<double> Classifier::classify(std::span<const double> raw_rows, std::size_t rows) const {
  const auto& spec = model.spec();
  const std::size_t f = static_cast<std::size_t>(spec.features);
  if (raw_rows.size() != rows * f) throw std::invalid_argument("Classifier::classify: feature matrix shape mismatch");
  if (rows < static_cast<std::size_t>(spec.window)) {
    throw std::invalid_argument("Classifier::classify: " + std::to_string(rows) + " rows, window needs " +
                                std::to_string(spec.window));
  }
  std::vector<double> x(raw_rows.begin(), raw_rows.begin() + static_cast<std::ptrdiff_t>(spec.window * f));
  apply_scaler_inplace(x, f, scaler);
  return model.forward(x);
}

void write_classifier(std::ostream& out, const Classifier& c) {
  const auto& s = c.model.spec();
  out.write(kMagic, 8);
  binio::put<std::uint32_t>(out, s.window);
  binio::put<std::uint32_t>(out, s.features);
  binio::put<std::uint32_t>(out, s.classes);
  binio::put<std::uint32_t>(out, s.pool);
  binio::put<double>(out, s.dropout);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(s.conv.size()));
  for (const auto& l : s.conv) {
    binio::put<std::uint32_t>(out, l.filters);
    binio::put<std::uint32_t>(out, l.kernel);
  }
  const auto p = c.model.parameters();
  binio::put<std::uint64_t>(out, p.size());
  binio::put_array(out, p.data(), p.size());
  binio::put<std::uint64_t>(out, c.scaler.mean.size());
  binio::put_array(out, c.scaler.mean.data(), c.scaler.mean.size());
  binio::put_array(out, c.scaler.variance.data(), c.scaler.variance.size());
  out.write(kTrailer, 8);
  if (!out) throw std::runtime_error("write_classifier: write failed");
}

Classifier read_classifier(std::istream& in) {
  binio::expect_magic(in, kMagic, "magic");
  CnnSpec s;
  s.window = static_cast<int>(binio::get<std::uint32_t>(in, "spec"));
  s.features = static_cast<int>(binio::get<std::uint32_t>(in, "spec"));
  s.classes = static_cast<int>(binio::get<std::uint32_t>(in, "spec"));
  s.pool = static_cast<int>(binio::get<std::uint32_t>(in, "spec"));
  s.dropout = binio::get<double>(in, "spec");
  const auto layers = binio::get<std::uint32_t>(in, "spec");
  if (layers > 64) throw FormatError("spec", "implausible layer count");
  s.conv.clear();
  for (std::uint32_t i = 0; i < layers; ++i) {
    ConvLayerSpec l;
    l.filters = static_cast<int>(binio::get<std::uint32_t>(in, "spec"));
    l.kernel = static_cast<int>(binio::get<std::uint32_t>(in, "spec"));
    s.conv.push_back(l);
  }
  Classifier c;
  try {
    c.model = CnnModel(s);
  } catch (const std::invalid_argument& e) {
    throw FormatError("spec", e.what());
  }
  const auto count = binio::get<std::uint64_t>(in, "weights");
  if (count != c.model.parameters().size()) throw FormatError("weights", "parameter count does not match spec");
  binio::get_array(in, c.model.parameters().data(), count, "weights");
  const auto f = binio::get<std::uint64_t>(in, "scaler");
  if (f != static_cast<std::uint64_t>(s.features)) throw FormatError("scaler", "feature count does not match spec");
  c.scaler.mean.resize(f);
  c.scaler.variance.resize(f);
  binio::get_array(in, c.scaler.mean.data(), f, "scaler");
  binio::get_array(in, c.scaler.variance.data(), f, "scaler");
  binio::expect_magic(in, kTrailer, "trailer");
  return c;
}

void save_classifier(const Classifier& c, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("save_classifier: cannot open " + path.string());
  write_classifier(out, c);
}

Classifier load_classifier(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("file", "cannot open " + path.string());
  return read_classifier(in);
}

}  // namespace swarm
