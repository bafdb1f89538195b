#include "swarm/cnn.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace swarm {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using CMapMat = Eigen::Map<const RowMat>;

// ---------------------------------------------------------------------------
// CnnSpec

std::vector<int> CnnSpec::lengths() const {
  std::vector<int> out{window};
  for (std::size_t i = 0; i < conv.size(); ++i) out.push_back((out.back() + pool - 1) / pool);
  return out;
}

std::size_t CnnSpec::parameter_count() const {
  std::size_t n = 0;
  int in = features;
  for (const auto& l : conv) {
    n += static_cast<std::size_t>(l.filters) * l.kernel * in + l.filters;
    in = l.filters;
  }
  return n + static_cast<std::size_t>(classes) * in + classes;
}

void CnnSpec::validate() const {
  if (window < 1 || features < 1 || classes < 2 || pool < 1 || conv.empty()) {
    throw std::invalid_argument("CnnSpec: sizes must be positive and at least one conv layer is required");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("CnnSpec: dropout must be in [0, 1)");
  const auto len = lengths();
  for (std::size_t i = 0; i < conv.size(); ++i) {
    if (conv[i].filters < 1 || conv[i].kernel < 1) throw std::invalid_argument("CnnSpec: bad conv layer");
    if (conv[i].kernel > len[i]) {
      throw std::invalid_argument("CnnSpec: kernel " + std::to_string(conv[i].kernel) + " of layer " +
                                  std::to_string(i) + " exceeds its input length " + std::to_string(len[i]));
    }
  }
}

std::string CnnSpec::describe() const {
  std::ostringstream s;
  s << "window=" << window << " features=" << features << " filters=";
  for (std::size_t i = 0; i < conv.size(); ++i) s << (i ? "," : "") << conv[i].filters;
  s << " kernels=";
  for (std::size_t i = 0; i < conv.size(); ++i) s << (i ? "," : "") << conv[i].kernel;
  s << " pool=" << pool << " dropout=" << dropout << " classes=" << classes;
  return s.str();
}

CnnSpec CnnSpec::defender_number(int features) { return {20, features, {{32, 7}}, 5, 0.1, 4}; }
CnnSpec CnnSpec::defender_motion(int features) { return {20, features, {{64, 7}, {64, 5}, {64, 3}}, 3, 0.4, 4}; }
CnnSpec CnnSpec::measurement_noise(int features) { return {50, features, {{64, 7}, {64, 5}, {64, 3}}, 3, 0.4, 4}; }

CnnSpec CnnSpec::named(const std::string& name, int features) {
  if (name == "defender_number") return defender_number(features);
  if (name == "defender_motion") return defender_motion(features);
  if (name == "measurement_noise") return measurement_noise(features);
  throw std::invalid_argument("CnnSpec::named: unknown spec '" + name + "'");
}

// ---------------------------------------------------------------------------
// Batched forward / backward engine

namespace {

struct LayerView {
  int in_len, in_ch, out_len, filters, kernel;
  std::size_t w_offset, b_offset;
};

struct Layout {
  std::vector<LayerView> conv;
  int channels = 0;
  std::size_t dense_w = 0, dense_b = 0;
};

Layout layout_of(const CnnSpec& s) {
  Layout out;
  const auto len = s.lengths();
  std::size_t off = 0;
  int in = s.features;
  for (std::size_t i = 0; i < s.conv.size(); ++i) {
    const auto& l = s.conv[i];
    LayerView v{len[i], in, len[i + 1], l.filters, l.kernel, off, 0};
    off += static_cast<std::size_t>(l.filters) * l.kernel * in;
    v.b_offset = off;
    off += l.filters;
    out.conv.push_back(v);
    in = l.filters;
  }
  out.channels = in;
  out.dense_w = off;
  out.dense_b = off + static_cast<std::size_t>(s.classes) * in;
  return out;
}

struct LayerCache {
  RowMat col;                 // (B*in_len) x (kernel*in_ch)
  RowMat act;                 // (B*in_len) x filters, post-ReLU
  std::vector<int> argmax;    // (B*out_len*filters) row index into act
  RowMat mask;                // dropout multipliers (empty when inactive)
  RowMat out;                 // (B*out_len) x filters
};

struct Trace {
  int batch = 0;
  std::vector<LayerCache> layers;
  RowMat gap;     // B x C
  RowMat logits;  // B x classes
  RowMat probs;
};

void im2col(const RowMat& x, int batch, int len, int ch, int kernel, RowMat& col) {
  const int pad = (kernel - 1) / 2;
  col.setZero(static_cast<Eigen::Index>(batch) * len, static_cast<Eigen::Index>(kernel) * ch);
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < len; ++t) {
      double* dst = col.data() + (static_cast<std::size_t>(b) * len + t) * kernel * ch;
      for (int k = 0; k < kernel; ++k) {
        const int src_t = t + k - pad;
        if (src_t < 0 || src_t >= len) continue;
        const double* src = x.data() + (static_cast<std::size_t>(b) * len + src_t) * ch;
        std::copy_n(src, ch, dst + static_cast<std::size_t>(k) * ch);
      }
    }
  }
}

void col2im(const RowMat& dcol, int batch, int len, int ch, int kernel, RowMat& dx) {
  const int pad = (kernel - 1) / 2;
  dx.setZero(static_cast<Eigen::Index>(batch) * len, ch);
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < len; ++t) {
      const double* src = dcol.data() + (static_cast<std::size_t>(b) * len + t) * kernel * ch;
      for (int k = 0; k < kernel; ++k) {
        const int dst_t = t + k - pad;
        if (dst_t < 0 || dst_t >= len) continue;
        double* dst = dx.data() + (static_cast<std::size_t>(b) * len + dst_t) * ch;
        const double* s = src + static_cast<std::size_t>(k) * ch;
        for (int c = 0; c < ch; ++c) dst[c] += s[c];
      }
    }
  }
}

void forward_batch(const CnnSpec& spec, const Layout& lay, std::span<const double> params,
                   std::span<const double> inputs, int batch, std::uint64_t dropout_seed, Trace& tr,
                   int stop_after_conv = -1) {
  tr.batch = batch;
  tr.layers.resize(lay.conv.size());
  RowMat cur = CMapMat(inputs.data(), static_cast<Eigen::Index>(batch) * spec.window, spec.features);
  std::mt19937_64 rng(dropout_seed);
  const bool dropout = dropout_seed != 0 && spec.dropout > 0.0;
  const double keep = 1.0 - spec.dropout;

  for (std::size_t li = 0; li < lay.conv.size(); ++li) {
    const auto& L = lay.conv[li];
    auto& c = tr.layers[li];
    im2col(cur, batch, L.in_len, L.in_ch, L.kernel, c.col);
    const CMapMat w(params.data() + L.w_offset, L.filters, static_cast<Eigen::Index>(L.kernel) * L.in_ch);
    const Eigen::Map<const Eigen::RowVectorXd> bias(params.data() + L.b_offset, L.filters);
    c.act.noalias() = c.col * w.transpose();
    c.act.rowwise() += bias;
    if (static_cast<int>(li) == stop_after_conv) return;
    c.act = c.act.cwiseMax(0.0);

    c.out.resize(static_cast<Eigen::Index>(batch) * L.out_len, L.filters);
    c.argmax.assign(static_cast<std::size_t>(batch) * L.out_len * L.filters, 0);
    for (int b = 0; b < batch; ++b) {
      for (int i = 0; i < L.out_len; ++i) {
        const int t0 = i * spec.pool;
        const int t1 = std::min(L.in_len, t0 + spec.pool);
        const std::size_t orow = static_cast<std::size_t>(b) * L.out_len + i;
        for (int f = 0; f < L.filters; ++f) {
          int best_row = b * L.in_len + t0;
          double best = c.act(best_row, f);
          for (int t = t0 + 1; t < t1; ++t) {
            const double v = c.act(b * L.in_len + t, f);
            if (v > best) {
              best = v;
              best_row = b * L.in_len + t;
            }
          }
          c.out(static_cast<Eigen::Index>(orow), f) = best;
          c.argmax[orow * L.filters + f] = best_row;
        }
      }
    }
    if (dropout) {
      std::bernoulli_distribution bern(keep);
      c.mask.resize(c.out.rows(), c.out.cols());
      for (Eigen::Index i = 0; i < c.mask.size(); ++i) c.mask.data()[i] = bern(rng) ? 1.0 / keep : 0.0;
      c.out.array() *= c.mask.array();
    } else {
      c.mask.resize(0, 0);
    }
    cur = c.out;
  }

  const int last_len = lay.conv.back().out_len;
  tr.gap.setZero(batch, lay.channels);
  for (int b = 0; b < batch; ++b) {
    tr.gap.row(b) = cur.middleRows(static_cast<Eigen::Index>(b) * last_len, last_len).colwise().mean();
  }
  const CMapMat wd(params.data() + lay.dense_w, spec.classes, lay.channels);
  const Eigen::Map<const Eigen::RowVectorXd> bd(params.data() + lay.dense_b, spec.classes);
  tr.logits.noalias() = tr.gap * wd.transpose();
  tr.logits.rowwise() += bd;
  tr.probs.resize(batch, spec.classes);
  for (int b = 0; b < batch; ++b) {
    const double m = tr.logits.row(b).maxCoeff();
    const Eigen::RowVectorXd e = (tr.logits.row(b).array() - m).exp();
    tr.probs.row(b) = e / e.sum();
  }
}

// Accumulates parameter gradients of sum_b dlogits[b] . logits[b] into grad;
// writes the input gradient when dinput is non-null.
void backward_batch(const CnnSpec& spec, const Layout& lay, std::span<const double> params, const Trace& tr,
                    const RowMat& dlogits, std::span<double> grad, RowMat* dinput) {
  const int batch = tr.batch;
  MapMat gwd(grad.data() + lay.dense_w, spec.classes, lay.channels);
  Eigen::Map<Eigen::RowVectorXd> gbd(grad.data() + lay.dense_b, spec.classes);
  gwd.noalias() += dlogits.transpose() * tr.gap;
  gbd += dlogits.colwise().sum();

  const CMapMat wd(params.data() + lay.dense_w, spec.classes, lay.channels);
  const RowMat dgap = dlogits * wd;
  const int last_len = lay.conv.back().out_len;
  RowMat dcur(static_cast<Eigen::Index>(batch) * last_len, lay.channels);
  for (int b = 0; b < batch; ++b) {
    for (int t = 0; t < last_len; ++t) dcur.row(static_cast<Eigen::Index>(b) * last_len + t) = dgap.row(b) / last_len;
  }

  RowMat dact, dcol, dprev;
  for (std::size_t li = lay.conv.size(); li-- > 0;) {
    const auto& L = lay.conv[li];
    const auto& c = tr.layers[li];
    if (c.mask.size() != 0) dcur.array() *= c.mask.array();
    dact.setZero(static_cast<Eigen::Index>(batch) * L.in_len, L.filters);
    for (Eigen::Index r = 0; r < dcur.rows(); ++r) {
      for (int f = 0; f < L.filters; ++f) {
        const int src = c.argmax[static_cast<std::size_t>(r) * L.filters + f];
        if (c.act(src, f) > 0.0) dact(src, f) += dcur(r, f);
      }
    }
    MapMat gw(grad.data() + L.w_offset, L.filters, static_cast<Eigen::Index>(L.kernel) * L.in_ch);
    Eigen::Map<Eigen::RowVectorXd> gb(grad.data() + L.b_offset, L.filters);
    gw.noalias() += dact.transpose() * c.col;
    gb += dact.colwise().sum();
    if (li == 0 && !dinput) break;
    const CMapMat w(params.data() + L.w_offset, L.filters, static_cast<Eigen::Index>(L.kernel) * L.in_ch);
    dcol.noalias() = dact * w;
    col2im(dcol, batch, L.in_len, L.in_ch, L.kernel, dprev);
    dcur = std::move(dprev);
  }
  if (dinput) *dinput = std::move(dcur);
}

void check_input(const CnnSpec& s, std::size_t size, std::size_t count) {
  const std::size_t expect = count * static_cast<std::size_t>(s.window) * s.features;
  if (size != expect) {
    throw std::invalid_argument("CnnModel: input has " + std::to_string(size) + " values, expected " +
                                std::to_string(expect) + " (" + std::to_string(count) + " x " +
                                std::to_string(s.window) + " x " + std::to_string(s.features) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// CnnModel

CnnModel::CnnModel(CnnSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  params_.assign(spec_.parameter_count(), 0.0);
}

void CnnModel::initialize(std::uint64_t seed) {
  const auto lay = layout_of(spec_);
  std::mt19937_64 rng(seed);
  std::fill(params_.begin(), params_.end(), 0.0);
  auto glorot = [&](std::size_t offset, std::size_t count, double fan_in, double fan_out) {
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-limit, limit);
    for (std::size_t i = 0; i < count; ++i) params_[offset + i] = u(rng);
  };
  for (const auto& L : lay.conv) {
    glorot(L.w_offset, static_cast<std::size_t>(L.filters) * L.kernel * L.in_ch, double(L.kernel) * L.in_ch,
           double(L.kernel) * L.filters);
  }
  glorot(lay.dense_w, static_cast<std::size_t>(spec_.classes) * lay.channels, lay.channels, spec_.classes);
}

std::vector<double> CnnModel::forward(std::span<const double> input) const {
  std::vector<double> probs(spec_.classes);
  predict(input, 1, probs);
  return probs;
}

std::vector<double> CnnModel::forward_train(std::span<const double> input, std::uint64_t seed) const {
  check_input(spec_, input.size(), 1);
  const auto lay = layout_of(spec_);
  Trace tr;
  forward_batch(spec_, lay, params_, input, 1, seed == 0 ? 1 : seed, tr);
  return {tr.probs.data(), tr.probs.data() + spec_.classes};
}

void CnnModel::predict(std::span<const double> inputs, std::size_t count, std::span<double> probs) const {
  check_input(spec_, inputs.size(), count);
  if (probs.size() != count * static_cast<std::size_t>(spec_.classes)) {
    throw std::invalid_argument("CnnModel::predict: output span has wrong size");
  }
  if (count == 0) return;
  const auto lay = layout_of(spec_);
  Trace tr;
  forward_batch(spec_, lay, params_, inputs, static_cast<int>(count), 0, tr);
  std::copy_n(tr.probs.data(), probs.size(), probs.begin());
}

std::vector<double> CnnModel::conv_output(std::span<const double> input, std::size_t layer) const {
  check_input(spec_, input.size(), 1);
  if (layer >= spec_.conv.size()) throw std::out_of_range("CnnModel::conv_output: no such layer");
  const auto lay = layout_of(spec_);
  Trace tr;
  forward_batch(spec_, lay, params_, input, 1, 0, tr, static_cast<int>(layer));
  const auto& act = tr.layers[layer].act;
  return {act.data(), act.data() + act.size()};
}

double CnnModel::loss_and_gradient(std::span<const double> inputs, std::span<const std::uint8_t> labels,
                                   std::span<double> grad, std::uint64_t dropout_seed) const {
  const std::size_t count = labels.size();
  check_input(spec_, inputs.size(), count);
  if (grad.size() != params_.size()) throw std::invalid_argument("loss_and_gradient: gradient buffer size");
  if (count == 0) return 0.0;
  const auto lay = layout_of(spec_);
  Trace tr;
  forward_batch(spec_, lay, params_, inputs, static_cast<int>(count), dropout_seed, tr);
  RowMat dlogits = tr.probs;
  double loss = 0.0;
  for (std::size_t b = 0; b < count; ++b) {
    const int y = labels[b];
    loss -= std::log(std::max(tr.probs(static_cast<Eigen::Index>(b), y), 1e-300));
    dlogits(static_cast<Eigen::Index>(b), y) -= 1.0;
  }
  dlogits /= static_cast<double>(count);
  backward_batch(spec_, lay, params_, tr, dlogits, grad, nullptr);
  return loss / static_cast<double>(count);
}

Gradients gradient(const CnnModel& model, std::span<const double> input, GradientHead head) {
  const auto& spec = model.spec();
  check_input(spec, input.size(), 1);
  if (head.label < 0 || head.label >= spec.classes) throw std::invalid_argument("gradient: head class out of range");
  const auto lay = layout_of(spec);
  Trace tr;
  forward_batch(spec, lay, model.parameters(), input, 1, 0, tr);

  RowMat dlogits = RowMat::Zero(1, spec.classes);
  Gradients g;
  const auto p = tr.probs.row(0);
  switch (head.kind) {
    case GradientHead::Kind::CrossEntropy:
      g.value = -std::log(std::max(p(head.label), 1e-300));
      dlogits = p;
      dlogits(0, head.label) -= 1.0;
      break;
    case GradientHead::Kind::Probability:
      g.value = p(head.label);
      for (int j = 0; j < spec.classes; ++j) dlogits(0, j) = p(head.label) * ((j == head.label ? 1.0 : 0.0) - p(j));
      break;
    case GradientHead::Kind::Logit:
      g.value = tr.logits(0, head.label);
      dlogits(0, head.label) = 1.0;
      break;
  }
  g.weights.assign(model.parameters().size(), 0.0);
  RowMat dx;
  backward_batch(spec, lay, model.parameters(), tr, dlogits, g.weights, &dx);
  g.input.assign(dx.data(), dx.data() + dx.size());
  return g;
}

std::vector<double> saliency_map(const CnnModel& model, std::span<const double> input, int true_label) {
  auto g = gradient(model, input, GradientHead::probability(true_label));
  for (auto& v : g.input) v = std::abs(v);
  return std::move(g.input);
}

std::vector<double> aggregate_by_agent(std::span<const double> map, int window, int features) {
  if (features % 4 != 0 || map.size() != static_cast<std::size_t>(window) * features) {
    throw std::invalid_argument("aggregate_by_agent: map must be [window x 4*agents]");
  }
  const int agents = features / 4;
  std::vector<double> out(static_cast<std::size_t>(window) * agents, 0.0);
  for (int t = 0; t < window; ++t) {
    for (int f = 0; f < features; ++f) out[static_cast<std::size_t>(t) * agents + f / 4] += map[static_cast<std::size_t>(t) * features + f];
  }
  return out;
}

}  // namespace swarm
