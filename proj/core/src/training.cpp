#include "swarm/training.hpp"

#include "swarm/error.hpp"
#include "swarm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <stdexcept>

namespace swarm {

void TrainConfig::validate() const {
  if (!(learning_rate > 0) || batch_size < 1 || max_epochs < 0 || patience < 1 || batch_slices < 1) {
    throw std::invalid_argument("TrainConfig: learning_rate, batch_size, patience and batch_slices must be positive");
  }
}

double normalized_error_rate(double accuracy, int classes) {
  return (1.0 - accuracy) / (1.0 - 1.0 / classes);
}

std::vector<double> window_inputs(const LabeledDataset& data, std::size_t window, std::span<const std::size_t> indices) {
  if (window > data.steps) {
    throw std::invalid_argument("window_inputs: window " + std::to_string(window) + " exceeds instance length " +
                                std::to_string(data.steps));
  }
  const std::size_t n = window * data.features;
  std::vector<double> out(indices.size() * n);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto inst = data.instance(indices[k]);
    std::copy_n(inst.begin(), n, out.begin() + static_cast<std::ptrdiff_t>(k * n));
  }
  return out;
}

namespace {

void check_compatible(const CnnSpec& spec, const LabeledDataset& d, const char* name) {
  if (d.features != static_cast<std::size_t>(spec.features)) {
    throw std::invalid_argument(std::string(name) + ": dataset has " + std::to_string(d.features) +
                                " features, model expects " + std::to_string(spec.features));
  }
  if (d.steps < static_cast<std::size_t>(spec.window)) {
    throw std::invalid_argument(std::string(name) + ": instances have " + std::to_string(d.steps) +
                                " steps, model window is " + std::to_string(spec.window));
  }
}

struct Scored {
  double loss = 0.0;
  std::size_t correct = 0;
  std::array<std::array<std::size_t, 4>, 4> confusion{};
};

Scored score(const CnnModel& model, const LabeledDataset& d) {
  const auto& spec = model.spec();
  constexpr std::size_t kBlock = 256;
  Scored s;
  std::vector<std::size_t> idx;
  std::vector<double> probs;
  for (std::size_t start = 0; start < d.size(); start += kBlock) {
    const std::size_t n = std::min(kBlock, d.size() - start);
    idx.resize(n);
    std::iota(idx.begin(), idx.end(), start);
    const auto x = window_inputs(d, spec.window, idx);
    probs.resize(n * spec.classes);
    model.predict(x, n, probs);
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = &probs[i * spec.classes];
      const int y = d.labels[start + i];
      const int pred = static_cast<int>(std::max_element(p, p + spec.classes) - p);
      s.loss -= std::log(std::max(p[y], 1e-300));
      s.correct += pred == y;
      if (y < 4 && pred < 4) ++s.confusion[y][pred];
    }
  }
  return s;
}

}  // namespace

Evaluation evaluate(const CnnModel& model, const LabeledDataset& test_set) {
  if (test_set.size() == 0) throw std::invalid_argument("evaluate: empty test set");
  check_compatible(model.spec(), test_set, "evaluate");
  const auto s = score(model, test_set);
  Evaluation e;
  e.count = test_set.size();
  e.accuracy = static_cast<double>(s.correct) / static_cast<double>(e.count);
  e.normalized_error_rate = normalized_error_rate(e.accuracy, model.spec().classes);
  e.mean_loss = s.loss / static_cast<double>(e.count);
  e.confusion = s.confusion;
  return e;
}

TrainingResult train(const CnnSpec& spec, const LabeledDataset& train_set, const LabeledDataset& validation_set,
                     const TrainConfig& cfg) {
  cfg.validate();
  spec.validate();
  check_compatible(spec, train_set, "train");
  check_compatible(spec, validation_set, "train (validation)");
  if (train_set.size() == 0 || validation_set.size() == 0) throw std::invalid_argument("train: empty dataset");

  TrainingResult result{CnnModel(spec), {}, 0};
  CnnModel& model = result.model;
  model.initialize(cfg.seed);
  auto params = model.parameters();
  const std::size_t np = params.size();

  std::vector<double> m(np, 0.0), v(np, 0.0), grad(np, 0.0);
  std::vector<std::vector<double>> slice_grads(cfg.batch_slices, std::vector<double>(np, 0.0));
  std::vector<double> slice_loss(cfg.batch_slices, 0.0);
  std::vector<double> best(params.begin(), params.end());
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  long long adam_step = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x5eedf00dULL);
  std::mt19937_64 dropout_rng(cfg.seed ^ 0xd50ULL);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t n = std::min<std::size_t>(cfg.batch_size, order.size() - start);
      const std::span<const std::size_t> batch(order.data() + start, n);
      const std::uint64_t batch_seed = dropout_rng() | 1u;

      // Fixed slicing keeps the accumulation order independent of thread count.
      const std::size_t slices = std::min<std::size_t>(cfg.batch_slices, n);
      parallel_for(slices, cfg.threads, [&](std::size_t s) {
        const std::size_t lo = n * s / slices, hi = n * (s + 1) / slices;
        const auto sub = batch.subspan(lo, hi - lo);
        const auto x = window_inputs(train_set, spec.window, sub);
        std::vector<std::uint8_t> y(sub.size());
        for (std::size_t i = 0; i < sub.size(); ++i) y[i] = train_set.labels[sub[i]];
        std::fill(slice_grads[s].begin(), slice_grads[s].end(), 0.0);
        slice_loss[s] = model.loss_and_gradient(x, y, slice_grads[s], batch_seed + s) * static_cast<double>(sub.size());
      });
      std::fill(grad.begin(), grad.end(), 0.0);
      double batch_loss = 0.0;
      for (std::size_t s = 0; s < slices; ++s) {
        const std::size_t lo = n * s / slices, hi = n * (s + 1) / slices;
        const double w = static_cast<double>(hi - lo) / static_cast<double>(n);
        for (std::size_t i = 0; i < np; ++i) grad[i] += w * slice_grads[s][i];
        batch_loss += slice_loss[s];
      }
      if (!std::isfinite(batch_loss)) {
        throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch starting " +
                             std::to_string(start));
      }
      epoch_loss += batch_loss;

      ++adam_step;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam_step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam_step));
      for (std::size_t i = 0; i < np; ++i) {
        m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
        v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        params[i] -= cfg.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg.epsilon);
      }
    }

    const auto val = score(model, validation_set);
    EpochRecord rec{epoch, epoch_loss / static_cast<double>(order.size()),
                    val.loss / static_cast<double>(validation_set.size()),
                    static_cast<double>(val.correct) / static_cast<double>(validation_set.size())};
    if (!std::isfinite(rec.val_loss)) throw NumericalError("train: non-finite validation loss at epoch " + std::to_string(epoch));
    result.history.push_back(rec);
    if (cfg.verbose) {
      std::cerr << "epoch " << epoch << " train_loss " << rec.train_loss << " val_loss " << rec.val_loss
                << " val_acc " << rec.val_accuracy << '\n';
    }
    if (rec.val_loss < best_val) {
      best_val = rec.val_loss;
      std::copy(params.begin(), params.end(), best.begin());
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  std::copy(best.begin(), best.end(), params.begin());
  return result;
}

void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "epoch,train_loss,val_loss,val_accuracy\n";
  out.precision(10);
  for (const auto& r : history) out << r.epoch << ',' << r.train_loss << ',' << r.val_loss << ',' << r.val_accuracy << '\n';
}

}  // namespace swarm
