#pragma once

#include "swarm/cnn.hpp"
#include "swarm/dataset.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace swarm {

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 32;
  int max_epochs = 100;
  /// Epochs without validation-loss improvement before stopping.
  int patience = 10;
  std::uint64_t seed = 1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  /// Each batch is split into this many fixed slices whose gradients are
  /// summed in slice order; slices may run on separate threads.
  unsigned batch_slices = 1;
  unsigned threads = 1;
  bool verbose = false;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainingResult {
  CnnModel model;  // weights of the best validation-loss epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
};

/// Adam on mean cross-entropy over the first `spec.window` steps of each
/// (already scaled) instance, with early stopping on validation loss.
/// Throws NumericalError on a non-finite loss.
TrainingResult train(const CnnSpec& spec, const LabeledDataset& train_set, const LabeledDataset& validation_set,
                     const TrainConfig& cfg);

struct Evaluation {
  double accuracy = 0.0;
  double normalized_error_rate = 0.0;
  double mean_loss = 0.0;
  std::size_t count = 0;
  std::array<std::array<std::size_t, 4>, 4> confusion{};  // [true][predicted]
};

/// (1 - accuracy) / (1 - 1/classes).
double normalized_error_rate(double accuracy, int classes = 4);

/// Argmax accuracy over the first `window` steps of each instance. Throws
/// std::invalid_argument on an empty set.
Evaluation evaluate(const CnnModel& model, const LabeledDataset& test_set);

/// First `window` rows of each selected instance as doubles, stacked.
std::vector<double> window_inputs(const LabeledDataset& data, std::size_t window, std::span<const std::size_t> indices);

/// CSV `epoch,train_loss,val_loss,val_accuracy`.
void write_history_csv(std::ostream& out, const std::vector<EpochRecord>& history);

}  // namespace swarm
