#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace swarm {

struct ConvLayerSpec {
  int filters = 32;
  int kernel = 7;
  bool operator==(const ConvLayerSpec&) const = default;
};

/// Layer stack: per conv layer `conv(same padding) -> ReLU -> max-pool
/// (stride = pool, ceil mode) -> dropout`; then global average over time,
/// an affine map to `classes` logits, and softmax.
struct CnnSpec {
  int window = 20;
  int features = 40;
  std::vector<ConvLayerSpec> conv = {{32, 7}};
  int pool = 5;
  double dropout = 0.1;
  int classes = 4;

  /// Sequence length entering each conv layer, plus the final pooled length.
  std::vector<int> lengths() const;
  std::size_t parameter_count() const;
  /// Throws std::invalid_argument when a kernel exceeds its input length or
  /// any size is non-positive.
  void validate() const;
  std::string describe() const;
  bool operator==(const CnnSpec&) const = default;

  /// Preset layer stacks, one per enrichment dataset.
  static CnnSpec defender_number(int features = 40);
  static CnnSpec defender_motion(int features = 40);
  static CnnSpec measurement_noise(int features = 40);
  /// Looks up one of "defender_number", "defender_motion", "measurement_noise".
  static CnnSpec named(const std::string& name, int features = 40);
};

/// Scalar whose gradient `gradient` returns.
struct GradientHead {
  enum class Kind { CrossEntropy, Probability, Logit } kind = Kind::CrossEntropy;
  int label = 0;

  static GradientHead loss(int label) { return {Kind::CrossEntropy, label}; }
  static GradientHead probability(int cls) { return {Kind::Probability, cls}; }
  static GradientHead logit(int cls) { return {Kind::Logit, cls}; }
};

struct Gradients {
  double value = 0.0;
  std::vector<double> weights;  // same layout as CnnModel::parameters()
  std::vector<double> input;    // [window x features]
};

/// Parameters laid out flat: for each conv layer W[filters][kernel][in] then
/// b[filters]; then the dense W[classes][channels] and b[classes].
class CnnModel {
public:
  CnnModel() = default;
  explicit CnnModel(CnnSpec spec);

  const CnnSpec& spec() const { return spec_; }
  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }

  /// Glorot-uniform weights, zero biases.
  void initialize(std::uint64_t seed);

  /// Class probabilities for one [window x features] input in inference mode.
  std::vector<double> forward(std::span<const double> input) const;

  /// Train-mode forward (dropout active) using `seed` for the masks.
  std::vector<double> forward_train(std::span<const double> input, std::uint64_t seed) const;

  /// Inference over `count` stacked inputs; writes count x classes probabilities.
  void predict(std::span<const double> inputs, std::size_t count, std::span<double> probs) const;

  /// Pre-activation output [length x filters] of conv layer `layer`.
  std::vector<double> conv_output(std::span<const double> input, std::size_t layer) const;

  /// Mean cross-entropy of a batch and its parameter gradient (added to
  /// `grad`). `dropout_seed` of 0 disables dropout.
  double loss_and_gradient(std::span<const double> inputs, std::span<const std::uint8_t> labels,
                           std::span<double> grad, std::uint64_t dropout_seed) const;

  bool operator==(const CnnModel&) const = default;

private:
  CnnSpec spec_;
  std::vector<double> params_;
};

/// Exact reverse-mode gradient of `head` (inference mode) with respect to
/// every weight and every input entry.
Gradients gradient(const CnnModel& model, std::span<const double> input, GradientHead head);

/// |d p_true / d input|, [window x features].
std::vector<double> saliency_map(const CnnModel& model, std::span<const double> input, int true_label);

/// Sums a [window x 4 N_A] map over each agent's four channels -> [window x N_A].
std::vector<double> aggregate_by_agent(std::span<const double> map, int window, int features);

}  // namespace swarm
