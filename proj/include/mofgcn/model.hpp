// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_MODEL_HPP
#define MOFGCN_MODEL_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mofgcn/pool.hpp"

namespace mofgcn {

enum class Pooling { kSum, kAttention };

Pooling pooling_from_string(const std::string& s);
std::string to_string(Pooling p);

/// Full model description: species vocabulary, convolution, readout.
struct ModelConfig {
  std::vector<std::string> vocab_labels;
  ConvConfig conv;  // conv.node_feature_dim is derived from the vocabulary
  Pooling pooling = Pooling::kSum;
  AttentionConfig attention;

  void validate() const;
  /// True for the interpretable configuration (scalar conv output + sum pool).
  bool decomposition_mode() const {
    return pooling == Pooling::kSum && conv.output_dim == 1;
  }
};

/// Train-split target standardization; predictions are denormalized back to
/// target units for reporting.
struct TargetNorm {
  double mean = 0.0;
  double std_dev = 1.0;

  double normalize(double y) const { return (y - mean) / std_dev; }
  double denormalize(double y) const { return y * std_dev + mean; }
};

struct Checkpoint;

/// One conv layer plus a readout over an owned ParamStore.
class EnergyModel {
 public:
  /// Fresh model with seeded initialization.
  static EnergyModel create(ModelConfig config, std::uint64_t seed);

  /// Records a prediction for one graph; returns the scalar output node.
  NodeId forward(Tape& tape, const AtomGraph& graph) const;

  /// Plain prediction in the model's output space (normalized target units).
  double predict(const AtomGraph& graph) const;

  /// Learned pair function value for a type pair at distance r.
  Vec pair_message(const std::string& type_a, const std::string& type_b, double r) const;

  const ModelConfig& config() const { return config_; }
  const AtomTypeVocab& vocab() const { return vocab_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }
  const ConvLayer& conv() const { return conv_; }

  EnergyModel() = default;  // inert until create() or load_checkpoint()

 private:
  void bind_nets();

  ModelConfig config_;
  AtomTypeVocab vocab_;
  ParamStore params_;
  ConvLayer conv_;
  AttentionReadout attention_;
  friend Checkpoint load_checkpoint(const std::filesystem::path& path);
};

/// Versioned JSON checkpoint: model config, target normalization, named
/// tensors. Round-trips bit-exactly (asserted in tests).
struct Checkpoint {
  ModelConfig config;
  TargetNorm norm;
  EnergyModel model;  // params populated from file
};

void save_checkpoint(const std::filesystem::path& path, const EnergyModel& model,
                     const TargetNorm& norm);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mofgcn

#endif  // MOFGCN_MODEL_HPP
