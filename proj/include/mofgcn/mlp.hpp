// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_MLP_HPP
#define MOFGCN_MLP_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mofgcn/tape.hpp"

namespace mofgcn {

enum class Activation { kIdentity, kTanh, kSoftplus };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

/// Architecture of a fully connected network. All dimensions >= 1 and the
/// activations are differentiable everywhere. final_bias = false drops the
/// output-layer bias, for heads whose downstream use is shift-invariant
/// (softmax logits) and would leave it non-identifiable.
struct MlpSpec {
  std::size_t input_dim = 1;
  std::vector<std::size_t> hidden_dims;
  std::size_t output_dim = 1;
  Activation activation = Activation::kTanh;
  Activation final_activation = Activation::kIdentity;
  bool final_bias = true;

  void validate() const;
  /// [input_dim, hidden..., output_dim]
  std::vector<std::size_t> layer_dims() const;
};

/// An MlpSpec bound to named tensors (prefix.W0, prefix.b0, ...) in a store.
struct MlpRef {
  MlpSpec spec;
  std::string prefix;
  std::vector<int> w_ids;
  std::vector<int> b_ids;
};

/// Creates the parameters for `spec` under `prefix` in `store`. Weights are
/// uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
MlpRef create_mlp(ParamStore& store, const std::string& prefix, const MlpSpec& spec,
                  std::mt19937_64& rng);

/// Binds to already-present parameters (e.g. after loading a checkpoint).
MlpRef bind_mlp(const ParamStore& store, const std::string& prefix, const MlpSpec& spec);

/// Recorded forward pass; gradients reach the parameters via Tape::backward.
NodeId mlp_forward(Tape& tape, const MlpRef& mlp, NodeId input);

/// Plain forward pass with frozen parameters. Bit-identical to the taped
/// path for the same parameters and input.
Vec mlp_eval(const ParamStore& store, const MlpRef& mlp, const Vec& input);

}  // namespace mofgcn

#endif  // MOFGCN_MLP_HPP
