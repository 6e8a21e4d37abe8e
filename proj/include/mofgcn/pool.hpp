// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_POOL_HPP
#define MOFGCN_POOL_HPP

#include <string>
#include <vector>

#include "mofgcn/conv.hpp"

namespace mofgcn {

/// Plain sum readout over per-node scalars (decomposition configuration).
/// Deterministic pairwise tree sum in node index order. Empty input sums
/// to zero. Requires feature dimension 1.
double sum_pool(const NodeFeatures& feats);

/// Recorded variant over tape nodes.
NodeId sum_pool(Tape& tape, const std::vector<NodeId>& node_feats);

struct AttentionConfig {
  std::vector<std::size_t> gate_hidden = {64};
  std::vector<std::size_t> value_hidden = {64};
  Activation activation = Activation::kTanh;
};

/// Gated readout: softmax over per-node gate scalars weights per-node value
/// scalars. Both networks consume the convolution output dimension.
struct AttentionReadout {
  MlpRef gate_net;
  MlpRef value_net;

  static AttentionReadout create(ParamStore& store, const AttentionConfig& config,
                                 std::size_t feature_dim, const std::string& prefix,
                                 std::mt19937_64& rng);
  static AttentionReadout bind(const ParamStore& store, const AttentionConfig& config,
                               std::size_t feature_dim, const std::string& prefix);
};

/// weights = softmax over nodes of gate(feats_n); output = sum_n weights_n * value(feats_n).
/// Errors on an empty graph (softmax undefined).
NodeId attention_pool(Tape& tape, const AttentionReadout& readout,
                      const std::vector<NodeId>& node_feats);

}  // namespace mofgcn

#endif  // MOFGCN_POOL_HPP
