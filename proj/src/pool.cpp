// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/pool.hpp"

#include "mofgcn/errors.hpp"

namespace mofgcn {

double sum_pool(const NodeFeatures& feats) {
  Vec scalars(feats.size());
  for (std::size_t i = 0; i < feats.size(); ++i) {
    if (feats[i].size() != 1)
      throw NumericError("sum_pool: node " + std::to_string(i) + " has feature dimension " +
                         std::to_string(feats[i].size()) +
                         "; decomposition mode requires 1");
    scalars[i] = feats[i][0];
  }
  return tree_sum(scalars.data(), scalars.size());
}

NodeId sum_pool(Tape& tape, const std::vector<NodeId>& node_feats) {
  if (node_feats.empty()) return tape.constant_scalar(0.0);
  for (std::size_t i = 0; i < node_feats.size(); ++i)
    if (tape.value(node_feats[i]).size() != 1)
      throw NumericError("sum_pool: node " + std::to_string(i) + " has feature dimension " +
                         std::to_string(tape.value(node_feats[i]).size()) +
                         "; decomposition mode requires 1");
  return tape.sum_entries(tape.stack(node_feats));
}

namespace {

// The gate output feeds a softmax, which is invariant to a constant logit
// shift, so a gate output bias would be non-identifiable; it is omitted.
MlpSpec gate_spec(const AttentionConfig& config, std::size_t feature_dim) {
  MlpSpec spec{feature_dim, config.gate_hidden, 1, config.activation,
               Activation::kIdentity};
  spec.final_bias = false;
  return spec;
}

MlpSpec value_spec(const AttentionConfig& config, std::size_t feature_dim) {
  return {feature_dim, config.value_hidden, 1, config.activation, Activation::kIdentity};
}

}  // namespace

AttentionReadout AttentionReadout::create(ParamStore& store, const AttentionConfig& config,
                                          std::size_t feature_dim, const std::string& prefix,
                                          std::mt19937_64& rng) {
  AttentionReadout r;
  r.gate_net = create_mlp(store, prefix + ".gate", gate_spec(config, feature_dim), rng);
  r.value_net = create_mlp(store, prefix + ".value", value_spec(config, feature_dim), rng);
  return r;
}

AttentionReadout AttentionReadout::bind(const ParamStore& store, const AttentionConfig& config,
                                        std::size_t feature_dim, const std::string& prefix) {
  AttentionReadout r;
  r.gate_net = bind_mlp(store, prefix + ".gate", gate_spec(config, feature_dim));
  r.value_net = bind_mlp(store, prefix + ".value", value_spec(config, feature_dim));
  return r;
}

NodeId attention_pool(Tape& tape, const AttentionReadout& readout,
                      const std::vector<NodeId>& node_feats) {
  if (node_feats.empty())
    throw NumericError("attention_pool: empty graph; softmax over nodes is undefined");
  std::vector<NodeId> gates;
  std::vector<NodeId> values;
  gates.reserve(node_feats.size());
  values.reserve(node_feats.size());
  for (NodeId f : node_feats) {
    gates.push_back(mlp_forward(tape, readout.gate_net, f));
    values.push_back(mlp_forward(tape, readout.value_net, f));
  }
  const NodeId weights = tape.softmax(tape.stack(gates));
  return tape.dot(weights, tape.stack(values));
}

}  // namespace mofgcn
