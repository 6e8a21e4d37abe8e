// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_CONV_HPP
#define MOFGCN_CONV_HPP

#include <string>
#include <vector>

#include "mofgcn/graph.hpp"
#include "mofgcn/mlp.hpp"

namespace mofgcn {

/// How an edge message is credited to node outputs. In edge-once mode the
/// message lands on the stored source only, so sum pooling counts every
/// pair exactly once; symmetric mode credits both endpoints (for stacked
/// layers).
enum class Accumulation { kEdgeOnce, kSymmetric };

Accumulation accumulation_from_string(const std::string& s);
std::string to_string(Accumulation a);

/// Distance featurization for the message input: the raw scalar by default,
/// or a Gaussian radial basis expansion behind a flag.
struct DistanceFeaturizer {
  bool rbf = false;
  std::size_t rbf_count = 16;
  double r_min = 0.0;
  double r_max = 1.0;

  std::size_t dim() const { return rbf ? rbf_count : 1; }
  Vec features(double r) const;
};

struct ConvConfig {
  std::size_t node_feature_dim = 0;  // one-hot vocab size at layer 0
  std::size_t output_dim = 1;
  std::vector<std::size_t> hidden_dims = {64, 64};
  Activation activation = Activation::kTanh;
  Accumulation accumulation = Accumulation::kEdgeOnce;
  DistanceFeaturizer distance;

  /// Message network consumes (summed endpoint features) ++ distance features.
  MlpSpec message_spec() const;
};

/// One shared message network serves every edge, so identical
/// (type_a, type_b, r) inputs give identical messages anywhere in any graph.
struct ConvLayer {
  ConvConfig config;
  MlpRef message_net;

  static ConvLayer create(ParamStore& store, const ConvConfig& config,
                          const std::string& prefix, std::mt19937_64& rng);
  static ConvLayer bind(const ParamStore& store, const ConvConfig& config,
                        const std::string& prefix);
};

/// Per-node feature rows; one-hot species encoding at layer 0.
using NodeFeatures = std::vector<Vec>;

NodeFeatures encode_nodes(const AtomGraph& graph, const AtomTypeVocab& vocab);

/// Recorded convolution: per stored edge (i,j,r) one message
/// m = message_net((feats_i + feats_j) ++ dist(r)), accumulated per node.
/// Nodes with no incident contribution output the zero vector.
std::vector<NodeId> conv_forward(Tape& tape, const ConvLayer& layer,
                                 const std::vector<NodeId>& feats, const AtomGraph& graph);

/// Convenience overload: wraps plain features as tape constants first.
std::vector<NodeId> conv_forward(Tape& tape, const ConvLayer& layer,
                                 const NodeFeatures& feats, const AtomGraph& graph);

/// The learned pair function probed directly:
/// message_net((onehot_a + onehot_b) ++ dist(r)). Symmetric in (a, b).
Vec pair_message(const ConvLayer& layer, const ParamStore& store, const AtomTypeVocab& vocab,
                 const std::string& type_a, const std::string& type_b, double r);

}  // namespace mofgcn

#endif  // MOFGCN_CONV_HPP
