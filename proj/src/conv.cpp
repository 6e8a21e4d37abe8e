// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/conv.hpp"

#include <cmath>

#include "mofgcn/errors.hpp"

namespace mofgcn {

Accumulation accumulation_from_string(const std::string& s) {
  if (s == "edge-once") return Accumulation::kEdgeOnce;
  if (s == "symmetric") return Accumulation::kSymmetric;
  throw ConfigError("unknown accumulation mode: " + s + " (expected edge-once|symmetric)");
}

std::string to_string(Accumulation a) {
  return a == Accumulation::kEdgeOnce ? "edge-once" : "symmetric";
}

Vec DistanceFeaturizer::features(double r) const {
  if (!rbf) return Vec{r};
  // Gaussian basis with centers spread over [r_min, r_max]; width = spacing.
  Vec out(rbf_count);
  const double span = r_max - r_min;
  const double step = rbf_count > 1 ? span / static_cast<double>(rbf_count - 1) : span;
  const double width = step > 0 ? step : 1.0;
  for (std::size_t k = 0; k < rbf_count; ++k) {
    const double center = r_min + step * static_cast<double>(k);
    const double d = (r - center) / width;
    out[k] = std::exp(-0.5 * d * d);
  }
  return out;
}

MlpSpec ConvConfig::message_spec() const {
  MlpSpec spec;
  spec.input_dim = node_feature_dim + distance.dim();
  spec.hidden_dims = hidden_dims;
  spec.output_dim = output_dim;
  spec.activation = activation;
  spec.final_activation = Activation::kIdentity;
  return spec;
}

ConvLayer ConvLayer::create(ParamStore& store, const ConvConfig& config,
                            const std::string& prefix, std::mt19937_64& rng) {
  if (config.node_feature_dim == 0)
    throw ConfigError("conv: node_feature_dim must be set before creating the layer");
  ConvLayer layer;
  layer.config = config;
  layer.message_net = create_mlp(store, prefix, config.message_spec(), rng);
  return layer;
}

ConvLayer ConvLayer::bind(const ParamStore& store, const ConvConfig& config,
                          const std::string& prefix) {
  ConvLayer layer;
  layer.config = config;
  layer.message_net = bind_mlp(store, prefix, config.message_spec());
  return layer;
}

NodeFeatures encode_nodes(const AtomGraph& graph, const AtomTypeVocab& vocab) {
  NodeFeatures feats;
  feats.reserve(graph.node_count());
  for (int t : graph.node_types) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab.size())
      throw ConfigError("encode_nodes: species index " + std::to_string(t) +
                        " outside vocabulary of size " + std::to_string(vocab.size()));
    Vec row(vocab.size(), 0.0);
    row[static_cast<std::size_t>(t)] = 1.0;
    feats.push_back(std::move(row));
  }
  return feats;
}

std::vector<NodeId> conv_forward(Tape& tape, const ConvLayer& layer,
                                 const std::vector<NodeId>& feats, const AtomGraph& graph) {
  const std::size_t n = graph.node_count();
  if (feats.size() != n)
    throw NumericError("conv: " + std::to_string(feats.size()) + " feature rows for " +
                       std::to_string(n) + " nodes");
  for (const NodeId& f : feats) {
    const Vec& v = tape.value(f);
    if (v.size() != layer.config.node_feature_dim)
      throw NumericError("conv: feature dimension " + std::to_string(v.size()) +
                         " does not match configured " +
                         std::to_string(layer.config.node_feature_dim));
    for (double x : v)
      if (!std::isfinite(x)) throw NumericError("conv: non-finite node feature");
  }

  std::vector<std::vector<NodeId>> contributions(n);
  for (const GraphEdge& e : graph.edges) {
    if (e.src < 0 || e.dst < 0 || static_cast<std::size_t>(e.src) >= n ||
        static_cast<std::size_t>(e.dst) >= n)
      throw NumericError("conv: edge endpoint out of range");
    const NodeId summed = tape.add(feats[static_cast<std::size_t>(e.src)],
                                   feats[static_cast<std::size_t>(e.dst)]);
    const NodeId input = tape.append(summed, layer.config.distance.features(e.distance));
    const NodeId message = mlp_forward(tape, layer.message_net, input);
    contributions[static_cast<std::size_t>(e.src)].push_back(message);
    if (layer.config.accumulation == Accumulation::kSymmetric)
      contributions[static_cast<std::size_t>(e.dst)].push_back(message);
  }

  std::vector<NodeId> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (contributions[i].empty())
      out.push_back(tape.constant(Vec(layer.config.output_dim, 0.0)));
    else
      out.push_back(tape.sum(contributions[i]));
  }
  return out;
}

std::vector<NodeId> conv_forward(Tape& tape, const ConvLayer& layer,
                                 const NodeFeatures& feats, const AtomGraph& graph) {
  std::vector<NodeId> nodes;
  nodes.reserve(feats.size());
  for (const Vec& row : feats) nodes.push_back(tape.constant(row));
  return conv_forward(tape, layer, nodes, graph);
}

Vec pair_message(const ConvLayer& layer, const ParamStore& store, const AtomTypeVocab& vocab,
                 const std::string& type_a, const std::string& type_b, double r) {
  if (!(r > 0.0)) throw ConfigError("pair_message: distance must be > 0, got " + std::to_string(r));
  const int a = vocab.index_of(type_a);
  const int b = vocab.index_of(type_b);
  if (a < 0) throw ConfigError("pair_message: species '" + type_a + "' not in vocabulary");
  if (b < 0) throw ConfigError("pair_message: species '" + type_b + "' not in vocabulary");
  Vec input(vocab.size(), 0.0);
  input[static_cast<std::size_t>(a)] += 1.0;
  input[static_cast<std::size_t>(b)] += 1.0;
  const Vec dist = layer.config.distance.features(r);
  input.insert(input.end(), dist.begin(), dist.end());
  return mlp_eval(store, layer.message_net, input);
}

}  // namespace mofgcn
