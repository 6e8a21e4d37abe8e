// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mofgcn/conv.hpp"
#include "mofgcn/errors.hpp"
#include "mofgcn/gradcheck.hpp"
#include "mofgcn/model.hpp"
#include "mofgcn/pool.hpp"

using namespace mofgcn;

namespace {

const AtomTypeVocab kVocab({"A", "B", "C"});

AtomGraph triangle(double r01 = 0.5, double r12 = 0.25, double r02 = 0.75) {
  AtomGraph g;
  g.node_types = {0, 1, 2};
  g.edges = {{0, 1, r01}, {1, 2, r12}, {0, 2, r02}};
  return g;
}

ConvConfig scalar_conv(std::vector<std::size_t> hidden = {}) {
  ConvConfig c;
  c.node_feature_dim = kVocab.size();
  c.output_dim = 1;
  c.hidden_dims = std::move(hidden);
  return c;
}

void zero_params(ParamStore& store) {
  for (std::size_t i = 0; i < store.count(); ++i) {
    Tensor& t = store.at(static_cast<int>(i));
    std::fill(t.data.begin(), t.data.end(), 0.0);
  }
}

}  // namespace

TEST_CASE("encode_nodes: one-hot rows follow the vocabulary order") {
  AtomGraph g;
  g.node_types = {0, 2};  // A, C
  const NodeFeatures feats = encode_nodes(g, kVocab);
  REQUIRE(feats.size() == 2);
  CHECK(feats[0] == Vec{1, 0, 0});
  CHECK(feats[1] == Vec{0, 0, 1});
}

TEST_CASE("encode_nodes: empty graph gives an empty matrix") {
  CHECK(encode_nodes(AtomGraph{}, kVocab).empty());
}

TEST_CASE("encode_nodes: 3-node one-of-each graph is the identity matrix") {
  const NodeFeatures feats = encode_nodes(triangle(), kVocab);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(feats[i][j] == (i == j ? 1.0 : 0.0));
}

TEST_CASE("conv_forward: zero edges produce all-zero outputs") {
  ParamStore store;
  std::mt19937_64 rng(5);
  const ConvLayer layer = ConvLayer::create(store, scalar_conv({4}), "msg", rng);
  AtomGraph g;
  g.node_types = {0, 1};
  Tape tape(store);
  const auto out = conv_forward(tape, layer, encode_nodes(g, kVocab), g);
  REQUIRE(out.size() == 2);
  CHECK(tape.value(out[0]) == Vec{0.0});
  CHECK(tape.value(out[1]) == Vec{0.0});
}

TEST_CASE("conv_forward: one edge, linear distance-only message, edge-once") {
  // message net 4->1 linear with weights [0,0,0,1]: message = r
  ParamStore store;
  std::mt19937_64 rng(5);
  const ConvLayer layer = ConvLayer::create(store, scalar_conv(), "msg", rng);
  store.at("msg.W0").data = {0, 0, 0, 1};
  store.at("msg.b0").data = {0};

  AtomGraph g;
  g.node_types = {0, 1};  // A, B
  g.edges = {{0, 1, 0.7}};
  Tape tape(store);
  const auto out = conv_forward(tape, layer, encode_nodes(g, kVocab), g);
  CHECK(tape.value(out[0]) == Vec{0.7});  // src collects the message
  CHECK(tape.value(out[1]) == Vec{0.0});  // dst does not, in edge-once mode
}

TEST_CASE("conv_forward: triangle in symmetric mode with constant message") {
  ParamStore store;
  std::mt19937_64 rng(5);
  ConvConfig cfg = scalar_conv();
  cfg.accumulation = Accumulation::kSymmetric;
  const ConvLayer layer = ConvLayer::create(store, cfg, "msg", rng);
  zero_params(store);
  store.at("msg.b0").data = {1.25};  // constant message c

  Tape tape(store);
  const auto out = conv_forward(tape, layer, encode_nodes(triangle(), kVocab), triangle());
  for (const NodeId& n : out) CHECK(tape.value(n) == Vec{2.5});  // each node touches 2 edges
}

TEST_CASE("pair_message: symmetric in the type arguments, exactly") {
  ParamStore store;
  std::mt19937_64 rng(17);
  const ConvLayer layer = ConvLayer::create(store, scalar_conv({8}), "msg", rng);
  for (double r : {0.05, 0.3, 0.9}) {
    const Vec ab = pair_message(layer, store, kVocab, "A", "B", r);
    const Vec ba = pair_message(layer, store, kVocab, "B", "A", r);
    CHECK(ab == ba);
  }
}

TEST_CASE("pair_message: zero-weight net returns the bias for any r") {
  ParamStore store;
  std::mt19937_64 rng(17);
  const ConvLayer layer = ConvLayer::create(store, scalar_conv(), "msg", rng);
  zero_params(store);
  store.at("msg.b0").data = {0.375};
  CHECK(pair_message(layer, store, kVocab, "A", "B", 0.1) == Vec{0.375});
  CHECK(pair_message(layer, store, kVocab, "A", "B", 0.9) == Vec{0.375});
}

TEST_CASE("conv_forward: non-finite node features rejected") {
  ParamStore store;
  std::mt19937_64 rng(5);
  const ConvLayer layer = ConvLayer::create(store, scalar_conv(), "msg", rng);
  AtomGraph g;
  g.node_types = {0, 1};
  g.edges = {{0, 1, 0.5}};
  NodeFeatures feats = encode_nodes(g, kVocab);
  feats[0][1] = std::numeric_limits<double>::infinity();
  Tape tape(store);
  CHECK_THROWS_AS(conv_forward(tape, layer, feats, g), NumericError);
}

TEST_CASE("encode_nodes: species index outside the vocabulary rejected") {
  AtomGraph g;
  g.node_types = {0, 5};
  CHECK_THROWS_AS(encode_nodes(g, kVocab), ConfigError);
}

TEST_CASE("pair_message: nonpositive distance rejected") {
  ParamStore store;
  std::mt19937_64 rng(17);
  const ConvLayer layer = ConvLayer::create(store, scalar_conv(), "msg", rng);
  CHECK_THROWS_AS(pair_message(layer, store, kVocab, "A", "B", 0.0), ConfigError);
  CHECK_THROWS_AS(pair_message(layer, store, kVocab, "A", "B", -0.5), ConfigError);
}

TEST_CASE("weight sharing: identical (types, r) give identical messages across graphs") {
  ModelConfig mc;
  mc.vocab_labels = kVocab.labels();
  mc.conv.hidden_dims = {8, 8};
  EnergyModel model = EnergyModel::create(mc, 23);

  // the same A-B pair at r=0.42 embedded in two different graphs
  AtomGraph g1;
  g1.node_types = {0, 1};
  g1.edges = {{0, 1, 0.42}};
  AtomGraph g2 = triangle(0.42, 0.6, 0.9);  // edge (A,B) at the same distance

  ParamStore& store = model.params();
  Tape t1(store);
  const auto out1 = conv_forward(t1, model.conv(), encode_nodes(g1, kVocab), g1);
  Tape t2(store);
  const auto out2 = conv_forward(t2, model.conv(), encode_nodes(g2, kVocab), g2);

  const Vec ab = model.pair_message("A", "B", 0.42);
  CHECK(t1.value(out1[0]) == ab);  // node 0 of g1 holds exactly the A-B message
  // node 0 of g2 sums the same A-B message with its A-C message, exactly
  const Vec ac = model.pair_message("A", "C", 0.9);
  CHECK(t2.value(out2[0]) == Vec{ab[0] + ac[0]});
  // node 1 of g2 holds exactly the B-C message
  CHECK(t2.value(out2[1]) == model.pair_message("B", "C", 0.6));
}

TEST_CASE("permutation equivariance: relabeling nodes permutes conv outputs") {
  ParamStore store;
  std::mt19937_64 rng(29);
  const ConvLayer layer = ConvLayer::create(store, scalar_conv({8}), "msg", rng);

  const AtomGraph g = triangle();
  // permutation pi: 0->2, 1->0, 2->1
  const std::array<int, 3> pi = {2, 0, 1};
  AtomGraph gp;
  gp.node_types = {0, 0, 0};
  for (std::size_t i = 0; i < 3; ++i)
    gp.node_types[static_cast<std::size_t>(pi[i])] = g.node_types[i];
  for (const GraphEdge& e : g.edges)
    gp.edges.push_back({pi[static_cast<std::size_t>(e.src)],
                        pi[static_cast<std::size_t>(e.dst)], e.distance});

  Tape ta(store);
  const auto out = conv_forward(ta, layer, encode_nodes(g, kVocab), g);
  Tape tb(store);
  const auto outp = conv_forward(tb, layer, encode_nodes(gp, kVocab), gp);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(ta.value(out[i]) == tb.value(outp[static_cast<std::size_t>(pi[i])]));
}

TEST_CASE("edge-direction flip leaves the sum-pooled prediction unchanged") {
  ModelConfig mc;
  mc.vocab_labels = kVocab.labels();
  mc.conv.hidden_dims = {8};
  const EnergyModel model = EnergyModel::create(mc, 31);

  AtomGraph g = triangle();
  const double base = model.predict(g);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    AtomGraph flipped = g;
    std::swap(flipped.edges[e].src, flipped.edges[e].dst);
    CHECK(model.predict(flipped) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("conv gradients pass gradcheck at 1e-4") {
  ModelConfig mc;
  mc.vocab_labels = kVocab.labels();
  mc.conv.hidden_dims = {6};
  EnergyModel model = EnergyModel::create(mc, 37);
  const AtomGraph g = triangle();
  const auto build = [&](Tape& tape) {
    return tape.squared_error(model.forward(tape, g), 0.8);
  };
  CHECK(gradcheck(build, model.params(), 1e-5).max_relative_error < 1e-4);
}

TEST_CASE("sum_pool: plain example and empty graph") {
  CHECK(sum_pool(NodeFeatures{{1.0}, {2.0}, {3.0}}) == 6.0);
  CHECK(sum_pool(NodeFeatures{}) == 0.0);
}

TEST_CASE("sum_pool: invariant under node permutation") {
  NodeFeatures feats = {{0.1}, {-2.7}, {3.9}, {0.004}, {1e6}};
  const double base = sum_pool(feats);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(feats.begin(), feats.end(), rng);
    CHECK(sum_pool(feats) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("sum_pool: non-scalar features rejected in decomposition mode") {
  CHECK_THROWS_AS(sum_pool(NodeFeatures{{1.0, 2.0}}), NumericError);
}

TEST_CASE("attention_pool: single node gets weight exactly 1") {
  ParamStore store;
  std::mt19937_64 rng(43);
  AttentionConfig cfg;
  cfg.gate_hidden = {4};
  cfg.value_hidden = {4};
  const AttentionReadout readout = AttentionReadout::create(store, cfg, 1, "readout", rng);

  Tape tape(store);
  const NodeId feat = tape.constant({0.6});
  const double pooled = tape.scalar(attention_pool(tape, readout, {feat}));
  const Vec value = mlp_eval(store, readout.value_net, {0.6});
  CHECK(pooled == value[0]);
}

TEST_CASE("attention_pool: constant gate yields the mean of the values") {
  ParamStore store;
  std::mt19937_64 rng(43);
  AttentionConfig cfg;
  cfg.gate_hidden = {};
  cfg.value_hidden = {};
  const AttentionReadout readout = AttentionReadout::create(store, cfg, 1, "readout", rng);
  store.at("readout.gate.W0").data = {0.0};   // constant (zero) logits
  store.at("readout.value.W0").data = {1.0};  // value(x) = x
  store.at("readout.value.b0").data = {0.0};

  Tape tape(store);
  std::vector<NodeId> feats = {tape.constant({1.0}), tape.constant({2.0}),
                               tape.constant({6.0})};
  CHECK(tape.scalar(attention_pool(tape, readout, feats)) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("attention_pool: three nodes match the hand-computed weighted sum") {
  // gate(x) = 0.5 x, value(x) = 2 x - 1, feats = 1, 2, 3:
  // softmax(0.5, 1.0, 1.5) ~ (0.186324, 0.307196, 0.506480)
  // output = sum w_n value_n = 3.640313335659613
  ParamStore store;
  std::mt19937_64 rng(43);
  AttentionConfig cfg;
  cfg.gate_hidden = {};
  cfg.value_hidden = {};
  const AttentionReadout readout = AttentionReadout::create(store, cfg, 1, "readout", rng);
  store.at("readout.gate.W0").data = {0.5};
  store.at("readout.value.W0").data = {2.0};
  store.at("readout.value.b0").data = {-1.0};

  Tape tape(store);
  std::vector<NodeId> feats = {tape.constant({1.0}), tape.constant({2.0}),
                               tape.constant({3.0})};
  const double pooled = tape.scalar(attention_pool(tape, readout, feats));
  CHECK(pooled == doctest::Approx(3.640313335659613).epsilon(1e-14));
}

TEST_CASE("attention_pool: weights are positive and sum to one") {
  // with value(x) = 1 identically the pooled output IS the weight sum
  ParamStore store;
  std::mt19937_64 rng(47);
  AttentionConfig cfg;
  cfg.gate_hidden = {6};
  cfg.value_hidden = {};
  const AttentionReadout readout = AttentionReadout::create(store, cfg, 2, "readout", rng);
  store.at("readout.value.W0").data = {0.0, 0.0};
  store.at("readout.value.b0").data = {1.0};

  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    Tape tape(store);
    std::vector<NodeId> feats;
    const int n = 1 + trial % 7;
    for (int i = 0; i < n; ++i) feats.push_back(tape.constant({u(rng), u(rng)}));
    CHECK(tape.scalar(attention_pool(tape, readout, feats)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("attention_pool: empty graph rejected") {
  ParamStore store;
  std::mt19937_64 rng(43);
  const AttentionReadout readout = AttentionReadout::create(store, {}, 1, "readout", rng);
  Tape tape(store);
  CHECK_THROWS_AS(attention_pool(tape, readout, {}), NumericError);
}

TEST_CASE("attention pooling gradients pass gradcheck at 1e-4") {
  ModelConfig mc;
  mc.vocab_labels = kVocab.labels();
  mc.pooling = Pooling::kAttention;
  mc.conv.output_dim = 3;
  mc.conv.hidden_dims = {5};
  mc.attention.gate_hidden = {4};
  mc.attention.value_hidden = {4};
  EnergyModel model = EnergyModel::create(mc, 53);
  const AtomGraph g = triangle();
  const auto build = [&](Tape& tape) {
    return tape.squared_error(model.forward(tape, g), -0.4);
  };
  CHECK(gradcheck(build, model.params(), 1e-5).max_relative_error < 1e-4);
}

TEST_CASE("decomposition identity: pooled prediction equals the pair-message sum") {
  ModelConfig mc;
  mc.vocab_labels = kVocab.labels();
  mc.conv.hidden_dims = {16, 16};
  const EnergyModel model = EnergyModel::create(mc, 59);

  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const AtomGraph g = triangle(u(rng), u(rng), u(rng));
    double by_pairs = 0.0;
    for (const GraphEdge& e : g.edges) {
      const std::string& a = kVocab.label(static_cast<std::size_t>(
          g.node_types[static_cast<std::size_t>(e.src)]));
      const std::string& b = kVocab.label(static_cast<std::size_t>(
          g.node_types[static_cast<std::size_t>(e.dst)]));
      by_pairs += model.pair_message(a, b, e.distance)[0];
    }
    CHECK(model.predict(g) == doctest::Approx(by_pairs).epsilon(1e-12));
  }
}

TEST_CASE("oracle forward pass: hand-specified tiny network on a fixed triangle") {
  // message net 4 -> 2 -> 1, tanh hidden:
  //   W0 = [[0.1, -0.2, 0.3, 0.5], [0.4, 0.0, -0.1, 0.2]], b0 = [0.05, -0.05]
  //   W1 = [[0.7, -0.3]], b1 = [0.01]
  // triangle A-B-C with r01=0.5, r12=0.25, r02=0.75; per-edge messages:
  //   e01 = 0.7 tanh(0.2)   - 0.3 tanh(0.45) + 0.01 = 0.021593022582430448
  //   e12 = 0.7 tanh(0.275) - 0.3 tanh(-0.1) + 0.01 = 0.22769022580260767
  //   e02 = 0.7 tanh(0.825) - 0.3 tanh(0.4)  + 0.01 = 0.3704627819162132
  // prediction = e01 + e12 + e02 = 0.6197460303012513
  ModelConfig mc;
  mc.vocab_labels = kVocab.labels();
  mc.conv.hidden_dims = {2};
  EnergyModel model = EnergyModel::create(mc, 1);
  model.params().at("msg.W0").data = {0.1, -0.2, 0.3, 0.5, 0.4, 0.0, -0.1, 0.2};
  model.params().at("msg.b0").data = {0.05, -0.05};
  model.params().at("msg.W1").data = {0.7, -0.3};
  model.params().at("msg.b1").data = {0.01};

  const double pred = model.predict(triangle());
  CHECK(pred == doctest::Approx(0.6197460303012513).epsilon(1e-12));

  const double by_hand = (0.7 * std::tanh(0.2) - 0.3 * std::tanh(0.45) + 0.01) +
                         (0.7 * std::tanh(0.275) - 0.3 * std::tanh(-0.1) + 0.01) +
                         (0.7 * std::tanh(0.825) - 0.3 * std::tanh(0.4) + 0.01);
  CHECK(pred == doctest::Approx(by_hand).epsilon(1e-12));
}
