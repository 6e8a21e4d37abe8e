// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/model.hpp"

#include <fstream>

#include <json.hpp>

#include "mofgcn/errors.hpp"

namespace mofgcn {

using nlohmann::json;

Pooling pooling_from_string(const std::string& s) {
  if (s == "sum") return Pooling::kSum;
  if (s == "attention") return Pooling::kAttention;
  throw ConfigError("unknown pooling mode: " + s + " (expected sum|attention)");
}

std::string to_string(Pooling p) { return p == Pooling::kSum ? "sum" : "attention"; }

void ModelConfig::validate() const {
  if (vocab_labels.empty()) throw ConfigError("model: vocabulary must be nonempty");
  if (conv.output_dim < 1) throw ConfigError("model: conv output_dim must be >= 1");
  if (pooling == Pooling::kSum && conv.output_dim != 1)
    throw ConfigError("model: sum pooling requires conv output_dim 1, got " +
                      std::to_string(conv.output_dim));
  if (conv.distance.rbf && conv.distance.rbf_count < 1)
    throw ConfigError("model: rbf_count must be >= 1");
}

EnergyModel EnergyModel::create(ModelConfig config, std::uint64_t seed) {
  config.validate();
  EnergyModel m;
  m.vocab_ = AtomTypeVocab(config.vocab_labels);
  config.conv.node_feature_dim = m.vocab_.size();
  m.config_ = std::move(config);
  std::mt19937_64 rng(seed);
  m.conv_ = ConvLayer::create(m.params_, m.config_.conv, "msg", rng);
  if (m.config_.pooling == Pooling::kAttention)
    m.attention_ = AttentionReadout::create(m.params_, m.config_.attention,
                                            m.config_.conv.output_dim, "readout", rng);
  return m;
}

void EnergyModel::bind_nets() {
  conv_ = ConvLayer::bind(params_, config_.conv, "msg");
  if (config_.pooling == Pooling::kAttention)
    attention_ = AttentionReadout::bind(params_, config_.attention, config_.conv.output_dim,
                                        "readout");
}

NodeId EnergyModel::forward(Tape& tape, const AtomGraph& graph) const {
  const NodeFeatures onehot = encode_nodes(graph, vocab_);
  const std::vector<NodeId> node_out = conv_forward(tape, conv_, onehot, graph);
  if (config_.pooling == Pooling::kSum) return sum_pool(tape, node_out);
  return attention_pool(tape, attention_, node_out);
}

double EnergyModel::predict(const AtomGraph& graph) const {
  ParamStore& store = const_cast<ParamStore&>(params_);  // read-only use
  Tape tape(store);
  return tape.scalar(forward(tape, graph));
}

Vec EnergyModel::pair_message(const std::string& type_a, const std::string& type_b,
                              double r) const {
  return mofgcn::pair_message(conv_, params_, vocab_, type_a, type_b, r);
}

namespace {

json config_to_json(const ModelConfig& c) {
  json j;
  j["vocab"] = c.vocab_labels;
  j["conv"] = {{"output_dim", c.conv.output_dim},
               {"hidden_dims", c.conv.hidden_dims},
               {"activation", to_string(c.conv.activation)},
               {"accumulation", to_string(c.conv.accumulation)},
               {"distance", {{"rbf", c.conv.distance.rbf},
                             {"rbf_count", c.conv.distance.rbf_count},
                             {"r_min", c.conv.distance.r_min},
                             {"r_max", c.conv.distance.r_max}}}};
  j["pooling"] = to_string(c.pooling);
  j["attention"] = {{"gate_hidden", c.attention.gate_hidden},
                    {"value_hidden", c.attention.value_hidden},
                    {"activation", to_string(c.attention.activation)}};
  return j;
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.vocab_labels = j.at("vocab").get<std::vector<std::string>>();
  const json& conv = j.at("conv");
  c.conv.output_dim = conv.at("output_dim").get<std::size_t>();
  c.conv.hidden_dims = conv.at("hidden_dims").get<std::vector<std::size_t>>();
  c.conv.activation = activation_from_string(conv.at("activation").get<std::string>());
  c.conv.accumulation = accumulation_from_string(conv.at("accumulation").get<std::string>());
  const json& dist = conv.at("distance");
  c.conv.distance.rbf = dist.at("rbf").get<bool>();
  c.conv.distance.rbf_count = dist.at("rbf_count").get<std::size_t>();
  c.conv.distance.r_min = dist.at("r_min").get<double>();
  c.conv.distance.r_max = dist.at("r_max").get<double>();
  c.pooling = pooling_from_string(j.at("pooling").get<std::string>());
  const json& att = j.at("attention");
  c.attention.gate_hidden = att.at("gate_hidden").get<std::vector<std::size_t>>();
  c.attention.value_hidden = att.at("value_hidden").get<std::vector<std::size_t>>();
  c.attention.activation = activation_from_string(att.at("activation").get<std::string>());
  c.conv.node_feature_dim = c.vocab_labels.size();
  return c;
}

constexpr int kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const EnergyModel& model,
                     const TargetNorm& norm) {
  json j;
  j["format"] = "mofgcn-checkpoint";
  j["version"] = kCheckpointVersion;
  j["model"] = config_to_json(model.config());
  j["target_norm"] = {{"mean", norm.mean}, {"std", norm.std_dev}};
  json params = json::object();
  const ParamStore& store = model.params();
  for (std::size_t i = 0; i < store.count(); ++i) {
    const Tensor& t = store.at(static_cast<int>(i));
    params[store.name_of(static_cast<int>(i))] = {{"shape", t.shape}, {"data", t.data}};
  }
  j["params"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("checkpoint write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open checkpoint: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed checkpoint " + path.string() + ": " + e.what());
  }
  if (j.value("format", "") != "mofgcn-checkpoint")
    throw ConfigError(path.string() + " is not a model checkpoint");
  if (j.value("version", -1) != kCheckpointVersion)
    throw ConfigError("unsupported checkpoint version in " + path.string());

  Checkpoint cp;
  cp.config = config_from_json(j.at("model"));
  cp.norm.mean = j.at("target_norm").at("mean").get<double>();
  cp.norm.std_dev = j.at("target_norm").at("std").get<double>();

  cp.model.config_ = cp.config;
  cp.model.vocab_ = AtomTypeVocab(cp.config.vocab_labels);
  for (const auto& [name, entry] : j.at("params").items()) {
    const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
    const auto data = entry.at("data").get<Vec>();
    const int id = cp.model.params_.add(name, shape);
    Tensor& t = cp.model.params_.at(id);
    if (t.size() != data.size())
      throw ConfigError("checkpoint tensor " + name + " has " + std::to_string(data.size()) +
                        " values for shape of size " + std::to_string(t.size()));
    t.data = data;
  }
  cp.model.bind_nets();
  return cp;
}

}  // namespace mofgcn
