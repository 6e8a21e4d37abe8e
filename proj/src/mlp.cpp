// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/mlp.hpp"

#include <cmath>

#include "mofgcn/errors.hpp"

namespace mofgcn {

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::kIdentity;
  if (s == "tanh") return Activation::kTanh;
  if (s == "softplus") return Activation::kSoftplus;
  throw ConfigError("unknown activation: " + s);
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kTanh: return "tanh";
    case Activation::kSoftplus: return "softplus";
  }
  throw ConfigError("invalid activation value");
}

void MlpSpec::validate() const {
  if (input_dim < 1) throw ConfigError("mlp: input_dim must be >= 1");
  if (output_dim < 1) throw ConfigError("mlp: output_dim must be >= 1");
  for (std::size_t d : hidden_dims)
    if (d < 1) throw ConfigError("mlp: hidden dimensions must be >= 1");
}

std::vector<std::size_t> MlpSpec::layer_dims() const {
  std::vector<std::size_t> dims;
  dims.reserve(hidden_dims.size() + 2);
  dims.push_back(input_dim);
  dims.insert(dims.end(), hidden_dims.begin(), hidden_dims.end());
  dims.push_back(output_dim);
  return dims;
}

namespace {

std::string weight_name(const std::string& prefix, std::size_t layer) {
  return prefix + ".W" + std::to_string(layer);
}

std::string bias_name(const std::string& prefix, std::size_t layer) {
  return prefix + ".b" + std::to_string(layer);
}

}  // namespace

MlpRef create_mlp(ParamStore& store, const std::string& prefix, const MlpSpec& spec,
                  std::mt19937_64& rng) {
  spec.validate();
  MlpRef ref;
  ref.spec = spec;
  ref.prefix = prefix;
  const auto dims = spec.layer_dims();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const std::size_t fan_in = dims[l];
    const std::size_t fan_out = dims[l + 1];
    const bool last = (l + 2 == dims.size());
    const int w = store.add(weight_name(prefix, l), {fan_out, fan_in});
    const int b = (last && !spec.final_bias) ? -1 : store.add(bias_name(prefix, l), {fan_out});
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (double& v : store.at(w).data) v = u(rng);
    ref.w_ids.push_back(w);
    ref.b_ids.push_back(b);
  }
  return ref;
}

MlpRef bind_mlp(const ParamStore& store, const std::string& prefix, const MlpSpec& spec) {
  spec.validate();
  MlpRef ref;
  ref.spec = spec;
  ref.prefix = prefix;
  const auto dims = spec.layer_dims();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const bool last = (l + 2 == dims.size());
    const bool want_bias = !(last && !spec.final_bias);
    const int w = store.index_of(weight_name(prefix, l));
    const int b = want_bias ? store.index_of(bias_name(prefix, l)) : -1;
    if (w < 0 || (want_bias && b < 0))
      throw ConfigError("missing parameters for network '" + prefix + "' layer " +
                        std::to_string(l));
    const Tensor& wt = store.at(w);
    if (wt.rows() != dims[l + 1] || wt.cols() != dims[l])
      throw ConfigError("parameter " + weight_name(prefix, l) + " has shape " +
                        std::to_string(wt.rows()) + "x" + std::to_string(wt.cols()) +
                        ", expected " + std::to_string(dims[l + 1]) + "x" +
                        std::to_string(dims[l]));
    ref.w_ids.push_back(w);
    ref.b_ids.push_back(b);
  }
  return ref;
}

namespace {

NodeId apply_activation(Tape& tape, Activation a, NodeId x) {
  switch (a) {
    case Activation::kIdentity: return x;
    case Activation::kTanh: return tape.tanh(x);
    case Activation::kSoftplus: return tape.softplus(x);
  }
  throw ConfigError("invalid activation value");
}

void apply_activation(Activation a, Vec& x) {
  switch (a) {
    case Activation::kIdentity: return;
    case Activation::kTanh:
      for (double& v : x) v = std::tanh(v);
      return;
    case Activation::kSoftplus:
      for (double& v : x)
        v = v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
      return;
  }
  throw ConfigError("invalid activation value");
}

}  // namespace

NodeId mlp_forward(Tape& tape, const MlpRef& mlp, NodeId input) {
  const std::size_t in_dim = tape.value(input).size();
  if (in_dim != mlp.spec.input_dim)
    throw NumericError("mlp '" + mlp.prefix + "': input has dimension " +
                       std::to_string(in_dim) + ", spec expects " +
                       std::to_string(mlp.spec.input_dim));
  NodeId x = input;
  const std::size_t layers = mlp.w_ids.size();
  for (std::size_t l = 0; l < layers; ++l) {
    x = tape.affine(mlp.w_ids[l], mlp.b_ids[l], x);
    const bool last = (l + 1 == layers);
    x = apply_activation(tape, last ? mlp.spec.final_activation : mlp.spec.activation, x);
  }
  return x;
}

Vec mlp_eval(const ParamStore& store, const MlpRef& mlp, const Vec& input) {
  if (input.size() != mlp.spec.input_dim)
    throw NumericError("mlp '" + mlp.prefix + "': input has dimension " +
                       std::to_string(input.size()) + ", spec expects " +
                       std::to_string(mlp.spec.input_dim));
  Vec x = input;
  Vec y;
  const std::size_t layers = mlp.w_ids.size();
  for (std::size_t l = 0; l < layers; ++l) {
    const Tensor& w = store.at(mlp.w_ids[l]);
    const Tensor* b = mlp.b_ids[l] < 0 ? nullptr : &store.at(mlp.b_ids[l]);
    y.resize(w.rows());
    affine_eval(w, b, x.data(), y.data());
    const bool last = (l + 1 == layers);
    apply_activation(last ? mlp.spec.final_activation : mlp.spec.activation, y);
    x.swap(y);
  }
  return x;
}

}  // namespace mofgcn
