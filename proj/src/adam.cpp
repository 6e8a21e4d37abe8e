// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/adam.hpp"

#include <cmath>

#include "mofgcn/errors.hpp"

namespace mofgcn {

AdamState::AdamState(const ParamStore& params, AdamConfig config) : config_(config) {
  if (config_.learning_rate <= 0) throw ConfigError("adam: learning_rate must be > 0");
  if (config_.beta1 < 0 || config_.beta1 >= 1) throw ConfigError("adam: beta1 out of [0,1)");
  if (config_.beta2 < 0 || config_.beta2 >= 1) throw ConfigError("adam: beta2 out of [0,1)");
  if (config_.epsilon <= 0) throw ConfigError("adam: epsilon must be > 0");
  m_.reserve(params.count());
  v_.reserve(params.count());
  for (std::size_t i = 0; i < params.count(); ++i) {
    m_.emplace_back(params.at(static_cast<int>(i)).size(), 0.0);
    v_.emplace_back(params.at(static_cast<int>(i)).size(), 0.0);
  }
}

void AdamState::step(ParamStore& params) {
  if (params.count() != m_.size())
    throw ConfigError("adam: parameter count changed after state creation");
  if (!params.grads_valid())
    throw NumericError("adam: gradients missing; run backward before step");
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < m_.size(); ++i) {
    Tensor& p = params.at(static_cast<int>(i));
    Vec& m = m_[i];
    Vec& v = v_[i];
    if (p.size() != m.size())
      throw ConfigError("adam: shape of " + params.name_of(static_cast<int>(i)) +
                        " changed after state creation");
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double g = p.grad[k];
      m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g;
      v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      p.data[k] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
  params.zero_grad();
}

}  // namespace mofgcn
