// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_ADAM_HPP
#define MOFGCN_ADAM_HPP

#include <cstdint>
#include <vector>

#include "mofgcn/param_store.hpp"

namespace mofgcn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam over every tensor of a ParamStore. Moment buffers
/// mirror the parameter shapes; the step counter is strictly increasing.
class AdamState {
 public:
  AdamState(const ParamStore& params, AdamConfig config);

  /// One update. Requires gradients populated by backward(); clears them.
  void step(ParamStore& params);

  std::uint64_t step_count() const { return t_; }
  const AdamConfig& config() const { return config_; }
  const Vec& first_moment(std::size_t tensor_index) const { return m_.at(tensor_index); }
  const Vec& second_moment(std::size_t tensor_index) const { return v_.at(tensor_index); }

 private:
  AdamConfig config_;
  std::vector<Vec> m_;
  std::vector<Vec> v_;
  std::uint64_t t_ = 0;
};

}  // namespace mofgcn

#endif  // MOFGCN_ADAM_HPP
