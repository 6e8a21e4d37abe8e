// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/gradcheck.hpp"

#include <cmath>

#include "mofgcn/errors.hpp"

namespace mofgcn {

namespace {

std::string entry_name(const ParamStore& params, int tensor, std::size_t k) {
  return params.name_of(tensor) + "[" + std::to_string(k) + "]";
}

}  // namespace

GradCheckResult gradcheck(const std::function<NodeId(Tape&)>& build, ParamStore& params,
                          double eps) {
  if (eps <= 0) throw ConfigError("gradcheck: eps must be > 0");

  std::vector<Vec> analytic(params.count());
  {
    Tape tape(params);
    const NodeId loss = build(tape);
    if (!std::isfinite(tape.scalar(loss)))
      throw NumericError("gradcheck: non-finite function value at base point");
    tape.backward(loss);
    for (std::size_t i = 0; i < params.count(); ++i)
      analytic[i] = params.at(static_cast<int>(i)).grad;
    params.zero_grad();
  }

  auto eval = [&]() {
    Tape tape(params);
    return tape.scalar(build(tape));
  };

  GradCheckResult result;
  for (std::size_t i = 0; i < params.count(); ++i) {
    Tensor& t = params.at(static_cast<int>(i));
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double saved = t.data[k];
      t.data[k] = saved + eps;
      const double up = eval();
      t.data[k] = saved - eps;
      const double down = eval();
      t.data[k] = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic[i][k];
      if (!std::isfinite(numeric) || !std::isfinite(a))
        throw NumericError("gradcheck: non-finite gradient at " +
                           entry_name(params, static_cast<int>(i), k));
      const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
      const double rel = std::fabs(a - numeric) / denom;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_parameter = entry_name(params, static_cast<int>(i), k);
      }
    }
  }
  return result;
}

}  // namespace mofgcn
