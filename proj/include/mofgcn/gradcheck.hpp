// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_GRADCHECK_HPP
#define MOFGCN_GRADCHECK_HPP

#include <functional>
#include <string>

#include "mofgcn/tape.hpp"

namespace mofgcn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;  // "name[k]" of the worst entry
};

/// Compares the tape's analytic gradient of a deterministic scalar function
/// against central finite differences with perturbation `eps`.
///
/// `build` records the function on the given tape and returns the scalar
/// output node; it is re-invoked on fresh tapes for every perturbed
/// evaluation, reading the current contents of `params`.
///
/// Relative error per entry: |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
/// Non-finite values raise NumericError naming the offending parameter.
GradCheckResult gradcheck(const std::function<NodeId(Tape&)>& build, ParamStore& params,
                          double eps);

}  // namespace mofgcn

#endif  // MOFGCN_GRADCHECK_HPP
