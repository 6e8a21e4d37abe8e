// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_TAPE_HPP
#define MOFGCN_TAPE_HPP

#include <cstddef>
#include <vector>

#include "mofgcn/param_store.hpp"

namespace mofgcn {

/// Handle to a value recorded on a Tape.
struct NodeId {
  int v = -1;
  bool valid() const { return v >= 0; }
};

/// Reverse-mode autodiff over a recorded computation tape.
///
/// Forward calls append nodes holding vector values; backward() walks the
/// tape once in reverse and writes d(loss)/d(param) into the gradient slots
/// of the bound ParamStore, replacing whatever was there. A second
/// backward() on the same tape without new forward work is an error.
///
/// Affine nodes reference ParamStore tensors directly, so a parameter shared
/// by many tape nodes (the weight sharing of the message network) receives
/// the sum of all its contributions in a single backward pass.
class Tape {
 public:
  explicit Tape(ParamStore& params) : params_(&params) {}

  // Forward ops. Dimension mismatches throw NumericError/ConfigError.
  NodeId constant(Vec v);
  NodeId constant_scalar(double x);
  /// y = W x + b with W: params[w_id] (m x n), b: params[b_id] (m).
  /// b_id < 0 means no bias term.
  NodeId affine(int w_id, int b_id, NodeId x);
  NodeId tanh(NodeId x);
  NodeId softplus(NodeId x);
  NodeId add(NodeId x, NodeId y);
  /// y = concat(x, tail); tail is constant and carries no gradient.
  NodeId append(NodeId x, const Vec& tail);
  /// Elementwise sum of equal-dimension vectors, pairwise tree order.
  NodeId sum(const std::vector<NodeId>& xs);
  /// k scalar nodes -> one k-vector.
  NodeId stack(const std::vector<NodeId>& xs);
  /// Vector -> scalar, pairwise tree order.
  NodeId sum_entries(NodeId x);
  /// Numerically stable softmax over the entries of one vector.
  NodeId softmax(NodeId x);
  NodeId dot(NodeId x, NodeId y);
  /// Scalar (x - target)^2.
  NodeId squared_error(NodeId x, double target);
  /// Mean of k scalar nodes.
  NodeId mean(const std::vector<NodeId>& xs);

  const Vec& value(NodeId n) const;
  double scalar(NodeId n) const;
  std::size_t size() const { return nodes_.size(); }

  /// Reverse pass from a scalar loss. Fills ParamStore gradients (replace
  /// semantics) and marks them valid. Throws NumericError on a non-scalar
  /// loss or on repeated backward without new forward work.
  void backward(NodeId loss);

  ParamStore& params() { return *params_; }

 private:
  enum class Op {
    kConst,
    kAffine,
    kTanh,
    kSoftplus,
    kAdd,
    kAppend,
    kSum,
    kStack,
    kSumEntries,
    kSoftmax,
    kDot,
    kSquaredError,
    kMean,
  };

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    std::vector<int> ins;  // n-ary ops
    int w_id = -1;         // affine weight tensor
    int b_id = -1;         // affine bias tensor
    double c = 0.0;        // squared_error target
    Vec value;
    Vec adj;
    bool needs_grad = false;
  };

  NodeId push(Node n);
  const Node& node(NodeId id) const;
  bool needs(NodeId id) const { return nodes_[static_cast<std::size_t>(id.v)].needs_grad; }

  ParamStore* params_;
  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

/// Deterministic pairwise tree sum of a contiguous range.
double tree_sum(const double* x, std::size_t n);

/// y_i = b_i + sum_j W(i,j) x_j, accumulated in ascending j (b null: no bias
/// term). Shared by the taped and plain forward paths so both produce
/// bit-identical values.
void affine_eval(const Tensor& w, const Tensor* b, const double* x, double* y);

}  // namespace mofgcn

#endif  // MOFGCN_TAPE_HPP
