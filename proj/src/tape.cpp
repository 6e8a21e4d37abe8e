// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/tape.hpp"

#include <cmath>
#include <string>

#include "mofgcn/errors.hpp"

namespace mofgcn {

double tree_sum(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n == 1) return x[0];
  const std::size_t half = n / 2;
  return tree_sum(x, half) + tree_sum(x + half, n - half);
}

void affine_eval(const Tensor& w, const Tensor* b, const double* x, double* y) {
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  const double* wd = w.data.data();
  for (std::size_t i = 0; i < m; ++i) {
    double acc = b ? b->data[i] : 0.0;
    const double* row = wd + i * n;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

NodeId Tape::push(Node n) {
  backward_done_ = false;
  nodes_.push_back(std::move(n));
  return NodeId{static_cast<int>(nodes_.size()) - 1};
}

const Tape::Node& Tape::node(NodeId id) const {
  if (!id.valid() || static_cast<std::size_t>(id.v) >= nodes_.size())
    throw NumericError("tape: invalid node id");
  return nodes_[static_cast<std::size_t>(id.v)];
}

const Vec& Tape::value(NodeId n) const { return node(n).value; }

double Tape::scalar(NodeId n) const {
  const Vec& v = value(n);
  if (v.size() != 1)
    throw NumericError("tape: expected scalar node, got dimension " +
                       std::to_string(v.size()));
  return v[0];
}

NodeId Tape::constant(Vec v) {
  Node n;
  n.op = Op::kConst;
  n.value = std::move(v);
  return push(std::move(n));
}

NodeId Tape::constant_scalar(double x) { return constant(Vec{x}); }

NodeId Tape::affine(int w_id, int b_id, NodeId x) {
  const Tensor& w = params_->at(w_id);
  const Tensor* b = b_id < 0 ? nullptr : &params_->at(b_id);
  const Vec& xv = value(x);
  if (w.shape.size() != 2)
    throw NumericError("affine: weight " + params_->name_of(w_id) + " is not a matrix");
  if (w.cols() != xv.size())
    throw NumericError("affine: weight " + params_->name_of(w_id) + " has " +
                       std::to_string(w.cols()) + " columns but input has dimension " +
                       std::to_string(xv.size()));
  if (b && b->size() != w.rows())
    throw NumericError("affine: bias " + params_->name_of(b_id) + " has dimension " +
                       std::to_string(b->size()) + ", expected " + std::to_string(w.rows()));
  Node n;
  n.op = Op::kAffine;
  n.a = x.v;
  n.w_id = w_id;
  n.b_id = b_id;
  n.value.resize(w.rows());
  affine_eval(w, b, xv.data(), n.value.data());
  n.needs_grad = true;  // always differentiates into the parameters
  return push(std::move(n));
}

NodeId Tape::tanh(NodeId x) {
  Node n;
  n.op = Op::kTanh;
  n.a = x.v;
  const Vec& xv = value(x);
  n.value.resize(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) n.value[i] = std::tanh(xv[i]);
  n.needs_grad = needs(x);
  return push(std::move(n));
}

NodeId Tape::softplus(NodeId x) {
  Node n;
  n.op = Op::kSoftplus;
  n.a = x.v;
  const Vec& xv = value(x);
  n.value.resize(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const double v = xv[i];
    // log(1 + e^v) without overflow for large |v|
    n.value[i] = v > 0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
  }
  n.needs_grad = needs(x);
  return push(std::move(n));
}

NodeId Tape::add(NodeId x, NodeId y) {
  const Vec& xv = value(x);
  const Vec& yv = value(y);
  if (xv.size() != yv.size())
    throw NumericError("add: dimension mismatch " + std::to_string(xv.size()) + " vs " +
                       std::to_string(yv.size()));
  Node n;
  n.op = Op::kAdd;
  n.a = x.v;
  n.b = y.v;
  n.value.resize(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) n.value[i] = xv[i] + yv[i];
  n.needs_grad = needs(x) || needs(y);
  return push(std::move(n));
}

NodeId Tape::append(NodeId x, const Vec& tail) {
  const Vec& xv = value(x);
  Node n;
  n.op = Op::kAppend;
  n.a = x.v;
  n.value = xv;
  n.value.insert(n.value.end(), tail.begin(), tail.end());
  n.needs_grad = needs(x);
  return push(std::move(n));
}

NodeId Tape::sum(const std::vector<NodeId>& xs) {
  if (xs.empty()) throw NumericError("sum: empty input list");
  const std::size_t dim = value(xs[0]).size();
  Node n;
  n.op = Op::kSum;
  n.ins.reserve(xs.size());
  for (NodeId id : xs) {
    if (value(id).size() != dim)
      throw NumericError("sum: mixed dimensions " + std::to_string(dim) + " vs " +
                         std::to_string(value(id).size()));
    n.ins.push_back(id.v);
    n.needs_grad = n.needs_grad || needs(id);
  }
  n.value.resize(dim);
  // pairwise tree over the inputs, elementwise
  std::vector<const double*> ptrs(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) ptrs[k] = value(xs[k]).data();
  Vec scratch(xs.size());
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = 0; k < xs.size(); ++k) scratch[k] = ptrs[k][i];
    n.value[i] = tree_sum(scratch.data(), scratch.size());
  }
  return push(std::move(n));
}

NodeId Tape::stack(const std::vector<NodeId>& xs) {
  if (xs.empty()) throw NumericError("stack: empty input list");
  Node n;
  n.op = Op::kStack;
  n.value.resize(xs.size());
  n.ins.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const Vec& v = value(xs[k]);
    if (v.size() != 1)
      throw NumericError("stack: input " + std::to_string(k) + " is not scalar");
    n.value[k] = v[0];
    n.ins.push_back(xs[k].v);
    n.needs_grad = n.needs_grad || needs(xs[k]);
  }
  return push(std::move(n));
}

NodeId Tape::sum_entries(NodeId x) {
  const Vec& xv = value(x);
  Node n;
  n.op = Op::kSumEntries;
  n.a = x.v;
  n.value = {tree_sum(xv.data(), xv.size())};
  n.needs_grad = needs(x);
  return push(std::move(n));
}

NodeId Tape::softmax(NodeId x) {
  const Vec& xv = value(x);
  if (xv.empty()) throw NumericError("softmax: empty input");
  Node n;
  n.op = Op::kSoftmax;
  n.a = x.v;
  n.value.resize(xv.size());
  double mx = xv[0];
  for (double v : xv) mx = std::max(mx, v);
  double z = 0.0;
  for (std::size_t i = 0; i < xv.size(); ++i) {
    n.value[i] = std::exp(xv[i] - mx);
    z += n.value[i];
  }
  for (double& v : n.value) v /= z;
  n.needs_grad = needs(x);
  return push(std::move(n));
}

NodeId Tape::dot(NodeId x, NodeId y) {
  const Vec& xv = value(x);
  const Vec& yv = value(y);
  if (xv.size() != yv.size())
    throw NumericError("dot: dimension mismatch " + std::to_string(xv.size()) + " vs " +
                       std::to_string(yv.size()));
  Node n;
  n.op = Op::kDot;
  n.a = x.v;
  n.b = y.v;
  Vec prod(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) prod[i] = xv[i] * yv[i];
  n.value = {tree_sum(prod.data(), prod.size())};
  n.needs_grad = needs(x) || needs(y);
  return push(std::move(n));
}

NodeId Tape::squared_error(NodeId x, double target) {
  const double v = scalar(x);
  Node n;
  n.op = Op::kSquaredError;
  n.a = x.v;
  n.c = target;
  const double d = v - target;
  n.value = {d * d};
  n.needs_grad = needs(x);
  return push(std::move(n));
}

NodeId Tape::mean(const std::vector<NodeId>& xs) {
  if (xs.empty()) throw NumericError("mean: empty input list");
  Node n;
  n.op = Op::kMean;
  Vec vals(xs.size());
  n.ins.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    vals[k] = scalar(xs[k]);
    n.ins.push_back(xs[k].v);
    n.needs_grad = n.needs_grad || needs(xs[k]);
  }
  n.value = {tree_sum(vals.data(), vals.size()) / static_cast<double>(xs.size())};
  return push(std::move(n));
}

void Tape::backward(NodeId loss) {
  const Node& ln = node(loss);
  if (ln.value.size() != 1)
    throw NumericError("backward: loss must be scalar, got dimension " +
                       std::to_string(ln.value.size()));
  if (backward_done_)
    throw NumericError("backward: repeated backward without new forward work");

  params_->zero_grad();
  for (Node& n : nodes_) {
    if (n.needs_grad)
      n.adj.assign(n.value.size(), 0.0);
  }
  Node& root = nodes_[static_cast<std::size_t>(loss.v)];
  if (root.needs_grad) root.adj[0] = 1.0;

  for (std::size_t idx = static_cast<std::size_t>(loss.v) + 1; idx-- > 0;) {
    Node& n = nodes_[idx];
    if (!n.needs_grad) continue;
    switch (n.op) {
      case Op::kConst:
        break;
      case Op::kAffine: {
        Tensor& w = params_->at(n.w_id);
        Tensor* b = n.b_id < 0 ? nullptr : &params_->at(n.b_id);
        Node& xn = nodes_[static_cast<std::size_t>(n.a)];
        const Vec& xv = xn.value;
        const std::size_t m = w.rows();
        const std::size_t nc = w.cols();
        for (std::size_t i = 0; i < m; ++i) {
          const double a = n.adj[i];
          if (a == 0.0) continue;
          if (b) b->grad[i] += a;
          double* wg = w.grad.data() + i * nc;
          for (std::size_t j = 0; j < nc; ++j) wg[j] += a * xv[j];
        }
        if (xn.needs_grad) {
          for (std::size_t i = 0; i < m; ++i) {
            const double a = n.adj[i];
            if (a == 0.0) continue;
            const double* wr = w.data.data() + i * nc;
            for (std::size_t j = 0; j < nc; ++j) xn.adj[j] += a * wr[j];
          }
        }
        break;
      }
      case Op::kTanh: {
        Node& xn = nodes_[static_cast<std::size_t>(n.a)];
        if (!xn.needs_grad) break;
        for (std::size_t i = 0; i < n.value.size(); ++i)
          xn.adj[i] += n.adj[i] * (1.0 - n.value[i] * n.value[i]);
        break;
      }
      case Op::kSoftplus: {
        Node& xn = nodes_[static_cast<std::size_t>(n.a)];
        if (!xn.needs_grad) break;
        for (std::size_t i = 0; i < n.value.size(); ++i) {
          const double x = xn.value[i];
          const double sig = 1.0 / (1.0 + std::exp(-x));
          xn.adj[i] += n.adj[i] * sig;
        }
        break;
      }
      case Op::kAdd: {
        Node& xn = nodes_[static_cast<std::size_t>(n.a)];
        Node& yn = nodes_[static_cast<std::size_t>(n.b)];
        if (xn.needs_grad)
          for (std::size_t i = 0; i < n.value.size(); ++i) xn.adj[i] += n.adj[i];
        if (yn.needs_grad)
          for (std::size_t i = 0; i < n.value.size(); ++i) yn.adj[i] += n.adj[i];
        break;
      }
      case Op::kAppend: {
        Node& xn = nodes_[static_cast<std::size_t>(n.a)];
        if (!xn.needs_grad) break;
        for (std::size_t i = 0; i < xn.value.size(); ++i) xn.adj[i] += n.adj[i];
        break;
      }
      case Op::kSum: {
        for (int in : n.ins) {
          Node& xn = nodes_[static_cast<std::size_t>(in)];
          if (!xn.needs_grad) continue;
          for (std::size_t i = 0; i < n.value.size(); ++i) xn.adj[i] += n.adj[i];
        }
        break;
      }
      case Op::kStack: {
        for (std::size_t k = 0; k < n.ins.size(); ++k) {
          Node& xn = nodes_[static_cast<std::size_t>(n.ins[k])];
          if (xn.needs_grad) xn.adj[0] += n.adj[k];
        }
        break;
      }
      case Op::kSumEntries: {
        Node& xn = nodes_[static_cast<std::size_t>(n.a)];
        if (!xn.needs_grad) break;
        for (std::size_t i = 0; i < xn.value.size(); ++i) xn.adj[i] += n.adj[0];
        break;
      }
      case Op::kSoftmax: {
        Node& xn = nodes_[static_cast<std::size_t>(n.a)];
        if (!xn.needs_grad) break;
        double inner = 0.0;
        for (std::size_t i = 0; i < n.value.size(); ++i) inner += n.adj[i] * n.value[i];
        for (std::size_t i = 0; i < n.value.size(); ++i)
          xn.adj[i] += n.value[i] * (n.adj[i] - inner);
        break;
      }
      case Op::kDot: {
        Node& xn = nodes_[static_cast<std::size_t>(n.a)];
        Node& yn = nodes_[static_cast<std::size_t>(n.b)];
        const double a = n.adj[0];
        if (xn.needs_grad)
          for (std::size_t i = 0; i < xn.value.size(); ++i) xn.adj[i] += a * yn.value[i];
        if (yn.needs_grad)
          for (std::size_t i = 0; i < yn.value.size(); ++i) yn.adj[i] += a * xn.value[i];
        break;
      }
      case Op::kSquaredError: {
        Node& xn = nodes_[static_cast<std::size_t>(n.a)];
        if (xn.needs_grad) xn.adj[0] += n.adj[0] * 2.0 * (xn.value[0] - n.c);
        break;
      }
      case Op::kMean: {
        const double a = n.adj[0] / static_cast<double>(n.ins.size());
        for (int in : n.ins) {
          Node& xn = nodes_[static_cast<std::size_t>(in)];
          if (xn.needs_grad) xn.adj[0] += a;
        }
        break;
      }
    }
  }
  backward_done_ = true;
  params_->set_grads_valid(true);
}

}  // namespace mofgcn
