// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_PARAM_STORE_HPP
#define MOFGCN_PARAM_STORE_HPP

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace mofgcn {

using Vec = std::vector<double>;

/// Named parameter tensor. Every tensor owns a gradient buffer of the same
/// shape; shapes are fixed at creation.
struct Tensor {
  std::vector<std::size_t> shape;
  Vec data;
  Vec grad;

  std::size_t size() const { return data.size(); }
  std::size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  std::size_t cols() const { return shape.size() > 1 ? shape[1] : 1; }
};

/// Insertion-ordered collection of named parameter tensors. All values are
/// 64-bit floats. A store is mutated only by its owning training loop;
/// frozen stores are safe to read concurrently.
class ParamStore {
 public:
  /// Creates a zero-initialized tensor. Throws on duplicate name or empty shape.
  int add(const std::string& name, std::vector<std::size_t> shape);

  int index_of(const std::string& name) const;  // -1 if absent
  bool contains(const std::string& name) const { return index_of(name) >= 0; }

  Tensor& at(int id);
  const Tensor& at(int id) const;
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  const std::string& name_of(int id) const;

  std::size_t count() const { return tensors_.size(); }
  std::size_t total_elements() const;

  void zero_grad();

  /// Set by backward(), cleared by the optimizer step.
  bool grads_valid() const { return grads_valid_; }
  void set_grads_valid(bool v) { grads_valid_ = v; }

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
  std::unordered_map<std::string, int> index_;
  bool grads_valid_ = false;
};

}  // namespace mofgcn

#endif  // MOFGCN_PARAM_STORE_HPP
