// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/param_store.hpp"

#include <numeric>

#include "mofgcn/errors.hpp"

namespace mofgcn {

int ParamStore::add(const std::string& name, std::vector<std::size_t> shape) {
  if (name.empty()) throw ConfigError("parameter name must be nonempty");
  if (index_.count(name) != 0u) throw ConfigError("duplicate parameter name: " + name);
  if (shape.empty()) throw ConfigError("parameter " + name + " has empty shape");
  std::size_t n = 1;
  for (std::size_t d : shape) {
    if (d == 0) throw ConfigError("parameter " + name + " has zero-sized dimension");
    n *= d;
  }
  Tensor t;
  t.shape = std::move(shape);
  t.data.assign(n, 0.0);
  t.grad.assign(n, 0.0);
  const int id = static_cast<int>(tensors_.size());
  tensors_.push_back(std::move(t));
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

int ParamStore::index_of(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

Tensor& ParamStore::at(int id) { return tensors_.at(static_cast<std::size_t>(id)); }

const Tensor& ParamStore::at(int id) const {
  return tensors_.at(static_cast<std::size_t>(id));
}

Tensor& ParamStore::at(const std::string& name) {
  const int id = index_of(name);
  if (id < 0) throw ConfigError("unknown parameter: " + name);
  return tensors_[static_cast<std::size_t>(id)];
}

const Tensor& ParamStore::at(const std::string& name) const {
  const int id = index_of(name);
  if (id < 0) throw ConfigError("unknown parameter: " + name);
  return tensors_[static_cast<std::size_t>(id)];
}

const std::string& ParamStore::name_of(int id) const {
  return names_.at(static_cast<std::size_t>(id));
}

std::size_t ParamStore::total_elements() const {
  std::size_t n = 0;
  for (const Tensor& t : tensors_) n += t.size();
  return n;
}

void ParamStore::zero_grad() {
  for (Tensor& t : tensors_) std::fill(t.grad.begin(), t.grad.end(), 0.0);
  grads_valid_ = false;
}

}  // namespace mofgcn
