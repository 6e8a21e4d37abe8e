// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/synthetic.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "mofgcn/errors.hpp"
#include "mofgcn/rng.hpp"

namespace mofgcn {

double gaussian_energy(double r, double mu, double sigma, bool normalized) {
  if (!(sigma > 0.0)) throw ConfigError("gaussian_energy: sigma must be > 0");
  const double z = (r - mu) / sigma;
  const double e = std::exp(-0.5 * z * z);
  if (!normalized) return e;
  constexpr double kSqrt2Pi = 2.506628274631000502;
  return e / (sigma * kSqrt2Pi);
}

void SyntheticSpec::validate() const {
  if (n_graphs == 0) throw ConfigError("synthetic: n_graphs must be >= 1");
  if (node_types.size() < 2) throw ConfigError("synthetic: need at least 2 nodes");
  if (!(r_min > 0.0) || !(r_max > r_min))
    throw ConfigError("synthetic: distance range must satisfy 0 < r_min < r_max");
  for (const PairEntry& p : pair_params) {
    if (!(p.params.sigma > 0.0))
      throw ConfigError("synthetic: sigma must be > 0 for pair " + p.type_a + "-" + p.type_b);
    if (p.params.mu < r_min || p.params.mu > r_max)
      throw ConfigError("synthetic: mu=" + std::to_string(p.params.mu) + " for pair " +
                        p.type_a + "-" + p.type_b + " lies outside the distance range");
  }
  // every unordered pair of node types needs parameters
  for (std::size_t i = 0; i < node_types.size(); ++i)
    for (std::size_t j = i + 1; j < node_types.size(); ++j)
      if (find(node_types[i], node_types[j]) == nullptr)
        throw ConfigError("synthetic: no pair parameters for " + node_types[i] + "-" +
                          node_types[j]);
}

const PairParams* SyntheticSpec::find(const std::string& a, const std::string& b) const {
  for (const PairEntry& p : pair_params) {
    if ((p.type_a == a && p.type_b == b) || (p.type_a == b && p.type_b == a))
      return &p.params;
  }
  return nullptr;
}

Dataset generate(const SyntheticSpec& spec, unsigned threads) {
  spec.validate();

  // vocabulary from the distinct type labels, in first-appearance order
  std::vector<std::string> labels;
  for (const std::string& t : spec.node_types)
    if (std::find(labels.begin(), labels.end(), t) == labels.end()) labels.push_back(t);

  Dataset ds;
  ds.vocab = AtomTypeVocab(labels);
  ds.units = "dimensionless";
  ds.samples.resize(spec.n_graphs);

  const std::size_t n_nodes = spec.node_types.size();
  auto make_graph = [&](std::size_t g) {
    std::mt19937_64 rng(mix_seed(spec.seed, g));
    std::uniform_real_distribution<double> dist(spec.r_min, spec.r_max);
    Sample& s = ds.samples[g];
    s.graph.node_types.reserve(n_nodes);
    for (const std::string& t : spec.node_types)
      s.graph.node_types.push_back(ds.vocab.index_of(t));
    double target = 0.0;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      for (std::size_t j = i + 1; j < n_nodes; ++j) {
        const double r = dist(rng);
        s.graph.edges.push_back({static_cast<int>(i), static_cast<int>(j), r});
        const PairParams* p = spec.find(spec.node_types[i], spec.node_types[j]);
        target += gaussian_energy(r, p->mu, p->sigma, spec.normalized_pdf);
      }
    }
    s.target = target;
    s.source = "synthetic:" + std::to_string(g);
  };

  if (threads <= 1 || spec.n_graphs < 2 * threads) {
    for (std::size_t g = 0; g < spec.n_graphs; ++g) make_graph(g);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&]() {
        for (;;) {
          const std::size_t g = next.fetch_add(1);
          if (g >= spec.n_graphs) return;
          make_graph(g);
        }
      });
    }
    for (std::thread& th : pool) th.join();
  }
  return ds;
}

double oracle_total(const AtomGraph& graph, const AtomTypeVocab& vocab,
                    const SyntheticSpec& spec) {
  double total = 0.0;
  for (const GraphEdge& e : graph.edges) {
    const std::string& a = vocab.label(static_cast<std::size_t>(graph.node_types.at(
        static_cast<std::size_t>(e.src))));
    const std::string& b = vocab.label(static_cast<std::size_t>(graph.node_types.at(
        static_cast<std::size_t>(e.dst))));
    const PairParams* p = spec.find(a, b);
    if (p == nullptr)
      throw ConfigError("oracle_total: no pair parameters for " + a + "-" + b);
    total += gaussian_energy(e.distance, p->mu, p->sigma, spec.normalized_pdf);
  }
  return total;
}

}  // namespace mofgcn
