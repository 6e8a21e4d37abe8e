// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/graph.hpp"

#include <cmath>
#include <set>
#include <unordered_set>

#include "mofgcn/errors.hpp"

namespace mofgcn {

AtomTypeVocab::AtomTypeVocab(std::vector<std::string> labels) : labels_(std::move(labels)) {
  std::unordered_set<std::string> seen;
  for (const std::string& l : labels_) {
    if (l.empty()) throw ConfigError("vocab: empty species label");
    if (!seen.insert(l).second) throw ConfigError("vocab: duplicate species label '" + l + "'");
  }
}

int AtomTypeVocab::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == label) return static_cast<int>(i);
  return -1;
}

const std::string& AtomTypeVocab::label(std::size_t index) const {
  if (index >= labels_.size())
    throw ConfigError("vocab: species index " + std::to_string(index) + " out of range");
  return labels_[index];
}

std::vector<Violation> validate(const AtomGraph& graph) {
  std::vector<Violation> out;
  const int n = static_cast<int>(graph.node_count());
  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const GraphEdge& edge = graph.edges[e];
    const std::string where = "edge " + std::to_string(e) + " (" +
                              std::to_string(edge.src) + "," + std::to_string(edge.dst) + ")";
    if (edge.src < 0 || edge.src >= n || edge.dst < 0 || edge.dst >= n) {
      out.push_back({"node index out of range", where});
      continue;
    }
    if (edge.src == edge.dst) out.push_back({"self edge", where});
    if (seen.count({edge.dst, edge.src}) != 0u)
      out.push_back({"reciprocal edge", where});
    if (!seen.insert({edge.src, edge.dst}).second)
      out.push_back({"duplicate edge", where});
    if (!(edge.distance > 0.0) || !std::isfinite(edge.distance))
      out.push_back({"nonpositive distance",
                     where + " distance=" + std::to_string(edge.distance)});
  }
  return out;
}

namespace {

double pair_distance(const Structure& s, std::size_t i, std::size_t j, bool periodic) {
  double d2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    double d = s.positions[i][k] - s.positions[j][k];
    if (periodic) {
      const double box = (*s.cell)[k];
      d -= box * std::round(d / box);
    }
    d2 += d * d;
  }
  return std::sqrt(d2);
}

}  // namespace

AtomGraph build_graph(const Structure& structure, double cutoff,
                      const AtomTypeVocab& vocab, bool periodic) {
  if (!(cutoff > 0.0)) throw ConfigError("build_graph: cutoff must be > 0");
  if (structure.positions.size() != structure.species.size())
    throw ConfigError("build_graph: species count " + std::to_string(structure.species.size()) +
                      " does not match position count " +
                      std::to_string(structure.positions.size()));
  if (periodic) {
    if (!structure.cell) throw ConfigError("build_graph: periodic requested but no cell given");
    for (double l : *structure.cell)
      if (!(l > 0.0)) throw ConfigError("build_graph: cell lengths must be > 0");
  }
  for (const auto& p : structure.positions)
    for (double v : p)
      if (!std::isfinite(v)) throw ConfigError("build_graph: non-finite atom position");

  AtomGraph graph;
  graph.node_types.reserve(structure.species.size());
  for (const std::string& sp : structure.species) {
    const int t = vocab.index_of(sp);
    if (t < 0) throw ConfigError("build_graph: species '" + sp + "' not in vocabulary");
    graph.node_types.push_back(t);
  }

  const std::size_t n = structure.positions.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double r = pair_distance(structure, i, j, periodic);
      if (r <= cutoff) {
        if (r == 0.0)
          throw ConfigError("build_graph: coincident atoms " + std::to_string(i) + " and " +
                            std::to_string(j));
        graph.edges.push_back({static_cast<int>(i), static_cast<int>(j), r});
      }
    }
  }
  return graph;
}

std::vector<IncidentEdge> incident_edges(const AtomGraph& graph, int n) {
  if (n < 0 || static_cast<std::size_t>(n) >= graph.node_count())
    throw ConfigError("incident_edges: node index " + std::to_string(n) + " out of range");
  std::vector<IncidentEdge> out;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const GraphEdge& edge = graph.edges[e];
    if (edge.src == n) out.push_back({e, edge.dst, edge.distance});
    else if (edge.dst == n) out.push_back({e, edge.src, edge.distance});
  }
  return out;
}

}  // namespace mofgcn
