// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_GRAPH_HPP
#define MOFGCN_GRAPH_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace mofgcn {

/// Ordered species vocabulary; index = one-hot position. The order is fixed
/// for the lifetime of a trained model.
class AtomTypeVocab {
 public:
  AtomTypeVocab() = default;
  explicit AtomTypeVocab(std::vector<std::string> labels);

  int index_of(const std::string& label) const;  // -1 if absent
  const std::string& label(std::size_t index) const;
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
};

struct GraphEdge {
  int src = 0;
  int dst = 0;
  double distance = 0.0;
};

/// Directed distance-labeled atomic graph. Invariants: no self-edges, no
/// reciprocal edges (storing (i,j) forbids (j,i)), distances finite and
/// positive, node indices in range. Immutable by convention once built;
/// safe to share across concurrent readers.
struct AtomGraph {
  std::vector<int> node_types;  // indices into an AtomTypeVocab
  std::vector<GraphEdge> edges;

  std::size_t node_count() const { return node_types.size(); }
};

struct Violation {
  std::string rule;    // e.g. "reciprocal edge"
  std::string detail;  // offending indices / values
};

/// Checks every AtomGraph invariant; returns one entry per violation.
/// Never throws.
std::vector<Violation> validate(const AtomGraph& graph);

/// Raw atomic structure: positions in Angstrom, optional orthorhombic cell
/// lengths for periodic wrapping.
struct Structure {
  std::vector<std::array<double, 3>> positions;
  std::vector<std::string> species;
  std::optional<std::array<double, 3>> cell;
};

/// Builds the cutoff graph: edge (i,j) with i < j exists iff the pairwise
/// distance (minimum-image if periodic) is <= cutoff. The i < j orientation
/// enforces the no-reciprocal-edge invariant constructively.
AtomGraph build_graph(const Structure& structure, double cutoff,
                      const AtomTypeVocab& vocab, bool periodic);

struct IncidentEdge {
  std::size_t edge_index;
  int other;
  double distance;
};

/// Every stored edge touching node n, regardless of stored direction.
std::vector<IncidentEdge> incident_edges(const AtomGraph& graph, int n);

}  // namespace mofgcn

#endif  // MOFGCN_GRAPH_HPP
