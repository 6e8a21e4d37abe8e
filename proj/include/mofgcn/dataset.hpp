// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_DATASET_HPP
#define MOFGCN_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mofgcn/graph.hpp"

namespace mofgcn {

struct Sample {
  AtomGraph graph;
  double target = 0.0;
  std::string source;  // provenance, e.g. file name or generator tag
};

/// Labeled graphs sharing one species vocabulary.
struct Dataset {
  AtomTypeVocab vocab;
  std::vector<Sample> samples;
  std::string units = "dimensionless";

  std::size_t size() const { return samples.size(); }
};

/// JSON-lines graph format: header record with vocab and units, then one
/// record per graph holding node type labels, edge triples, and the target.
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Disjoint seeded-shuffle split. Fractions must sum to 1; any empty split
/// at the given sizes is an error.
SplitIndices split_dataset(const Dataset& dataset, double train_fraction, double val_fraction,
                           double test_fraction, std::uint64_t seed);

}  // namespace mofgcn

#endif  // MOFGCN_DATASET_HPP
