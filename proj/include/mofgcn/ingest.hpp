// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_INGEST_HPP
#define MOFGCN_INGEST_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mofgcn/dataset.hpp"

namespace mofgcn {

struct IngestReport {
  std::size_t parsed = 0;
  std::size_t skipped = 0;
  std::vector<std::pair<std::string, std::string>> skipped_files;  // (file, reason)
};

/// Reads every *.xyz file under `dir` (lexicographic order), builds cutoff
/// graphs, and assembles a dataset with per-file provenance. Files that fail
/// to parse or lack an energy are skipped and reported; no parsable file at
/// all is an error. The vocabulary is the sorted set of species seen, unless
/// overridden.
Dataset ingest_xyz_dir(const std::filesystem::path& dir, double cutoff,
                       const std::optional<std::vector<std::string>>& vocab_override,
                       const std::string& units, IngestReport* report);

}  // namespace mofgcn

#endif  // MOFGCN_INGEST_HPP
