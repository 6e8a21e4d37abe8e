// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_XYZ_HPP
#define MOFGCN_XYZ_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "mofgcn/graph.hpp"

namespace mofgcn {

/// One extended-XYZ frame. The comment line may carry `energy=<float>` and
/// `cell="ax ay az"` key-value pairs; a cell entry is copied into the
/// structure for periodic graph construction.
struct XyzFrame {
  Structure structure;
  std::optional<double> energy;
  std::string comment;
};

/// Parses a single frame: line 1 atom count, line 2 comment, then
/// `species x y z` per atom. Malformed counts and non-numeric coordinates
/// raise ParseError with the offending line number. `origin` labels errors
/// (usually the file name).
XyzFrame parse_xyz(std::istream& in, const std::string& origin);

XyzFrame parse_xyz_file(const std::filesystem::path& path);

/// Writes one frame; energy (and cell, when present) go on the comment line.
void write_xyz_file(const std::filesystem::path& path, const Structure& structure,
                    std::optional<double> energy);

}  // namespace mofgcn

#endif  // MOFGCN_XYZ_HPP
