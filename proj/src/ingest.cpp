// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/ingest.hpp"

#include <algorithm>
#include <set>

#include "mofgcn/errors.hpp"
#include "mofgcn/xyz.hpp"

namespace mofgcn {

Dataset ingest_xyz_dir(const std::filesystem::path& dir, double cutoff,
                       const std::optional<std::vector<std::string>>& vocab_override,
                       const std::string& units, IngestReport* report) {
  if (!std::filesystem::is_directory(dir))
    throw ConfigError("ingest: not a directory: " + dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".xyz")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("ingest: no .xyz files in " + dir.string());

  IngestReport local;
  IngestReport& rep = report ? *report : local;

  struct Parsed {
    std::string name;
    XyzFrame frame;
  };
  std::vector<Parsed> frames;
  std::set<std::string> species_seen;
  for (const auto& path : files) {
    try {
      XyzFrame frame = parse_xyz_file(path);
      if (!frame.energy) {
        rep.skipped_files.emplace_back(path.filename().string(), "missing energy key");
        continue;
      }
      for (const std::string& sp : frame.structure.species) species_seen.insert(sp);
      frames.push_back({path.filename().string(), std::move(frame)});
    } catch (const ParseError& e) {
      rep.skipped_files.emplace_back(path.filename().string(), e.what());
    }
  }
  rep.skipped = rep.skipped_files.size();
  if (frames.empty())
    throw ConfigError("ingest: no parsable labeled structures in " + dir.string());

  Dataset ds;
  if (vocab_override)
    ds.vocab = AtomTypeVocab(*vocab_override);
  else
    ds.vocab = AtomTypeVocab({species_seen.begin(), species_seen.end()});
  ds.units = units;

  for (auto& [name, frame] : frames) {
    try {
      Sample s;
      s.graph = build_graph(frame.structure, cutoff, ds.vocab,
                            frame.structure.cell.has_value());
      s.target = *frame.energy;
      s.source = name;
      ds.samples.push_back(std::move(s));
    } catch (const ConfigError& e) {
      rep.skipped_files.emplace_back(name, e.what());
      ++rep.skipped;
    }
  }
  rep.parsed = ds.samples.size();
  if (ds.samples.empty())
    throw ConfigError("ingest: every structure failed graph construction in " + dir.string());
  return ds;
}

}  // namespace mofgcn
