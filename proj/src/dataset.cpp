// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <json.hpp>

#include "mofgcn/errors.hpp"

namespace mofgcn {

using nlohmann::json;

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write dataset: " + path.string());
  json header;
  header["format"] = "mofgcn-dataset";
  header["version"] = 1;
  header["vocab"] = dataset.vocab.labels();
  header["units"] = dataset.units;
  header["count"] = dataset.samples.size();
  out << header.dump() << "\n";
  for (const Sample& s : dataset.samples) {
    json rec;
    json nodes = json::array();
    for (int t : s.graph.node_types)
      nodes.push_back(dataset.vocab.label(static_cast<std::size_t>(t)));
    rec["nodes"] = std::move(nodes);
    json edges = json::array();
    for (const GraphEdge& e : s.graph.edges)
      edges.push_back(json::array({e.src, e.dst, e.distance}));
    rec["edges"] = std::move(edges);
    rec["target"] = s.target;
    if (!s.source.empty()) rec["source"] = s.source;
    out << rec.dump() << "\n";
  }
  if (!out) throw ConfigError("dataset write failed: " + path.string());
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset: " + path.string());
  std::string line;
  std::size_t line_no = 0;

  auto parse_line = [&](const std::string& text) {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw ParseError(path.string(), line_no, std::string("bad JSON record: ") + e.what());
    }
  };

  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty dataset file");
  ++line_no;
  const json header = parse_line(line);
  if (header.value("format", "") != "mofgcn-dataset")
    throw ParseError(path.string(), 1, "missing mofgcn-dataset header record");

  Dataset ds;
  ds.vocab = AtomTypeVocab(header.at("vocab").get<std::vector<std::string>>());
  ds.units = header.value("units", "dimensionless");

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json rec = parse_line(line);
    Sample s;
    for (const auto& label : rec.at("nodes")) {
      const int t = ds.vocab.index_of(label.get<std::string>());
      if (t < 0)
        throw ParseError(path.string(), line_no,
                         "species '" + label.get<std::string>() + "' not in header vocab");
      s.graph.node_types.push_back(t);
    }
    for (const auto& e : rec.at("edges")) {
      if (!e.is_array() || e.size() != 3)
        throw ParseError(path.string(), line_no, "edge record must be [src, dst, distance]");
      s.graph.edges.push_back(
          {e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
    }
    s.target = rec.at("target").get<double>();
    if (!std::isfinite(s.target))
      throw ParseError(path.string(), line_no, "non-finite target");
    s.source = rec.value("source", "");
    const auto violations = validate(s.graph);
    if (!violations.empty())
      throw ParseError(path.string(), line_no,
                       "invalid graph: " + violations.front().rule + " at " +
                           violations.front().detail);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

SplitIndices split_dataset(const Dataset& dataset, double train_fraction, double val_fraction,
                           double test_fraction, std::uint64_t seed) {
  if (dataset.samples.empty()) throw ConfigError("split: dataset is empty");
  for (double f : {train_fraction, val_fraction, test_fraction})
    if (!(f > 0.0)) throw ConfigError("split: fractions must be positive");
  if (std::fabs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9)
    throw ConfigError("split: fractions must sum to 1");

  const std::size_t n = dataset.samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_train = static_cast<std::size_t>(train_fraction * static_cast<double>(n));
  const auto n_val = static_cast<std::size_t>(val_fraction * static_cast<double>(n));
  if (n_train == 0 || n_val == 0 || n_train + n_val >= n)
    throw ConfigError("split: a split is empty at the given fractions (n=" +
                      std::to_string(n) + ")");

  SplitIndices s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
               order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return s;
}

}  // namespace mofgcn
