// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/extract.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "mofgcn/errors.hpp"
#include "mofgcn/tape.hpp"

namespace mofgcn {

Vec uniform_grid(double lo, double hi, std::size_t n) {
  if (!(hi > lo)) throw ConfigError("grid: need lo < hi");
  if (n < 2) throw ConfigError("grid: need at least 2 points");
  Vec grid(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + step * static_cast<double>(i);
  grid.back() = hi;
  return grid;
}

PairCurve probe(const EnergyModel& model, const TargetNorm& norm, const std::string& type_a,
                const std::string& type_b, const Vec& grid) {
  if (!model.config().decomposition_mode())
    throw ConfigError(
        "probe: checkpoint is in " + to_string(model.config().pooling) +
        " mode with conv output_dim " + std::to_string(model.config().conv.output_dim) +
        "; function extraction requires the decomposition mode (sum pooling, scalar output)");
  if (grid.empty()) throw ConfigError("probe: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw ConfigError("probe: grid must be strictly ascending");

  PairCurve curve;
  curve.type_a = type_a;
  curve.type_b = type_b;
  curve.grid = grid;
  curve.learned.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec msg = model.pair_message(type_a, type_b, grid[i]);
    curve.learned[i] = msg[0] * norm.std_dev;  // into target units; offset stays free
  }
  return curve;
}

PairCurve align_offset(PairCurve curve) {
  if (!curve.reference) throw ConfigError("align_offset: curve has no reference values");
  if (curve.reference->size() != curve.grid.size() ||
      curve.learned.size() != curve.grid.size())
    throw ConfigError("align_offset: grid/value length mismatch (grid " +
                      std::to_string(curve.grid.size()) + ", learned " +
                      std::to_string(curve.learned.size()) + ", reference " +
                      std::to_string(curve.reference->size()) + ")");

  const Vec& ref = *curve.reference;
  const std::size_t n = curve.grid.size();
  Vec diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = curve.learned[i] - ref[i];
  const double c = tree_sum(diff.data(), n) / static_cast<double>(n);
  Vec sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = diff[i] - c;
    sq[i] = d * d;
  }
  curve.offset = c;
  curve.residual_rms = std::sqrt(tree_sum(sq.data(), n) / static_cast<double>(n));
  return curve;
}

namespace {

std::string pair_label(const PairCurve& c) { return c.type_a + "-" + c.type_b; }

std::vector<std::size_t> sorted_curve_order(const std::vector<PairCurve>& curves) {
  std::vector<std::size_t> order(curves.size());
  for (std::size_t i = 0; i < curves.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pair_label(curves[a]) < pair_label(curves[b]);
  });
  return order;
}

void check_curve(const PairCurve& c) {
  if (c.grid.size() != c.learned.size())
    throw ConfigError("export: curve " + pair_label(c) + " has mismatched lengths");
  if (c.reference && c.reference->size() != c.grid.size())
    throw ConfigError("export: curve " + pair_label(c) + " reference length mismatch");
}

}  // namespace

void export_curves(const std::vector<PairCurve>& curves, const std::filesystem::path& path) {
  if (curves.empty()) throw ConfigError("export: no curves to write");
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write curves: " + path.string());
  out << "pair,r,learned,reference,aligned\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  for (std::size_t idx : sorted_curve_order(curves)) {
    const PairCurve& c = curves[idx];
    check_curve(c);
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      out << pair_label(c) << "," << num(c.grid[i]) << "," << num(c.learned[i]) << ",";
      if (c.reference) out << num((*c.reference)[i]);
      out << ",";
      if (c.offset) out << num(c.learned[i] - *c.offset);
      out << "\n";
    }
  }
  if (!out) throw ConfigError("curve write failed: " + path.string());
}

void export_curves_json(const std::vector<PairCurve>& curves,
                        const std::filesystem::path& path) {
  if (curves.empty()) throw ConfigError("export: no curves to write");
  nlohmann::json j = nlohmann::json::array();
  for (std::size_t idx : sorted_curve_order(curves)) {
    const PairCurve& c = curves[idx];
    check_curve(c);
    nlohmann::json rec;
    rec["pair"] = pair_label(c);
    rec["r"] = c.grid;
    rec["learned"] = c.learned;
    if (c.reference) rec["reference"] = *c.reference;
    if (c.offset) rec["offset"] = *c.offset;
    if (c.residual_rms) rec["residual_rms"] = *c.residual_rms;
    j.push_back(std::move(rec));
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write curves: " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("curve write failed: " + path.string());
}

}  // namespace mofgcn
