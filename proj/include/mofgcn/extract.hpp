// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_EXTRACT_HPP
#define MOFGCN_EXTRACT_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mofgcn/model.hpp"

namespace mofgcn {

/// A learned pair interaction sampled on a distance grid, optionally paired
/// with an analytic reference. The learned values carry the checkpoint's
/// target scale so they live in target units; the additive constant remains
/// free until align_offset fits it.
struct PairCurve {
  std::string type_a;
  std::string type_b;
  Vec grid;     // ascending
  Vec learned;  // same length as grid
  std::optional<Vec> reference;
  std::optional<double> offset;        // fitted additive constant
  std::optional<double> residual_rms;  // after offset removal
};

Vec uniform_grid(double lo, double hi, std::size_t n = 512);

/// Samples the learned pair function on `grid`. Requires a decomposition
/// checkpoint (scalar conv output + sum pooling); attention checkpoints are
/// rejected. Read-only over the model.
PairCurve probe(const EnergyModel& model, const TargetNorm& norm, const std::string& type_a,
                const std::string& type_b, const Vec& grid);

/// Fits the L2-optimal additive constant against the reference
/// (c = mean(learned - reference)) and records the residual RMS of
/// (learned - c - reference). Requires a reference on the same grid.
PairCurve align_offset(PairCurve curve);

/// CSV with columns pair,r,learned,reference,aligned (12 significant
/// digits), rows sorted by (pair, r).
void export_curves(const std::vector<PairCurve>& curves, const std::filesystem::path& path);

/// JSON mirror of the same fields.
void export_curves_json(const std::vector<PairCurve>& curves,
                        const std::filesystem::path& path);

}  // namespace mofgcn

#endif  // MOFGCN_EXTRACT_HPP
