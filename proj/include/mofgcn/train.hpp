// SPDX-License-Identifier: Apache-2.0

#ifndef MOFGCN_TRAIN_HPP
#define MOFGCN_TRAIN_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mofgcn/dataset.hpp"
#include "mofgcn/model.hpp"

namespace mofgcn {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 42;
  double train_fraction = 0.8;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  std::size_t patience = 20;  // early-stop epochs without val improvement

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  bool is_best = false;
  double seconds = 0.0;  // wall clock; kept out of the history file
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;  // 1-based; the checkpoint reference
  double best_val_loss = 0.0;
};

/// Mean squared error over a batch. Empty batches are an error.
double mse_loss(std::span<const double> predictions, std::span<const double> targets);

struct FitResult {
  TargetNorm norm;
  TrainHistory history;
  SplitIndices splits;
};

/// Minibatch Adam on the MSE objective over standardized targets. The model
/// is left holding the best-validation parameters. Fully reproducible at a
/// fixed seed; diverging (non-finite) losses abort with epoch/batch context.
FitResult fit(EnergyModel& model, const Dataset& dataset, const TrainConfig& config);

/// Deterministic columns only (epoch, losses, best flag, best epoch) so two
/// identically seeded runs produce byte-identical files.
void write_history_csv(const TrainHistory& history, const std::filesystem::path& path);

struct EvalReport {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
  std::vector<double> bin_edges;     // histogram of prediction errors
  std::vector<std::size_t> counts;   // counts.size() + 1 == bin_edges.size()
  std::size_t n = 0;
  std::string units;
};

/// Metrics in original (denormalized) target units over the given sample
/// indices; histogram bin width defaults to one target unit.
EvalReport evaluate(const EnergyModel& model, const TargetNorm& norm, const Dataset& dataset,
                    std::span<const std::size_t> indices, double bin_width = 1.0,
                    unsigned threads = 1);

void write_eval_report(const EvalReport& report, const std::filesystem::path& json_path);
void write_histogram_csv(const EvalReport& report, const std::filesystem::path& csv_path);

}  // namespace mofgcn

#endif  // MOFGCN_TRAIN_HPP
