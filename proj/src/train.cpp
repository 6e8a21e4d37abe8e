// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/train.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <thread>

#include <json.hpp>

#include "mofgcn/adam.hpp"
#include "mofgcn/errors.hpp"
#include "mofgcn/rng.hpp"

namespace mofgcn {

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("train: epochs must be >= 1");
  if (batch_size == 0) throw ConfigError("train: batch_size must be >= 1");
  if (learning_rate < 0) throw ConfigError("train: learning_rate must be >= 0");
  for (double f : {train_fraction, val_fraction, test_fraction})
    if (!(f > 0.0)) throw ConfigError("train: split fractions must be positive");
  if (std::fabs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9)
    throw ConfigError("train: split fractions must sum to 1");
}

double mse_loss(std::span<const double> predictions, std::span<const double> targets) {
  if (predictions.empty()) throw ConfigError("mse_loss: empty batch");
  if (predictions.size() != targets.size())
    throw ConfigError("mse_loss: " + std::to_string(predictions.size()) +
                      " predictions vs " + std::to_string(targets.size()) + " targets");
  Vec sq(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    sq[i] = d * d;
  }
  return tree_sum(sq.data(), sq.size()) / static_cast<double>(sq.size());
}

namespace {

TargetNorm compute_norm(const Dataset& dataset, std::span<const std::size_t> train_idx) {
  Vec targets(train_idx.size());
  for (std::size_t k = 0; k < train_idx.size(); ++k)
    targets[k] = dataset.samples[train_idx[k]].target;
  const double mean =
      tree_sum(targets.data(), targets.size()) / static_cast<double>(targets.size());
  Vec sq(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double d = targets[k] - mean;
    sq[k] = d * d;
  }
  const double var = tree_sum(sq.data(), sq.size()) / static_cast<double>(sq.size());
  TargetNorm norm;
  norm.mean = mean;
  norm.std_dev = std::max(std::sqrt(var), 1e-12);
  return norm;
}

double eval_split_loss(const EnergyModel& model, const Dataset& dataset,
                       std::span<const std::size_t> indices, const TargetNorm& norm) {
  Vec preds(indices.size());
  Vec targets(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    preds[k] = model.predict(dataset.samples[indices[k]].graph);
    targets[k] = norm.normalize(dataset.samples[indices[k]].target);
  }
  return mse_loss(preds, targets);
}

std::vector<Vec> snapshot_params(const ParamStore& store) {
  std::vector<Vec> out(store.count());
  for (std::size_t i = 0; i < store.count(); ++i) out[i] = store.at(static_cast<int>(i)).data;
  return out;
}

void restore_params(ParamStore& store, const std::vector<Vec>& snapshot) {
  for (std::size_t i = 0; i < snapshot.size(); ++i)
    store.at(static_cast<int>(i)).data = snapshot[i];
}

}  // namespace

FitResult fit(EnergyModel& model, const Dataset& dataset, const TrainConfig& config) {
  config.validate();
  if (dataset.samples.empty()) throw ConfigError("fit: dataset is empty");

  FitResult result;
  result.splits = split_dataset(dataset, config.train_fraction, config.val_fraction,
                                config.test_fraction, config.seed);
  result.norm = compute_norm(dataset, result.splits.train);

  AdamConfig adam_config;
  adam_config.learning_rate = config.learning_rate;
  const bool frozen = config.learning_rate == 0.0;  // lr 0: record history, no updates
  std::optional<AdamState> adam;
  if (!frozen) adam.emplace(model.params(), adam_config);

  std::mt19937_64 shuffle_rng(mix_seed(config.seed, 1));

  std::vector<std::size_t> order(result.splits.train.begin(), result.splits.train.end());
  std::vector<Vec> best_params = snapshot_params(model.params());
  result.history.best_val_loss = std::numeric_limits<double>::infinity();
  std::size_t epochs_without_improvement = 0;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    Vec batch_losses;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(start + config.batch_size, order.size());
      Tape tape(model.params());
      std::vector<NodeId> errors;
      errors.reserve(end - start);
      for (std::size_t k = start; k < end; ++k) {
        const Sample& s = dataset.samples[order[k]];
        const NodeId pred = model.forward(tape, s.graph);
        errors.push_back(tape.squared_error(pred, result.norm.normalize(s.target)));
      }
      const NodeId loss = tape.mean(errors);
      const double loss_value = tape.scalar(loss);
      if (!std::isfinite(loss_value))
        throw NumericError("fit: non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(start / config.batch_size));
      batch_losses.push_back(loss_value);
      tape.backward(loss);
      if (frozen)
        model.params().zero_grad();
      else
        adam->step(model.params());
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss =
        tree_sum(batch_losses.data(), batch_losses.size()) /
        static_cast<double>(batch_losses.size());
    rec.val_loss = eval_split_loss(model, dataset, result.splits.val, result.norm);
    if (!std::isfinite(rec.val_loss))
      throw NumericError("fit: non-finite validation loss at epoch " + std::to_string(epoch));

    if (rec.val_loss < result.history.best_val_loss) {
      result.history.best_val_loss = rec.val_loss;
      result.history.best_epoch = epoch;
      best_params = snapshot_params(model.params());
      rec.is_best = true;
      epochs_without_improvement = 0;
    } else {
      ++epochs_without_improvement;
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.history.epochs.push_back(rec);

    if (epochs_without_improvement >= config.patience) break;
  }

  restore_params(model.params(), best_params);
  return result;
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write history: " + path.string());
  out << "epoch,train_loss,val_loss,is_best\n";
  char buf[64];
  for (const EpochRecord& r : history.epochs) {
    out << r.epoch << ",";
    std::snprintf(buf, sizeof buf, "%.17g", r.train_loss);
    out << buf << ",";
    std::snprintf(buf, sizeof buf, "%.17g", r.val_loss);
    out << buf << "," << (r.is_best ? 1 : 0) << "\n";
  }
  out << "# best_epoch=" << history.best_epoch << "\n";
  if (!out) throw ConfigError("history write failed: " + path.string());
}

namespace {

void predict_indices(const EnergyModel& model, const Dataset& dataset,
                     std::span<const std::size_t> indices, unsigned threads, Vec& preds) {
  preds.resize(indices.size());
  if (threads <= 1 || indices.size() < 2 * threads) {
    for (std::size_t k = 0; k < indices.size(); ++k)
      preds[k] = model.predict(dataset.samples[indices[k]].graph);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  std::atomic<std::size_t> next{0};
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= indices.size()) return;
        preds[k] = model.predict(dataset.samples[indices[k]].graph);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace

EvalReport evaluate(const EnergyModel& model, const TargetNorm& norm, const Dataset& dataset,
                    std::span<const std::size_t> indices, double bin_width, unsigned threads) {
  if (indices.empty()) throw ConfigError("evaluate: empty split");
  if (!(bin_width > 0)) throw ConfigError("evaluate: bin width must be > 0");

  Vec raw;
  predict_indices(model, dataset, indices, threads, raw);

  Vec preds(indices.size());
  Vec targets(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    preds[k] = norm.denormalize(raw[k]);
    targets[k] = dataset.samples[indices[k]].target;
  }

  EvalReport rep;
  rep.n = indices.size();
  rep.units = dataset.units;
  rep.mse = mse_loss(preds, targets);
  rep.rmse = std::sqrt(rep.mse);

  Vec abs_err(indices.size());
  double max_abs = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    abs_err[k] = std::fabs(preds[k] - targets[k]);
    max_abs = std::max(max_abs, abs_err[k]);
  }
  rep.mae = tree_sum(abs_err.data(), abs_err.size()) / static_cast<double>(abs_err.size());

  const double target_mean =
      tree_sum(targets.data(), targets.size()) / static_cast<double>(targets.size());
  Vec sq_tot(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double d = targets[k] - target_mean;
    sq_tot[k] = d * d;
  }
  const double ss_tot = tree_sum(sq_tot.data(), sq_tot.size());
  const double ss_res = rep.mse * static_cast<double>(rep.n);
  rep.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);

  // error histogram over +-(max|error| rounded up to a bin multiple)
  const double limit =
      std::max(bin_width, std::ceil(max_abs / bin_width) * bin_width);
  const auto half_bins = static_cast<std::size_t>(std::lround(limit / bin_width));
  const std::size_t n_bins = 2 * half_bins;
  rep.bin_edges.resize(n_bins + 1);
  for (std::size_t b = 0; b <= n_bins; ++b)
    rep.bin_edges[b] = -limit + static_cast<double>(b) * bin_width;
  rep.counts.assign(n_bins, 0);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double err = preds[k] - targets[k];
    auto bin = static_cast<std::ptrdiff_t>(std::floor((err + limit) / bin_width));
    bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(n_bins) - 1);
    ++rep.counts[static_cast<std::size_t>(bin)];
  }
  return rep;
}

void write_eval_report(const EvalReport& report, const std::filesystem::path& json_path) {
  nlohmann::json j;
  j["n"] = report.n;
  j["units"] = report.units;
  j["mse"] = report.mse;
  j["rmse"] = report.rmse;
  j["mae"] = report.mae;
  j["r2"] = report.r2;
  j["histogram"] = {{"bin_edges", report.bin_edges}, {"counts", report.counts}};
  std::ofstream out(json_path);
  if (!out) throw ConfigError("cannot write eval report: " + json_path.string());
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("eval report write failed: " + json_path.string());
}

void write_histogram_csv(const EvalReport& report, const std::filesystem::path& csv_path) {
  std::ofstream out(csv_path);
  if (!out) throw ConfigError("cannot write histogram: " + csv_path.string());
  out << "bin_low,bin_high,count\n";
  char buf[64];
  for (std::size_t b = 0; b < report.counts.size(); ++b) {
    std::snprintf(buf, sizeof buf, "%.12g", report.bin_edges[b]);
    out << buf << ",";
    std::snprintf(buf, sizeof buf, "%.12g", report.bin_edges[b + 1]);
    out << buf << "," << report.counts[b] << "\n";
  }
  if (!out) throw ConfigError("histogram write failed: " + csv_path.string());
}

}  // namespace mofgcn
