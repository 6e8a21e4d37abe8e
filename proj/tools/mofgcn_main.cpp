// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mofgcn/errors.hpp"
#include "mofgcn/extract.hpp"
#include "mofgcn/gradcheck.hpp"
#include "mofgcn/ingest.hpp"
#include "mofgcn/rng.hpp"
#include "mofgcn/run_config.hpp"
#include "mofgcn/synthetic.hpp"
#include "mofgcn/train.hpp"
#include "mofgcn/xyz.hpp"

namespace fs = std::filesystem;
using namespace mofgcn;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "key = value run configuration file");
  cmd->add_option("--seed", opts.seed, "root seed for all randomness (default 42)");
  cmd->add_option("--out", opts.out_dir, "artifact output directory (default ./out)");
  cmd->add_option("--threads", opts.threads, "worker threads, default 1 for reproducibility");
}

RunConfig load_config(const CommonOpts& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) cfg = RunConfig::from_file(opts.config_path);
  return cfg;
}

fs::path prepare_out_dir(const CommonOpts& opts) {
  fs::path out(opts.out_dir);
  fs::create_directories(out);
  return out;
}

SyntheticSpec synthetic_from_config(const RunConfig& cfg, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.seed = seed;
  spec.n_graphs = cfg.get_size("synthetic.n_graphs", spec.n_graphs);
  const auto types = cfg.get_list("synthetic.node_types");
  if (!types.empty()) spec.node_types = types;
  spec.r_min = cfg.get_double("synthetic.r_min", spec.r_min);
  spec.r_max = cfg.get_double("synthetic.r_max", spec.r_max);
  spec.normalized_pdf = cfg.get_bool("synthetic.normalized_pdf", spec.normalized_pdf);
  const auto pairs = cfg.get_list("synthetic.pairs");
  if (!pairs.empty()) {
    spec.pair_params.clear();
    for (const std::string& entry : pairs) {
      // form: A-B:mu:sigma
      const auto dash = entry.find('-');
      const auto c1 = entry.find(':');
      const auto c2 = entry.find(':', c1 + 1);
      if (dash == std::string::npos || c1 == std::string::npos || c2 == std::string::npos ||
          dash > c1)
        throw ConfigError("synthetic.pairs entry '" + entry + "' must look like A-B:0.6:0.1");
      SyntheticSpec::PairEntry pe;
      pe.type_a = entry.substr(0, dash);
      pe.type_b = entry.substr(dash + 1, c1 - dash - 1);
      try {
        pe.params.mu = std::stod(entry.substr(c1 + 1, c2 - c1 - 1));
        pe.params.sigma = std::stod(entry.substr(c2 + 1));
      } catch (const std::exception&) {
        throw ConfigError("synthetic.pairs entry '" + entry + "' has non-numeric mu/sigma");
      }
      spec.pair_params.push_back(std::move(pe));
    }
  }
  return spec;
}

ModelConfig model_from_config(const RunConfig& cfg, std::vector<std::string> vocab_labels) {
  ModelConfig mc;
  mc.vocab_labels = std::move(vocab_labels);
  mc.pooling = pooling_from_string(cfg.get_string("model.pooling", "sum"));
  const std::size_t default_out = mc.pooling == Pooling::kSum ? 1 : 16;
  mc.conv.output_dim = cfg.get_size("model.conv_output_dim", default_out);
  mc.conv.hidden_dims = cfg.get_size_list("model.conv_hidden", {64, 64});
  mc.conv.activation = activation_from_string(cfg.get_string("model.activation", "tanh"));
  mc.conv.accumulation =
      accumulation_from_string(cfg.get_string("model.accumulation", "edge-once"));
  mc.conv.distance.rbf = cfg.get_bool("model.rbf", false);
  mc.conv.distance.rbf_count = cfg.get_size("model.rbf_count", 16);
  mc.conv.distance.r_min = cfg.get_double("model.rbf_r_min", 0.01);
  mc.conv.distance.r_max = cfg.get_double("model.rbf_r_max", 1.0);
  mc.attention.gate_hidden = cfg.get_size_list("model.gate_hidden", {64});
  mc.attention.value_hidden = cfg.get_size_list("model.value_hidden", {64});
  return mc;
}

TrainConfig train_from_config(const RunConfig& cfg, std::uint64_t seed) {
  TrainConfig tc;
  tc.seed = seed;
  tc.epochs = cfg.get_size("train.epochs", tc.epochs);
  tc.batch_size = cfg.get_size("train.batch_size", tc.batch_size);
  tc.learning_rate = cfg.get_double("train.learning_rate", tc.learning_rate);
  tc.train_fraction = cfg.get_double("train.train_fraction", tc.train_fraction);
  tc.val_fraction = cfg.get_double("train.val_fraction", tc.val_fraction);
  tc.test_fraction = cfg.get_double("train.test_fraction", tc.test_fraction);
  tc.patience = cfg.get_size("train.patience", tc.patience);
  return tc;
}

double mean_of(const Vec& v) { return tree_sum(v.data(), v.size()) / static_cast<double>(v.size()); }

int cmd_gen_synthetic(const CommonOpts& opts, const std::string& format,
                      const std::vector<std::string>& argv_tail) {
  const RunConfig cfg = load_config(opts);
  const SyntheticSpec spec = synthetic_from_config(cfg, opts.seed);
  spec.validate();
  const fs::path out = prepare_out_dir(opts);
  write_manifest(out, "gen-synthetic", opts.seed, opts.config_path, cfg, argv_tail);

  Dataset ds = generate(spec, opts.threads);
  if (format == "xyz") {
    // 1D realization: chain positions along x, pair distances re-derived
    // from the collinear geometry, targets recomputed with the oracle.
    const fs::path xyz_dir = out / "xyz";
    fs::create_directories(xyz_dir);
    double chain_reach = 0.0;
    for (std::size_t gi = 0; gi < ds.samples.size(); ++gi) {
      Sample& s = ds.samples[gi];
      Structure st;
      st.species.reserve(s.graph.node_count());
      for (int t : s.graph.node_types)
        st.species.push_back(ds.vocab.label(static_cast<std::size_t>(t)));
      double x = 0.0;
      st.positions.push_back({0.0, 0.0, 0.0});
      for (std::size_t i = 1; i < s.graph.node_count(); ++i) {
        // consecutive-pair distances set the chain; other pairs follow
        for (const GraphEdge& e : s.graph.edges) {
          if (e.src == static_cast<int>(i - 1) && e.dst == static_cast<int>(i)) {
            x += e.distance;
            break;
          }
        }
        st.positions.push_back({x, 0.0, 0.0});
      }
      chain_reach = std::max(chain_reach, x);
      const double cutoff = x + 1.0;
      s.graph = build_graph(st, cutoff, ds.vocab, false);
      s.target = oracle_total(s.graph, ds.vocab, spec);
      char name[64];
      std::snprintf(name, sizeof name, "graph_%06zu.xyz", gi);
      write_xyz_file(xyz_dir / name, st, s.target);
    }
    std::cout << "wrote " << ds.samples.size() << " collinear structures to " << (out / "xyz")
              << " (ingest cutoff >= " << chain_reach << " reconstructs all pairs)\n";
  }
  const fs::path data_path = out / "dataset.jsonl";
  save_dataset(ds, data_path);

  Vec targets(ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) targets[i] = ds.samples[i].target;
  const double mean = mean_of(targets);
  Vec sq(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) sq[i] = (targets[i] - mean) * (targets[i] - mean);
  const double sd = std::sqrt(mean_of(sq));
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu graphs -> %s (target mean %.6g, std %.6g)",
                ds.samples.size(), data_path.string().c_str(), mean, sd);
  std::cout << buf << "\n";
  return 0;
}

int cmd_ingest(const CommonOpts& opts, const std::string& xyz_dir, double cutoff_flag,
               const std::vector<std::string>& argv_tail) {
  const RunConfig cfg = load_config(opts);
  const double cutoff = cutoff_flag > 0 ? cutoff_flag : cfg.get_double("graph.cutoff", 5.0);
  const std::string units = cfg.get_string("units", "dimensionless");
  const fs::path out = prepare_out_dir(opts);
  write_manifest(out, "ingest", opts.seed, opts.config_path, cfg, argv_tail);

  IngestReport report;
  std::optional<std::vector<std::string>> vocab_override;
  const auto vocab_list = cfg.get_list("graph.vocab");
  if (!vocab_list.empty()) vocab_override = vocab_list;
  Dataset ds = ingest_xyz_dir(xyz_dir, cutoff, vocab_override, units, &report);
  const fs::path data_path = out / "dataset.jsonl";
  save_dataset(ds, data_path);

  std::cout << "ingested " << report.parsed << " structures (cutoff " << cutoff << ") -> "
            << data_path << "\n";
  if (report.skipped > 0) {
    std::cout << "skipped " << report.skipped << " files:\n";
    for (const auto& [file, reason] : report.skipped_files)
      std::cout << "  " << file << ": " << reason << "\n";
  }
  return 0;
}

int cmd_train(const CommonOpts& opts, const std::string& dataset_path,
              const std::vector<std::string>& argv_tail) {
  const RunConfig cfg = load_config(opts);
  const fs::path out = prepare_out_dir(opts);
  write_manifest(out, "train", opts.seed, opts.config_path, cfg, argv_tail);

  const Dataset ds = load_dataset(dataset_path);
  const ModelConfig mc = model_from_config(cfg, ds.vocab.labels());
  const TrainConfig tc = train_from_config(cfg, opts.seed);

  EnergyModel model = EnergyModel::create(mc, mix_seed(opts.seed, 2));
  const auto t0 = std::chrono::steady_clock::now();
  const FitResult result = fit(model, ds, tc);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  save_checkpoint(out / "checkpoint.json", model, result.norm);
  write_history_csv(result.history, out / "history.csv");

  nlohmann::json summary;
  summary["epochs_run"] = result.history.epochs.size();
  summary["best_epoch"] = result.history.best_epoch;
  summary["best_val_loss"] = result.history.best_val_loss;
  summary["n_train"] = result.splits.train.size();
  summary["n_val"] = result.splits.val.size();
  summary["n_test"] = result.splits.test.size();
  summary["target_norm"] = {{"mean", result.norm.mean}, {"std", result.norm.std_dev}};
  std::ofstream sout(out / "summary.json");
  sout << summary.dump(2) << "\n";

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "trained %zu epochs (best %zu, val loss %.6g) in %.1fs -> %s",
                result.history.epochs.size(), result.history.best_epoch,
                result.history.best_val_loss, wall,
                (out / "checkpoint.json").string().c_str());
  std::cout << buf << "\n";
  return 0;
}

int cmd_eval(const CommonOpts& opts, const std::string& dataset_path,
             const std::string& checkpoint_path, const std::string& split_name,
             const std::vector<std::string>& argv_tail) {
  const RunConfig cfg = load_config(opts);
  const fs::path out = prepare_out_dir(opts);
  write_manifest(out, "eval", opts.seed, opts.config_path, cfg, argv_tail);

  const Dataset ds = load_dataset(dataset_path);
  Checkpoint cp = load_checkpoint(checkpoint_path);
  const TrainConfig tc = train_from_config(cfg, opts.seed);
  const SplitIndices splits =
      split_dataset(ds, tc.train_fraction, tc.val_fraction, tc.test_fraction, tc.seed);

  std::vector<std::size_t> indices;
  if (split_name == "train") indices = splits.train;
  else if (split_name == "val") indices = splits.val;
  else if (split_name == "test") indices = splits.test;
  else if (split_name == "all") {
    indices.resize(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) indices[i] = i;
  } else {
    throw ConfigError("eval: unknown split '" + split_name + "' (train|val|test|all)");
  }

  const double bin_width = cfg.get_double("eval.bin_width", 1.0);
  const EvalReport rep = evaluate(cp.model, cp.norm, ds, indices, bin_width, opts.threads);
  write_eval_report(rep, out / "eval.json");
  write_histogram_csv(rep, out / "histogram.csv");

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%s split: n=%zu  MSE %.6g  RMSE %.6g  MAE %.6g  R2 %.6f (%s)",
                split_name.c_str(), rep.n, rep.mse, rep.rmse, rep.mae, rep.r2,
                rep.units.c_str());
  std::cout << buf << "\n";
  return 0;
}

int cmd_extract(const CommonOpts& opts, const std::string& checkpoint_path,
                const std::vector<std::string>& argv_tail) {
  const RunConfig cfg = load_config(opts);
  const fs::path out = prepare_out_dir(opts);
  write_manifest(out, "extract", opts.seed, opts.config_path, cfg, argv_tail);

  Checkpoint cp = load_checkpoint(checkpoint_path);
  const double r_min = cfg.get_double("extract.r_min", cfg.get_double("synthetic.r_min", 0.01));
  const double r_max = cfg.get_double("extract.r_max", cfg.get_double("synthetic.r_max", 1.0));
  const std::size_t n_points = cfg.get_size("extract.grid_points", 512);
  const Vec grid = uniform_grid(r_min, r_max, n_points);

  // analytic reference available when the config describes the synthetic family
  std::optional<SyntheticSpec> reference_spec;
  if (cfg.has("synthetic.pairs") || cfg.get_bool("extract.synthetic_reference", false)) {
    SyntheticSpec spec = synthetic_from_config(cfg, opts.seed);
    reference_spec = std::move(spec);
  }

  const auto& labels = cp.model.vocab().labels();
  std::vector<PairCurve> curves;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    for (std::size_t b = a + 1; b < labels.size(); ++b) {
      PairCurve curve = probe(cp.model, cp.norm, labels[a], labels[b], grid);
      if (reference_spec) {
        if (const PairParams* p = reference_spec->find(labels[a], labels[b])) {
          Vec ref(grid.size());
          for (std::size_t i = 0; i < grid.size(); ++i)
            ref[i] = gaussian_energy(grid[i], p->mu, p->sigma, reference_spec->normalized_pdf);
          curve.reference = std::move(ref);
          curve = align_offset(std::move(curve));
        }
      }
      curves.push_back(std::move(curve));
    }
  }
  export_curves(curves, out / "curves.csv");
  export_curves_json(curves, out / "curves.json");

  std::cout << "probed " << curves.size() << " pair functions on [" << r_min << ", " << r_max
            << "] -> " << (out / "curves.csv") << "\n";
  for (const PairCurve& c : curves) {
    if (c.residual_rms) {
      char buf[120];
      std::snprintf(buf, sizeof buf, "  %s-%s: offset %.6g, residual RMS %.6g",
                    c.type_a.c_str(), c.type_b.c_str(), *c.offset, *c.residual_rms);
      std::cout << buf << "\n";
    }
  }
  return 0;
}

int cmd_gradcheck(const CommonOpts& opts, const std::vector<std::string>& argv_tail) {
  const RunConfig cfg = load_config(opts);
  const fs::path out = prepare_out_dir(opts);
  write_manifest(out, "gradcheck", opts.seed, opts.config_path, cfg, argv_tail);

  const double eps = cfg.get_double("gradcheck.eps", 1e-5);
  const double tolerance = cfg.get_double("gradcheck.tolerance", 1e-4);
  const std::size_t n_graphs = cfg.get_size("gradcheck.graphs", 3);

  const std::vector<std::string> vocab = {"A", "B", "C"};
  const ModelConfig mc = model_from_config(cfg, vocab);
  EnergyModel model = EnergyModel::create(mc, mix_seed(opts.seed, 2));

  // random 3-node triangle graphs in the synthetic distance range
  std::mt19937_64 rng(mix_seed(opts.seed, 3));
  std::uniform_real_distribution<double> dist(0.01, 1.0);
  std::vector<AtomGraph> graphs(n_graphs);
  Vec targets(n_graphs);
  for (std::size_t g = 0; g < n_graphs; ++g) {
    graphs[g].node_types = {0, 1, 2};
    graphs[g].edges = {{0, 1, dist(rng)}, {1, 2, dist(rng)}, {0, 2, dist(rng)}};
    targets[g] = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  }

  const auto build = [&](Tape& tape) {
    std::vector<NodeId> errors;
    errors.reserve(graphs.size());
    for (std::size_t g = 0; g < graphs.size(); ++g)
      errors.push_back(tape.squared_error(model.forward(tape, graphs[g]), targets[g]));
    return tape.mean(errors);
  };

  const GradCheckResult result = gradcheck(build, model.params(), eps);
  const bool pass = result.max_relative_error < tolerance;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%s, max rel err %.3e (tolerance %.0e, worst %s)",
                pass ? "PASS" : "FAIL", result.max_relative_error, tolerance,
                result.worst_parameter.c_str());
  std::cout << buf << "\n";
  if (!pass) throw NumericError("gradient check failed: max rel err " +
                                std::to_string(result.max_relative_error));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-convolutional pairwise potential decomposition"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  CommonOpts opts;
  std::string format = "jsonl";
  std::string xyz_dir;
  double cutoff = 0.0;
  std::string dataset_path;
  std::string checkpoint_path;
  std::string split_name = "test";

  CLI::App* gen = app.add_subcommand("gen-synthetic", "generate the labeled synthetic dataset");
  add_common(gen, opts);
  gen->add_option("--format", format, "jsonl (default) or xyz (collinear chains)")
      ->check(CLI::IsMember({"jsonl", "xyz"}));

  CLI::App* ingest = app.add_subcommand("ingest", "build a dataset from extended-XYZ files");
  add_common(ingest, opts);
  ingest->add_option("--xyz-dir", xyz_dir, "directory of .xyz files")->required();
  ingest->add_option("--cutoff", cutoff, "neighbor cutoff distance (default from config, 5.0)");

  CLI::App* train = app.add_subcommand("train", "fit a model on a dataset");
  add_common(train, opts);
  train->add_option("--dataset", dataset_path, "dataset.jsonl path")->required();

  CLI::App* eval = app.add_subcommand("eval", "metrics + error histogram for a checkpoint");
  add_common(eval, opts);
  eval->add_option("--dataset", dataset_path, "dataset.jsonl path")->required();
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint.json path")->required();
  eval->add_option("--split", split_name, "train|val|test|all (default test)");

  CLI::App* extract = app.add_subcommand("extract", "sample learned pair functions");
  add_common(extract, opts);
  extract->add_option("--checkpoint", checkpoint_path, "checkpoint.json path")->required();

  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "finite-difference check of the full model gradient");
  add_common(gradcheck_cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  std::vector<std::string> argv_tail;
  for (int i = 1; i < argc; ++i) argv_tail.emplace_back(argv[i]);

  try {
    if (gen->parsed()) return cmd_gen_synthetic(opts, format, argv_tail);
    if (ingest->parsed()) return cmd_ingest(opts, xyz_dir, cutoff, argv_tail);
    if (train->parsed()) return cmd_train(opts, dataset_path, argv_tail);
    if (eval->parsed()) return cmd_eval(opts, dataset_path, checkpoint_path, split_name, argv_tail);
    if (extract->parsed()) return cmd_extract(opts, checkpoint_path, argv_tail);
    if (gradcheck_cmd->parsed()) return cmd_gradcheck(opts, argv_tail);
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
