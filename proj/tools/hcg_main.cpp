// hcg: generate synthetic vibration data, train and evaluate damage
// classifiers, run layer sweeps, and verify gradients.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hcg/error.hpp"
#include "hcg/gradcheck.hpp"
#include "hcg/metrics.hpp"
#include "hcg/model.hpp"
#include "hcg/rng.hpp"
#include "hcg/sweep.hpp"
#include "hcg/synth.hpp"
#include "hcg/train.hpp"

namespace {

// Seed precedence: explicit flag, then the config file, then HCG_SEED, then
// zero. env_seed resolves the last two tiers.
std::uint64_t env_seed() {
  const char* raw = std::getenv("HCG_SEED");
  if (raw == nullptr || *raw == '\0') return 0;
  std::uint64_t v = 0;
  const char* end = raw;
  while (*end != '\0') ++end;
  const auto res = std::from_chars(raw, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw CLI::ValidationError("HCG_SEED", std::string("not an unsigned integer: '") + raw + "'");
  }
  return v;
}

// True when the file assigns `seed` itself, so the environment default must
// not override it.
bool file_sets_seed(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    std::size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    const std::size_t eq = line.find('=', b);
    if (eq == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t", eq - 1);
    if (e == std::string::npos || e < b) continue;
    if (line.substr(b, e - b + 1) == "seed") return true;
  }
  return false;
}

int cmd_generate(const std::string& config_path, const std::string& out_dir, bool seed_given,
                 std::uint64_t seed) {
  hcg::SynthConfig cfg = hcg::load_synth_config(config_path);
  if (seed_given) {
    cfg.seed = seed;
  } else if (!file_sets_seed(config_path)) {
    cfg.seed = env_seed();
  }
  hcg::LabeledDataset ds = hcg::synth_generate(cfg);
  hcg::write_synth_dataset(ds, out_dir);
  std::cout << "wrote " << ds.size() << " windows across " << ds.num_classes << " classes to "
            << out_dir << "\n";
  return 0;
}

int cmd_train(const std::string& arch_name, const std::string& data_dir, const std::string& out,
              std::size_t epochs, std::uint64_t seed, double lr, std::size_t batch,
              std::size_t window, std::size_t stride, double val_frac, double test_frac) {
  const hcg::Arch arch = hcg::arch_from_string(arch_name);
  hcg::LabeledDataset ds = hcg::load_manifest_dataset(data_dir, window, stride);

  // One user seed fans out into disjoint streams for split, init, shuffle.
  const std::uint64_t split_seed = hcg::Rng::derive(seed, 11);
  const std::uint64_t model_seed = hcg::Rng::derive(seed, 12);
  const std::uint64_t train_seed = hcg::Rng::derive(seed, 13);

  const double train_frac = 1.0 - val_frac - test_frac;
  hcg::split_dataset(ds, train_frac, val_frac, test_frac, split_seed);

  const std::size_t sensors = ds.windows.empty() ? 0 : ds.windows[0].cols();
  hcg::ModelConfig cfg =
      hcg::default_config(arch, sensors, window, ds.num_classes, model_seed);
  hcg::Model model = hcg::build_model(cfg);
  model.norm = hcg::fit_normalization(ds);

  hcg::TrainConfig tc;
  tc.learning_rate = lr;
  tc.batch_size = batch;
  tc.epochs = epochs;
  tc.seed = train_seed;

  const hcg::History hist = hcg::train(model, ds, tc, [](std::size_t epoch, const hcg::History& h) {
    std::printf("epoch %zu  train_loss %.6f  train_acc %.4f  val_loss %.6f  val_acc %.4f\n", epoch,
                h.train_loss.back(), h.train_acc.back(), h.val_loss.back(), h.val_acc.back());
    return false;
  });

  hcg::CheckpointExtras extras;
  extras.split_seed = split_seed;
  extras.train_frac = train_frac;
  extras.val_frac = val_frac;
  extras.test_frac = test_frac;
  extras.stride = stride;
  hcg::save_checkpoint(model, out, extras);
  hcg::write_history_csv(hist, out + ".history.csv");
  std::cout << "saved " << out << " (" << model.param_count() << " parameters) and " << out
            << ".history.csv\n";
  return 0;
}

int cmd_eval(const std::string& ckpt, const std::string& data_dir, const std::string& split_name,
             const std::string& confusion_out) {
  hcg::CheckpointExtras extras;
  hcg::Model model = hcg::load_checkpoint(ckpt, &extras);
  hcg::LabeledDataset ds =
      hcg::load_manifest_dataset(data_dir, model.cfg.window, extras.stride);
  hcg::split_dataset(ds, extras.train_frac, extras.val_frac, extras.test_frac, extras.split_seed);

  const hcg::Split split = hcg::split_from_string(split_name);
  const std::vector<std::size_t> idx = ds.indices_of(split);
  if (idx.empty()) throw hcg::ValueError("split '" + split_name + "' is empty");

  std::vector<std::size_t> pred;
  std::vector<std::size_t> truth;
  pred.reserve(idx.size());
  truth.reserve(idx.size());
  for (std::size_t i : idx) {
    pred.push_back(hcg::predict(model, ds.windows[i]));
    truth.push_back(ds.labels[i]);
  }
  const hcg::ConfusionMatrix cm = hcg::confusion(pred, truth, ds.num_classes);
  const hcg::MetricsReport report = hcg::compute_metrics(cm);
  std::cout << hcg::render_metrics(report);
  if (!confusion_out.empty()) {
    hcg::write_confusion_csv(cm, confusion_out);
    std::cout << "confusion matrix written to " << confusion_out << "\n";
  }
  return 0;
}

int cmd_sweep(const std::string& grid_path, const std::string& data_dir, std::size_t repeats,
              std::size_t threads, const std::string& out, bool seed_given, std::uint64_t seed) {
  hcg::SweepGrid grid = hcg::load_sweep_grid(grid_path);
  if (seed_given) {
    grid.seed = seed;
  } else if (!file_sets_seed(grid_path)) {
    grid.seed = env_seed();
  }
  hcg::LabeledDataset ds = hcg::load_manifest_dataset(data_dir, grid.window, grid.stride);
  const hcg::SweepResult result = hcg::run_sweep(grid, ds, repeats, threads);
  std::cout << hcg::render_sweep_table(result);
  if (!out.empty()) {
    hcg::write_sweep_csv(result, out);
    std::cout << "sweep table written to " << out << "\n";
  }
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, std::size_t trials) {
  const std::vector<hcg::GradCheckCase> cases = hcg::run_gradient_suite(seed, trials);
  bool all_pass = true;
  for (const hcg::GradCheckCase& c : cases) {
    std::printf("%-12s max rel err %.3e  %s\n", c.name.c_str(), c.max_rel_err,
                c.pass ? "pass" : "FAIL");
    all_pass = all_pass && c.pass;
  }
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical CNN+GRU damage classification toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path, data_dir, arch = "hcg", ckpt_path, split = "test";
  std::string grid_path, confusion_out, sweep_out;
  std::uint64_t seed = 0;
  std::size_t epochs = 30, batch = 64, window = 128, stride = 64, repeats = 10, threads = 1,
              trials = 20;
  double lr = 0.001, val_frac = 0.2, test_frac = 0.2;

  CLI::App* gen = app.add_subcommand("generate", "Write a synthetic dataset (CSV + manifest)");
  gen->add_option("--config", config_path, "Synthesis config file")->required();
  gen->add_option("--out", out_path, "Output directory")->required();
  CLI::Option* gen_seed = gen->add_option("--seed", seed, "Generator seed");

  CLI::App* train = app.add_subcommand("train", "Train a classifier on a manifest dataset");
  train->add_option("--arch", arch, "hcg|dnn|cnn|lstm|gru")->required();
  train->add_option("--data", data_dir, "Dataset directory containing manifest.csv")->required();
  train->add_option("--out", out_path, "Checkpoint output path")->required();
  train->add_option("--epochs", epochs, "Training epochs");
  train->add_option("--seed", seed, "Run seed (split, init, shuffle)");
  train->add_option("--lr", lr, "Adam learning rate");
  train->add_option("--batch", batch, "Mini-batch size");
  train->add_option("--window", window, "Window length");
  train->add_option("--stride", stride, "Window stride");
  train->add_option("--val-frac", val_frac, "Validation fraction");
  train->add_option("--test-frac", test_frac, "Test fraction");
  CLI::Option* train_seed_opt = train->get_option("--seed");

  CLI::App* ev = app.add_subcommand("eval", "Evaluate a checkpoint on one split");
  ev->add_option("--ckpt", ckpt_path, "Checkpoint path")->required();
  ev->add_option("--data", data_dir, "Dataset directory containing manifest.csv")->required();
  ev->add_option("--split", split, "train|val|test");
  ev->add_option("--confusion", confusion_out, "Write the confusion matrix CSV here");

  CLI::App* sw = app.add_subcommand("sweep", "Train a grid of depth x architecture cells");
  sw->add_option("--grid", grid_path, "Grid config file")->required();
  sw->add_option("--data", data_dir, "Dataset directory containing manifest.csv")->required();
  sw->add_option("--repeats", repeats, "Training repeats per cell");
  sw->add_option("--threads", threads, "Worker threads");
  sw->add_option("--out", sweep_out, "Write the sweep table CSV here");
  CLI::Option* sweep_seed = sw->add_option("--seed", seed, "Grid seed override");

  CLI::App* gc = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
  CLI::Option* gc_seed = gc->add_option("--seed", seed, "Suite seed");
  gc->add_option("--trials", trials, "Random instances per layer kind");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help goes to stdout, exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (gen->parsed()) {
      return cmd_generate(config_path, out_path, gen_seed->count() > 0, seed);
    }
    if (train->parsed()) {
      const std::uint64_t s = train_seed_opt->count() > 0 ? seed : env_seed();
      return cmd_train(arch, data_dir, out_path, epochs, s, lr, batch, window, stride, val_frac,
                       test_frac);
    }
    if (ev->parsed()) {
      return cmd_eval(ckpt_path, data_dir, split, confusion_out);
    }
    if (sw->parsed()) {
      return cmd_sweep(grid_path, data_dir, repeats, threads, sweep_out, sweep_seed->count() > 0,
                       seed);
    }
    if (gc->parsed()) {
      const std::uint64_t s = gc_seed->count() > 0 ? seed : env_seed();
      return cmd_gradcheck(s, trials);
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
