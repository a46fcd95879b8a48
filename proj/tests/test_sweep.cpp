#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "hcg/error.hpp"
#include "hcg/sweep.hpp"
#include "hcg/synth.hpp"

using namespace hcg;

namespace {

std::string write_grid(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "hcg_test_sweep";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / name).string();
  std::ofstream out(path);
  out << text;
  return path;
}

LabeledDataset sweep_dataset() {
  SynthConfig cfg;
  cfg.num_classes = 2;
  cfg.sensors = 2;
  cfg.window = 16;
  cfg.samples_per_class = 10;
  cfg.base_freqs = {3.0};
  cfg.amplitudes = {1.0};
  cfg.freq_class_step = 0.25;
  cfg.noise_std = 0.05;
  cfg.sample_rate_hz = 16.0;
  cfg.seed = 31;
  return synth_generate(cfg);
}

}  // namespace

TEST_CASE("sweep grids parse every documented key") {
  const std::string path = write_grid("good.grid",
                                      "# small grid\n"
                                      "archs = dnn, gru\n"
                                      "layers = 2, 3\n"
                                      "hidden = 16:8\n"
                                      "kernel = 3\n"
                                      "epochs = 4\n"
                                      "lr = 0.01\n"
                                      "batch = 8\n"
                                      "window = 32\n"
                                      "stride = 16\n"
                                      "seed = 12\n");
  SweepGrid grid = load_sweep_grid(path);
  REQUIRE(grid.archs.size() == 2);
  CHECK(grid.archs[0] == Arch::Dnn);
  CHECK(grid.archs[1] == Arch::Gru);
  CHECK(grid.depths == std::vector<std::size_t>{2, 3});
  CHECK(grid.hidden == std::vector<std::size_t>{16, 8});
  CHECK(grid.kernel == 3);
  CHECK(grid.epochs == 4);
  CHECK(grid.lr == 0.01);
  CHECK(grid.batch == 8);
  CHECK(grid.window == 32);
  CHECK(grid.stride == 16);
  CHECK(grid.seed == 12);

  const std::string scalar = write_grid("scalar.grid", "hidden = 24\n");
  CHECK(load_sweep_grid(scalar).hidden == std::vector<std::size_t>{24});
}

TEST_CASE("sweep grids reject unknown keys and empty lists") {
  const std::string bad = write_grid("bad.grid", "archs = dnn\nwidth = 4\n");
  try {
    load_sweep_grid(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("width") != std::string::npos);
  }
  CHECK_THROWS_AS(load_sweep_grid(write_grid("empty.grid", "archs =\n")), ConfigError);
  CHECK_THROWS_AS(load_sweep_grid(write_grid("zero.grid", "epochs = 0\n")), ConfigError);
  CHECK_THROWS_AS(load_sweep_grid("/definitely/not/here.grid"), IoError);
}

TEST_CASE("cell configs give each architecture `depth` trunk layers") {
  SweepGrid grid;
  grid.hidden = {32, 16};
  grid.kernel = 3;

  ModelConfig dnn = sweep_cell_config(grid, Arch::Dnn, 3, 4, 2, 7);
  CHECK(dnn.dense_hidden == std::vector<std::size_t>{32, 16, 16});  // last width repeats
  CHECK(dnn.conv_channels.empty());
  CHECK(dnn.rec_hidden.empty());

  ModelConfig cnn = sweep_cell_config(grid, Arch::Cnn, 2, 4, 2, 7);
  CHECK(cnn.conv_channels == std::vector<std::size_t>{32, 16});
  CHECK(cnn.dense_hidden.empty());  // direct head

  ModelConfig gru = sweep_cell_config(grid, Arch::Gru, 2, 4, 2, 7);
  CHECK(gru.rec_hidden == std::vector<std::size_t>{32, 16});

  ModelConfig hcg = sweep_cell_config(grid, Arch::Hcg, 5, 4, 2, 7);
  CHECK(hcg.conv_channels == std::vector<std::size_t>{32, 16});          // floor(5/2)
  CHECK(hcg.rec_hidden == std::vector<std::size_t>{16, 16, 16});         // rest
  CHECK(hcg.kernel_len == 3);
  CHECK(hcg.seed == 7);

  CHECK_THROWS_AS(sweep_cell_config(grid, Arch::Hcg, 1, 4, 2, 7), ConfigError);
}

TEST_CASE("a small sweep fills every cell identically across thread counts") {
  LabeledDataset ds = sweep_dataset();
  SweepGrid grid;
  grid.archs = {Arch::Dnn, Arch::Gru};
  grid.depths = {2};
  grid.hidden = {6};
  grid.epochs = 2;
  grid.lr = 0.01;
  grid.batch = 4;
  grid.window = 16;
  grid.stride = 16;
  grid.seed = 3;

  SweepResult one = run_sweep(grid, ds, 2, 1);
  REQUIRE(one.cells.size() == 2);
  CHECK(one.repeats == 2);
  for (const SweepCell& cell : one.cells) {
    CHECK(cell.accuracies.size() == 2);
    CHECK(cell.has_std);
    for (double acc : cell.accuracies) {
      CHECK(acc >= 0.0);
      CHECK(acc <= 1.0);
    }
  }
  CHECK(one.cells[0].arch == Arch::Dnn);
  CHECK(one.cells[1].arch == Arch::Gru);

  SweepResult two = run_sweep(grid, ds, 2, 2);
  REQUIRE(two.cells.size() == one.cells.size());
  for (std::size_t i = 0; i < one.cells.size(); ++i) {
    CHECK(two.cells[i].arch == one.cells[i].arch);
    CHECK(two.cells[i].depth == one.cells[i].depth);
    CHECK(two.cells[i].accuracies == one.cells[i].accuracies);  // seeding is per cell, not per thread
  }

  CHECK_THROWS_AS(run_sweep(grid, ds, 0, 1), ValueError);
}

TEST_CASE("sweep table and CSV carry one row per cell") {
  SweepResult result;
  result.grid.archs = {Arch::Dnn};
  result.grid.depths = {2, 3};
  result.repeats = 2;
  SweepCell a;
  a.arch = Arch::Dnn;
  a.depth = 2;
  a.accuracies = {0.8, 1.0};
  a.mean = 0.9;
  a.stddev = 0.14142135623730948;
  a.has_std = true;
  SweepCell b;
  b.arch = Arch::Dnn;
  b.depth = 3;
  b.accuracies = {0.75};
  b.mean = 0.75;
  b.has_std = false;
  result.cells = {a, b};

  const std::string table = render_sweep_table(result);
  CHECK(table.find("dnn") != std::string::npos);
  CHECK(table.find("0.900") != std::string::npos);
  CHECK(table.find("0.141") != std::string::npos);

  const auto dir = std::filesystem::temp_directory_path() / "hcg_test_sweep";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "out.csv").string();
  write_sweep_csv(result, path);
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "arch,layers,mean_accuracy,std_accuracy");
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("dnn,2,", 0) == 0);
  REQUIRE(std::getline(in, line));
  CHECK(line.rfind("dnn,3,", 0) == 0);
  CHECK(line.find("n/a") != std::string::npos);
}
