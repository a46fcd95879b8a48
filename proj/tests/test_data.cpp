#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "hcg/dataset.hpp"
#include "hcg/error.hpp"
#include "hcg/synth.hpp"

using namespace hcg;

namespace {

std::string fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

template <typename E, typename Fn>
std::string message_of(Fn&& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.what();
  }
  FAIL("expected exception was not thrown");
  return {};
}

}  // namespace

TEST_CASE("load_recording parses a plain CSV") {
  const std::string dir = fresh_dir("hcg_test_csv");
  write_file(dir + "/rec.csv", "1.5,2.5\n-3.0,4.0\n0.25,1e-3\n");
  SensorRecording rec = load_recording(dir + "/rec.csv");
  REQUIRE(rec.values.rows() == 3);
  REQUIRE(rec.values.cols() == 2);
  CHECK(rec.values(0, 0) == 1.5);
  CHECK(rec.values(1, 1) == 4.0);
  CHECK(rec.values(2, 1) == 1e-3);
}

TEST_CASE("load_recording reports 1-based locations for bad cells") {
  const std::string dir = fresh_dir("hcg_test_csv_bad");
  write_file(dir + "/ragged.csv", "1,2\n3\n");
  const std::string ragged =
      message_of<ValueError>([&] { load_recording(dir + "/ragged.csv"); });
  CHECK(ragged.find("ragged row 2") != std::string::npos);

  write_file(dir + "/text.csv", "1,2\n3,oops\n");
  const std::string text = message_of<ValueError>([&] { load_recording(dir + "/text.csv"); });
  CHECK(text.find("row 2") != std::string::npos);
  CHECK(text.find("col 2") != std::string::npos);

  write_file(dir + "/empty.csv", "");
  CHECK_THROWS_AS(load_recording(dir + "/empty.csv"), ValueError);
  CHECK_THROWS_AS(load_recording(dir + "/missing.csv"), IoError);
}

TEST_CASE("recordings round-trip through write_recording") {
  const std::string dir = fresh_dir("hcg_test_csv_rt");
  Matrix m{{0.1, 1.0 / 3.0}, {-2.5e-7, 123456.789}};
  write_recording(dir + "/m.csv", m);
  SensorRecording rec = load_recording(dir + "/m.csv");
  REQUIRE(rec.values.rows() == m.rows());
  REQUIRE(rec.values.cols() == m.cols());
  CHECK(rec.values == m);  // shortest round-trip formatting is exact
}

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  for (double v : {1.0 / 3.0, 0.30000000000000004, -1.2345678901234567e-12}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("build_input_matrix puts each series in its own column") {
  Matrix m = build_input_matrix({{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}});
  REQUIRE(m.rows() == 3);
  REQUIRE(m.cols() == 2);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(2, 0) == 3.0);
  CHECK(m(0, 1) == 4.0);
  CHECK(m(2, 1) == 6.0);
  CHECK_THROWS_AS(build_input_matrix({{1.0, 2.0}, {3.0}}), DimensionError);
  CHECK_THROWS_AS(build_input_matrix({}), DimensionError);
}

TEST_CASE("make_windows counts floor((T-L)/S)+1") {
  SensorRecording rec;
  rec.values = Matrix(100, 2);
  for (std::size_t t = 0; t < 100; ++t) rec.values(t, 0) = static_cast<double>(t);

  auto w = make_windows(rec, 50, 25);
  REQUIRE(w.size() == 3);  // starts 0, 25, 50
  CHECK(w[0](0, 0) == 0.0);
  CHECK(w[1](0, 0) == 25.0);
  CHECK(w[2](0, 0) == 50.0);
  CHECK(w[2](49, 0) == 99.0);

  CHECK(make_windows(rec, 100, 7).size() == 1);
  CHECK(make_windows(rec, 101, 7).empty());
  CHECK(make_windows(rec, 10, 90).size() == 2);
  CHECK_THROWS_AS(make_windows(rec, 0, 1), ValueError);
  CHECK_THROWS_AS(make_windows(rec, 10, 0), ValueError);
}

TEST_CASE("normalization fits on the train split only and floors constants") {
  LabeledDataset ds;
  ds.num_classes = 1;
  // train windows: channel 0 values {1,3}, channel 1 constant 5
  ds.windows.push_back(Matrix{{1.0, 5.0}, {1.0, 5.0}});
  ds.windows.push_back(Matrix{{3.0, 5.0}, {3.0, 5.0}});
  // val window with wildly different stats; must not affect the fit
  ds.windows.push_back(Matrix{{100.0, -100.0}, {100.0, -100.0}});
  ds.labels = {0, 0, 0};
  ds.split = {Split::Train, Split::Train, Split::Val};

  NormStats stats = fit_normalization(ds);
  REQUIRE(stats.mean.size() == 2);
  CHECK(stats.mean[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(stats.mean[1] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(stats.std_dev[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(stats.std_dev[1] == doctest::Approx(1e-8).epsilon(1e-12));  // constant channel floor

  Matrix z = apply_normalization(stats, ds.windows[0]);
  CHECK(z(0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(z(0, 1) == doctest::Approx(0.0).epsilon(1e-9));

  apply_normalization(stats, ds);
  CHECK(ds.windows[0](0, 0) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ds.windows[2](0, 0) == doctest::Approx(98.0).epsilon(1e-12));

  LabeledDataset empty;
  empty.num_classes = 1;
  CHECK_THROWS_AS(fit_normalization(empty), ValueError);
  CHECK_THROWS_AS(apply_normalization(stats, Matrix(2, 3)), DimensionError);
}

TEST_CASE("split_dataset stratifies exactly and stays deterministic") {
  LabeledDataset ds;
  ds.num_classes = 3;
  for (std::size_t c = 0; c < 3; ++c) {
    for (int i = 0; i < 100; ++i) {
      ds.windows.push_back(Matrix(1, 1));
      ds.labels.push_back(c);
    }
  }
  ds.split.assign(ds.size(), Split::Train);

  split_dataset(ds, 0.6, 0.2, 0.2, 42);
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t n_train = 0, n_val = 0, n_test = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] != c) continue;
      switch (ds.split[i]) {
        case Split::Train: ++n_train; break;
        case Split::Val: ++n_val; break;
        case Split::Test: ++n_test; break;
      }
    }
    CHECK(n_train == 60);
    CHECK(n_val == 20);
    CHECK(n_test == 20);
  }

  // every index lands in exactly one split
  CHECK(ds.indices_of(Split::Train).size() + ds.indices_of(Split::Val).size() +
            ds.indices_of(Split::Test).size() ==
        ds.size());

  auto tags = ds.split;
  split_dataset(ds, 0.6, 0.2, 0.2, 42);
  CHECK(ds.split == tags);  // same seed, same assignment
  split_dataset(ds, 0.6, 0.2, 0.2, 43);
  CHECK(ds.split != tags);  // different seed reshuffles

  CHECK_THROWS_AS(split_dataset(ds, 0.5, 0.2, 0.2, 1), ValueError);  // fracs != 1

  LabeledDataset tiny;
  tiny.num_classes = 1;
  tiny.windows.push_back(Matrix(1, 1));
  tiny.windows.push_back(Matrix(1, 1));
  tiny.labels = {0, 0};
  tiny.split = {Split::Train, Split::Train};
  CHECK_THROWS_AS(split_dataset(tiny, 0.6, 0.2, 0.2, 1), ValueError);  // < 3 per class
}

TEST_CASE("synth generation is deterministic and balanced") {
  SynthConfig cfg;
  cfg.num_classes = 3;
  cfg.sensors = 2;
  cfg.window = 32;
  cfg.samples_per_class = 5;
  cfg.seed = 77;
  LabeledDataset a = synth_generate(cfg);
  LabeledDataset b = synth_generate(cfg);
  REQUIRE(a.size() == 15);
  CHECK(a.num_classes == 3);
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t n = 0;
    for (std::size_t lbl : a.labels) n += (lbl == c) ? 1 : 0;
    CHECK(n == 5);
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.windows[i] == b.windows[i]);
    CHECK(a.labels[i] == b.labels[i]);
  }
  cfg.seed = 78;
  LabeledDataset c = synth_generate(cfg);
  CHECK(a.windows[0] != c.windows[0]);
}

TEST_CASE("synth puts each class's mode at its own DFT bin") {
  // fs equal to the window length makes bin k exactly k Hz, and the chosen
  // step makes all four class frequencies integral: 20, 18, 16, 14 Hz.
  SynthConfig cfg;
  cfg.num_classes = 4;
  cfg.sensors = 2;
  cfg.window = 128;
  cfg.samples_per_class = 3;
  cfg.base_freqs = {20.0};
  cfg.amplitudes = {1.0};
  cfg.freq_class_step = 0.1;
  cfg.spatial_weights = {1.0, 0.7};
  cfg.noise_std = 0.0;
  cfg.sample_rate_hz = 128.0;
  cfg.seed = 5;

  CHECK(synth_frequency(cfg, 0, 0) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(synth_frequency(cfg, 3, 0) == doctest::Approx(14.0).epsilon(1e-12));

  LabeledDataset ds = synth_generate(cfg);
  const std::size_t T = cfg.window;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    std::size_t peak = 0;
    double peak_power = -1.0;
    for (std::size_t k = 1; k < T / 2; ++k) {
      double re = 0.0, im = 0.0;
      for (std::size_t t = 0; t < T; ++t) {
        const double ang = -2.0 * M_PI * static_cast<double>(k * t) / static_cast<double>(T);
        re += ds.windows[i](t, 0) * std::cos(ang);
        im += ds.windows[i](t, 0) * std::sin(ang);
      }
      const double power = re * re + im * im;
      if (power > peak_power) {
        peak_power = power;
        peak = k;
      }
    }
    CHECK(peak == 20 - 2 * ds.labels[i]);

    // integral periods and zero noise: every channel averages to zero
    for (std::size_t s = 0; s < cfg.sensors; ++s) {
      double mean = 0.0;
      for (std::size_t t = 0; t < T; ++t) mean += ds.windows[i](t, s);
      mean /= static_cast<double>(T);
      CHECK(std::abs(mean) < 1e-10);
    }
  }
}

TEST_CASE("synth config files parse and reject unknown keys") {
  const std::string dir = fresh_dir("hcg_test_synthcfg");
  write_file(dir + "/good.cfg",
             "# preset\n"
             "num_classes = 3\n"
             "sensors = 4\n"
             "window = 64\n"
             "samples_per_class = 10\n"
             "base_freqs = 5, 12.5\n"
             "amplitudes = 1.0, 0.25\n"
             "freq_class_step = 0.04\n"
             "noise_std = 0.3\n"
             "sample_rate_hz = 50\n"
             "seed = 9\n");
  SynthConfig cfg = load_synth_config(dir + "/good.cfg");
  CHECK(cfg.num_classes == 3);
  CHECK(cfg.sensors == 4);
  CHECK(cfg.window == 64);
  CHECK(cfg.samples_per_class == 10);
  REQUIRE(cfg.base_freqs.size() == 2);
  CHECK(cfg.base_freqs[1] == 12.5);
  CHECK(cfg.amplitudes[1] == 0.25);
  CHECK(cfg.freq_class_step == 0.04);
  CHECK(cfg.noise_std == 0.3);
  CHECK(cfg.sample_rate_hz == 50.0);
  CHECK(cfg.seed == 9);

  write_file(dir + "/bad.cfg", "num_classes = 3\nnoise_level = 0.1\n");
  const std::string msg =
      message_of<ConfigError>([&] { load_synth_config(dir + "/bad.cfg"); });
  CHECK(msg.find("noise_level") != std::string::npos);
}

TEST_CASE("synth datasets round-trip through the manifest loader") {
  SynthConfig cfg;
  cfg.num_classes = 2;
  cfg.sensors = 3;
  cfg.window = 16;
  cfg.samples_per_class = 4;
  cfg.noise_std = 0.05;
  cfg.seed = 11;
  LabeledDataset ds = synth_generate(cfg);

  const std::string dir = fresh_dir("hcg_test_roundtrip");
  write_synth_dataset(ds, dir);
  CHECK(std::filesystem::exists(dir + "/manifest.csv"));

  LabeledDataset back = load_manifest_dataset(dir, 16, 16);
  REQUIRE(back.size() == ds.size());
  CHECK(back.num_classes == 2);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(back.labels[i] == ds.labels[i]);
    CHECK(back.windows[i] == ds.windows[i]);  // exact through text and back
  }
}

TEST_CASE("manifest loader validates the header and rows") {
  const std::string dir = fresh_dir("hcg_test_manifest");
  write_file(dir + "/manifest.csv", "file,class\n");
  const std::string msg = message_of<ValueError>([&] { load_manifest_dataset(dir, 8, 8); });
  CHECK(msg.find("path,label") != std::string::npos);

  write_file(dir + "/manifest.csv", "path,label\nrec.csv,zero\n");
  CHECK_THROWS_AS(load_manifest_dataset(dir, 8, 8), ValueError);

  CHECK_THROWS_AS(load_manifest_dataset(dir + "/nope", 8, 8), IoError);
}

TEST_CASE("split names map both ways") {
  CHECK(split_name(Split::Train) == "train");
  CHECK(split_name(Split::Val) == "val");
  CHECK(split_name(Split::Test) == "test");
  CHECK(split_from_string("test") == Split::Test);
  CHECK_THROWS_AS(split_from_string("holdout"), ValueError);
}
