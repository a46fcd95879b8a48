#include "hcg/sweep.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <thread>

#include "hcg/error.hpp"
#include "hcg/metrics.hpp"
#include "hcg/rng.hpp"
#include "hcg/train.hpp"

namespace hcg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t pos = s.find(sep, start);
    const std::string item =
        trim(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (!item.empty()) out.push_back(item);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::size_t parse_size(const std::string& s, const std::string& key) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

}  // namespace

SweepGrid load_sweep_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  SweepGrid grid;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ": line " + std::to_string(row) + " is not 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key == "archs") {
      grid.archs.clear();
      for (const std::string& a : split_on(val, ',')) grid.archs.push_back(arch_from_string(a));
    } else if (key == "layers") {
      grid.depths.clear();
      for (const std::string& d : split_on(val, ',')) grid.depths.push_back(parse_size(d, key));
    } else if (key == "hidden") {
      grid.hidden.clear();
      for (const std::string& h : split_on(val, ':')) grid.hidden.push_back(parse_size(h, key));
    } else if (key == "kernel") {
      grid.kernel = parse_size(val, key);
    } else if (key == "epochs") {
      grid.epochs = parse_size(val, key);
    } else if (key == "lr") {
      double v = 0.0;
      const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
      if (res.ec != std::errc() || res.ptr != val.data() + val.size() || val.empty()) {
        throw ConfigError("lr: expected a number, got '" + val + "'");
      }
      grid.lr = v;
    } else if (key == "batch") {
      grid.batch = parse_size(val, key);
    } else if (key == "window") {
      grid.window = parse_size(val, key);
    } else if (key == "stride") {
      grid.stride = parse_size(val, key);
    } else if (key == "seed") {
      std::uint64_t v = 0;
      const auto res = std::from_chars(val.data(), val.data() + val.size(), v);
      if (res.ec != std::errc() || res.ptr != val.data() + val.size() || val.empty()) {
        throw ConfigError("seed: expected a non-negative integer, got '" + val + "'");
      }
      grid.seed = v;
    } else {
      throw ConfigError(path + ": unknown key '" + key + "' at line " + std::to_string(row));
    }
  }
  if (grid.archs.empty()) throw ConfigError(path + ": archs is empty");
  if (grid.depths.empty()) throw ConfigError(path + ": layers is empty");
  if (grid.hidden.empty()) throw ConfigError(path + ": hidden is empty");
  for (std::size_t h : grid.hidden)
    if (h == 0) throw ConfigError(path + ": zero hidden width");
  for (std::size_t d : grid.depths)
    if (d == 0) throw ConfigError(path + ": zero depth");
  if (grid.kernel == 0) throw ConfigError(path + ": kernel must be >= 1");
  if (grid.epochs == 0) throw ConfigError(path + ": epochs must be >= 1");
  if (grid.batch == 0) throw ConfigError(path + ": batch must be >= 1");
  if (grid.window == 0) throw ConfigError(path + ": window must be >= 1");
  if (grid.stride == 0) throw ConfigError(path + ": stride must be >= 1");
  return grid;
}

ModelConfig sweep_cell_config(const SweepGrid& grid, Arch arch, std::size_t depth,
                              std::size_t sensors, std::size_t num_classes, std::uint64_t seed) {
  auto width = [&grid](std::size_t layer) {
    return grid.hidden[layer < grid.hidden.size() ? layer : grid.hidden.size() - 1];
  };
  ModelConfig cfg;
  cfg.arch = arch;
  cfg.sensors = sensors;
  cfg.window = grid.window;
  cfg.num_classes = num_classes;
  cfg.seed = seed;
  cfg.kernel_len = grid.kernel;
  switch (arch) {
    case Arch::Dnn:
      for (std::size_t i = 0; i < depth; ++i) cfg.dense_hidden.push_back(width(i));
      break;
    case Arch::Cnn:
      for (std::size_t i = 0; i < depth; ++i) cfg.conv_channels.push_back(width(i));
      break;
    case Arch::Gru:
    case Arch::Lstm:
      for (std::size_t i = 0; i < depth; ++i) cfg.rec_hidden.push_back(width(i));
      break;
    case Arch::Hcg: {
      if (depth < 2) {
        throw ConfigError("hcg depth must be >= 2 (got " + std::to_string(depth) + ")");
      }
      const std::size_t n_conv = depth / 2;
      for (std::size_t i = 0; i < n_conv; ++i) cfg.conv_channels.push_back(width(i));
      for (std::size_t i = n_conv; i < depth; ++i) cfg.rec_hidden.push_back(width(i));
      break;
    }
  }
  return cfg;
}

SweepResult run_sweep(const SweepGrid& grid, const LabeledDataset& base, std::size_t repeats,
                      std::size_t threads) {
  if (repeats < 1) throw ValueError("sweep: need at least one repeat");
  for (std::size_t d : grid.depths) {
    for (Arch a : grid.archs) {
      if (a == Arch::Hcg && d < 2) {
        throw ConfigError("sweep: hcg depth must be >= 2 (grid lists " + std::to_string(d) + ")");
      }
    }
  }
  if (base.windows.empty()) throw ValueError("sweep: empty dataset");
  const std::size_t sensors = base.windows[0].cols();

  // One split per repeat, shared by every cell so comparisons are paired.
  std::vector<LabeledDataset> repeat_ds(repeats, base);
  for (std::size_t r = 0; r < repeats; ++r) {
    split_dataset(repeat_ds[r], 0.6, 0.2, 0.2, Rng::derive(grid.seed, 7000 + r));
    const NormStats stats = fit_normalization(repeat_ds[r]);
    apply_normalization(stats, repeat_ds[r]);
  }

  SweepResult result;
  result.grid = grid;
  result.repeats = repeats;
  result.cells.resize(grid.archs.size() * grid.depths.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t cell_idx = next.fetch_add(1);
      if (cell_idx >= result.cells.size()) return;
      const std::size_t ai = cell_idx / grid.depths.size();
      const std::size_t di = cell_idx % grid.depths.size();
      const Arch arch = grid.archs[ai];
      const std::size_t depth = grid.depths[di];
      SweepCell cell;
      cell.arch = arch;
      cell.depth = depth;
      const std::uint64_t cell_seed = Rng::derive(Rng::derive(grid.seed, 1 + ai), depth);
      for (std::size_t r = 0; r < repeats; ++r) {
        const LabeledDataset& ds = repeat_ds[r];
        ModelConfig cfg = sweep_cell_config(grid, arch, depth, sensors, ds.num_classes,
                                            Rng::derive(cell_seed, 2 * r));
        Model model = build_model(cfg);
        TrainConfig tc;
        tc.learning_rate = grid.lr;
        tc.batch_size = grid.batch;
        tc.epochs = grid.epochs;
        tc.seed = Rng::derive(cell_seed, 2 * r + 1);
        train(model, ds, tc);
        cell.accuracies.push_back(evaluate(model, ds, Split::Test).second);
      }
      const MeanStd ms = mean_std(cell.accuracies);
      cell.mean = ms.mean;
      cell.stddev = ms.stddev;
      cell.has_std = ms.has_std;
      result.cells[cell_idx] = std::move(cell);
    }
  };

  if (threads < 1) threads = 1;
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return result;
}

static std::string format_cell(const SweepCell& cell) {
  char buf[48];
  if (cell.has_std) {
    std::snprintf(buf, sizeof(buf), "%.3f±%.3f", cell.mean, cell.stddev);
  } else {
    std::snprintf(buf, sizeof(buf), "%.3f±n/a", cell.mean);
  }
  return buf;
}

std::string render_sweep_table(const SweepResult& result) {
  const SweepGrid& grid = result.grid;
  std::string out = "arch ";
  std::vector<std::string> headers;
  for (std::size_t depth : grid.depths) headers.push_back(std::to_string(depth) + " layers");
  for (const std::string& h : headers) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " %12s", h.c_str());
    out += buf;
  }
  out += '\n';
  for (std::size_t ai = 0; ai < grid.archs.size(); ++ai) {
    char name[16];
    std::snprintf(name, sizeof(name), "%-5s", arch_name(grid.archs[ai]).c_str());
    out += name;
    for (std::size_t di = 0; di < grid.depths.size(); ++di) {
      const SweepCell& cell = result.cells[ai * grid.depths.size() + di];
      // the plus-minus sign takes two bytes in UTF-8; pad by display width
      const std::string text = format_cell(cell);
      const std::size_t display = text.size() - 1;
      std::string pad(display < 12 ? 12 - display : 0, ' ');
      out += ' ' + pad + text;
    }
    out += '\n';
  }
  return out;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "arch,layers,mean_accuracy,std_accuracy\n";
  const SweepGrid& grid = result.grid;
  for (std::size_t ai = 0; ai < grid.archs.size(); ++ai) {
    for (std::size_t di = 0; di < grid.depths.size(); ++di) {
      const SweepCell& cell = result.cells[ai * grid.depths.size() + di];
      out << arch_name(cell.arch) << ',' << cell.depth << ',' << format_double(cell.mean) << ',';
      if (cell.has_std) {
        out << format_double(cell.stddev);
      } else {
        out << "n/a";
      }
      out << '\n';
    }
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace hcg
