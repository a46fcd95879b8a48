#include "hcg/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hcg/error.hpp"
#include "hcg/rng.hpp"

namespace hcg {

std::string split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  throw ValueError("unknown split: " + name);
}

std::vector<std::size_t> LabeledDataset::indices_of(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == s) out.push_back(i);
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

static double parse_cell(const std::string& cell, std::size_t row, std::size_t col,
                         const std::string& path) {
  const char* b = cell.data();
  const char* e = b + cell.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  while (e > b && (e[-1] == ' ' || e[-1] == '\t' || e[-1] == '\r')) --e;
  double v = 0.0;
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e || b == e) {
    throw ValueError(path + ": non-numeric cell at row " + std::to_string(row + 1) + ", col " +
                     std::to_string(col + 1));
  }
  return v;
}

SensorRecording load_recording(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<double> data;
  std::size_t cols = 0;
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      const std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                             : comma - start);
      data.push_back(parse_cell(cell, rows, col, path));
      ++col;
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (rows == 0) {
      cols = col;
    } else if (col != cols) {
      throw ValueError(path + ": ragged row " + std::to_string(rows + 1) + " has " +
                       std::to_string(col) + " cells, expected " + std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw ValueError(path + ": empty recording");
  SensorRecording rec;
  rec.values = Matrix(rows, cols, std::move(data));
  rec.source = path;
  return rec;
}

void write_recording(const std::string& path, const Matrix& values) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
      if (c) out << ',';
      out << format_double(values(r, c));
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

Matrix build_input_matrix(const std::vector<std::vector<double>>& series) {
  if (series.empty()) throw DimensionError("input matrix: no series");
  const std::size_t T = series[0].size();
  for (std::size_t i = 1; i < series.size(); ++i) {
    if (series[i].size() != T) {
      throw DimensionError("input matrix: series " + std::to_string(i) + " has length " +
                           std::to_string(series[i].size()) + ", expected " + std::to_string(T));
    }
  }
  if (T == 0) throw DimensionError("input matrix: empty series");
  Matrix x(T, series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    for (std::size_t t = 0; t < T; ++t) x(t, i) = series[i][t];
  }
  return x;
}

std::vector<Matrix> make_windows(const SensorRecording& rec, std::size_t length,
                                 std::size_t stride) {
  if (length == 0) throw ValueError("window length must be >= 1");
  if (stride == 0) throw ValueError("window stride must be >= 1");
  std::vector<Matrix> out;
  const std::size_t T = rec.values.rows();
  if (length > T) return out;
  const std::size_t count = (T - length) / stride + 1;
  out.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    out.push_back(rec.values.block(w * stride, 0, length, rec.values.cols()));
  }
  return out;
}

NormStats fit_normalization(const LabeledDataset& ds) {
  const auto train = ds.indices_of(Split::Train);
  if (train.empty()) throw ValueError("normalization: no train windows");
  const std::size_t N = ds.windows[train[0]].cols();
  NormStats stats;
  stats.mean.assign(N, 0.0);
  stats.std_dev.assign(N, 0.0);
  std::size_t total = 0;
  for (std::size_t idx : train) {
    const Matrix& w = ds.windows[idx];
    for (std::size_t t = 0; t < w.rows(); ++t) {
      for (std::size_t c = 0; c < N; ++c) stats.mean[c] += w(t, c);
    }
    total += w.rows();
  }
  for (std::size_t c = 0; c < N; ++c) stats.mean[c] /= static_cast<double>(total);
  for (std::size_t idx : train) {
    const Matrix& w = ds.windows[idx];
    for (std::size_t t = 0; t < w.rows(); ++t) {
      for (std::size_t c = 0; c < N; ++c) {
        const double d = w(t, c) - stats.mean[c];
        stats.std_dev[c] += d * d;
      }
    }
  }
  for (std::size_t c = 0; c < N; ++c) {
    double s = std::sqrt(stats.std_dev[c] / static_cast<double>(total));
    if (s < 1e-8) s = 1e-8;
    stats.std_dev[c] = s;
  }
  return stats;
}

Matrix apply_normalization(const NormStats& stats, const Matrix& window) {
  if (stats.empty()) return window;
  if (window.cols() != stats.mean.size()) {
    throw DimensionError("normalization: window has " + std::to_string(window.cols()) +
                         " sensors, stats have " + std::to_string(stats.mean.size()));
  }
  Matrix out = window;
  for (std::size_t t = 0; t < out.rows(); ++t) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out(t, c) = (out(t, c) - stats.mean[c]) / stats.std_dev[c];
    }
  }
  return out;
}

void apply_normalization(const NormStats& stats, LabeledDataset& ds) {
  for (Matrix& w : ds.windows) w = apply_normalization(stats, w);
}

void split_dataset(LabeledDataset& ds, double train_frac, double val_frac, double test_frac,
                   std::uint64_t seed) {
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9) {
    throw ValueError("split fractions must sum to 1");
  }
  if (ds.num_classes == 0) throw ValueError("split: dataset has no classes");
  ds.split.assign(ds.size(), Split::Train);
  for (std::size_t c = 0; c < ds.num_classes; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.labels[i] == c) members.push_back(i);
    }
    if (members.size() < 3) {
      throw ValueError("split: class " + std::to_string(c) + " has " +
                       std::to_string(members.size()) + " samples, need at least 3");
    }
    Rng rng(Rng::derive(seed, c));
    for (std::size_t i = members.size(); i > 1; --i) {
      const std::size_t j = rng.next_below(i);
      std::swap(members[i - 1], members[j]);
    }
    const std::size_t n = members.size();
    const std::size_t n_val = static_cast<std::size_t>(std::floor(val_frac * static_cast<double>(n)));
    const std::size_t n_test =
        static_cast<std::size_t>(std::floor(test_frac * static_cast<double>(n)));
    for (std::size_t i = 0; i < n_val; ++i) ds.split[members[i]] = Split::Val;
    for (std::size_t i = n_val; i < n_val + n_test; ++i) ds.split[members[i]] = Split::Test;
  }
}

LabeledDataset load_manifest_dataset(const std::string& dir, std::size_t window,
                                     std::size_t stride) {
  const std::string manifest = dir + "/manifest.csv";
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open " + manifest);
  std::string line;
  if (!std::getline(in, line)) throw ValueError(manifest + ": empty manifest");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "path,label") {
    throw ValueError(manifest + ": expected header 'path,label', got '" + line + "'");
  }
  LabeledDataset ds;
  std::size_t row = 1;
  std::size_t sensors = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw ValueError(manifest + ": row " + std::to_string(row) + " is missing a label");
    }
    const std::string path = line.substr(0, comma);
    const std::string label_str = line.substr(comma + 1);
    std::size_t label = 0;
    const auto res = std::from_chars(label_str.data(), label_str.data() + label_str.size(), label);
    if (res.ec != std::errc() || res.ptr != label_str.data() + label_str.size()) {
      throw ValueError(manifest + ": row " + std::to_string(row) + " has a non-integer label '" +
                       label_str + "'");
    }
    SensorRecording rec = load_recording(dir + "/" + path);
    rec.label = label;
    if (sensors == 0) {
      sensors = rec.values.cols();
    } else if (rec.values.cols() != sensors) {
      throw DimensionError(path + ": " + std::to_string(rec.values.cols()) +
                           " sensors, expected " + std::to_string(sensors));
    }
    for (Matrix& w : make_windows(rec, window, stride)) {
      ds.windows.push_back(std::move(w));
      ds.labels.push_back(label);
    }
    if (label + 1 > ds.num_classes) ds.num_classes = label + 1;
  }
  if (ds.windows.empty()) throw ValueError(manifest + ": no usable windows");
  ds.split.assign(ds.size(), Split::Train);
  return ds;
}

void write_manifest(const std::string& dir,
                    const std::vector<std::pair<std::string, std::size_t>>& entries) {
  const std::string path = dir + "/manifest.csv";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << "path,label\n";
  for (const auto& [file, label] : entries) out << file << ',' << label << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace hcg
