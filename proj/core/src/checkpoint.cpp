#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "hcg/error.hpp"
#include "hcg/model.hpp"

namespace hcg {

namespace {

constexpr const char* kMagic = "HCGCKPT v1";

std::string join_sizes(const std::vector<std::size_t>& v) {
  if (v.empty()) return "-";
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  if (s == "-") return out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string item =
        s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size() || item.empty()) {
      throw ValueError("checkpoint: bad size list entry '" + item + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_f64(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw ValueError("checkpoint: bad number '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw ValueError("checkpoint: bad integer '" + s + "'");
  }
  return v;
}

void write_tensor(std::ofstream& out, const std::string& name, const Matrix& m) {
  out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

}  // namespace

void save_checkpoint(const Model& model, const std::string& path, const CheckpointExtras& extras) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const ModelConfig& cfg = model.cfg;
  out << kMagic << '\n';
  out << "arch " << arch_name(cfg.arch) << '\n';
  out << "sensors " << cfg.sensors << '\n';
  out << "window " << cfg.window << '\n';
  out << "num_classes " << cfg.num_classes << '\n';
  out << "seed " << cfg.seed << '\n';
  out << "kernel_len " << cfg.kernel_len << '\n';
  out << "conv_bias " << (cfg.conv_bias ? 1 : 0) << '\n';
  out << "conv_channels " << join_sizes(cfg.conv_channels) << '\n';
  out << "rec_hidden " << join_sizes(cfg.rec_hidden) << '\n';
  out << "dense_hidden " << join_sizes(cfg.dense_hidden) << '\n';
  out << "split_seed " << extras.split_seed << '\n';
  out << "train_frac " << format_double(extras.train_frac) << '\n';
  out << "val_frac " << format_double(extras.val_frac) << '\n';
  out << "test_frac " << format_double(extras.test_frac) << '\n';
  out << "stride " << extras.stride << '\n';
  out << "norm " << (model.norm.empty() ? 0 : 1) << '\n';
  out << "end_config\n";
  if (!model.norm.empty()) {
    const std::size_t n = model.norm.mean.size();
    Matrix mean(1, n), sd(1, n);
    for (std::size_t i = 0; i < n; ++i) {
      mean(0, i) = model.norm.mean[i];
      sd(0, i) = model.norm.std_dev[i];
    }
    write_tensor(out, "norm.mean", mean);
    write_tensor(out, "norm.std", sd);
  }
  for (const ParamTensor* t : model.params()) {
    write_tensor(out, t->name, t->value);
  }
  if (!out) throw IoError("write failed: " + path);
}

Model load_checkpoint(const std::string& path, CheckpointExtras* extras) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ValueError(path + ": empty checkpoint");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMagic) {
    throw ValueError(path + ": unsupported checkpoint version line '" + line + "'");
  }
  ModelConfig cfg;
  CheckpointExtras ex;
  bool has_norm = false;
  bool ended = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "end_config") {
      ended = true;
      break;
    }
    const std::size_t sp = line.find(' ');
    if (sp == std::string::npos) throw ValueError(path + ": bad config line '" + line + "'");
    const std::string key = line.substr(0, sp);
    const std::string val = line.substr(sp + 1);
    if (key == "arch") cfg.arch = arch_from_string(val);
    else if (key == "sensors") cfg.sensors = parse_u64(val);
    else if (key == "window") cfg.window = parse_u64(val);
    else if (key == "num_classes") cfg.num_classes = parse_u64(val);
    else if (key == "seed") cfg.seed = parse_u64(val);
    else if (key == "kernel_len") cfg.kernel_len = parse_u64(val);
    else if (key == "conv_bias") cfg.conv_bias = parse_u64(val) != 0;
    else if (key == "conv_channels") cfg.conv_channels = parse_sizes(val);
    else if (key == "rec_hidden") cfg.rec_hidden = parse_sizes(val);
    else if (key == "dense_hidden") cfg.dense_hidden = parse_sizes(val);
    else if (key == "split_seed") ex.split_seed = parse_u64(val);
    else if (key == "train_frac") ex.train_frac = parse_f64(val);
    else if (key == "val_frac") ex.val_frac = parse_f64(val);
    else if (key == "test_frac") ex.test_frac = parse_f64(val);
    else if (key == "stride") ex.stride = parse_u64(val);
    else if (key == "norm") has_norm = parse_u64(val) != 0;
    else throw ValueError(path + ": unknown config key '" + key + "'");
  }
  if (!ended) throw ValueError(path + ": truncated config block");

  Model model = build_model(cfg);
  std::map<std::string, ParamTensor*> by_name;
  for (ParamTensor* t : model.params()) by_name[t->name] = t;

  Matrix norm_mean, norm_std;
  std::size_t filled = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream hdr(line);
    std::string tag, name;
    std::size_t rows = 0, cols = 0;
    hdr >> tag >> name >> rows >> cols;
    if (tag != "tensor" || hdr.fail()) {
      throw ValueError(path + ": bad tensor header '" + line + "'");
    }
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!std::getline(in, line)) {
        throw ValueError(path + ": truncated tensor " + name + " at row " + std::to_string(r));
      }
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const char* p = line.data();
      const char* end = p + line.size();
      for (std::size_t c = 0; c < cols; ++c) {
        while (p < end && *p == ' ') ++p;
        double v = 0.0;
        const auto res = std::from_chars(p, end, v);
        if (res.ec != std::errc()) {
          throw ValueError(path + ": bad value in tensor " + name + " row " + std::to_string(r));
        }
        m(r, c) = v;
        p = res.ptr;
      }
    }
    if (name == "norm.mean") {
      norm_mean = m;
    } else if (name == "norm.std") {
      norm_std = m;
    } else {
      const auto it = by_name.find(name);
      if (it == by_name.end()) throw ValueError(path + ": unexpected tensor " + name);
      if (!it->second->value.same_shape(m)) {
        throw DimensionError(path + ": tensor " + name + " is " + m.shape_str() + ", model needs " +
                             it->second->value.shape_str());
      }
      it->second->value = m;
      ++filled;
    }
  }
  if (filled != by_name.size()) {
    throw ValueError(path + ": checkpoint holds " + std::to_string(filled) + " tensors, model has " +
                     std::to_string(by_name.size()));
  }
  if (has_norm) {
    if (norm_mean.size() == 0 || norm_std.size() == 0) {
      throw ValueError(path + ": normalization tensors missing");
    }
    if (norm_mean.cols() != cfg.sensors || norm_std.cols() != cfg.sensors) {
      throw DimensionError(path + ": normalization stats do not match sensor count");
    }
    model.norm.mean.assign(norm_mean.data(), norm_mean.data() + norm_mean.size());
    model.norm.std_dev.assign(norm_std.data(), norm_std.data() + norm_std.size());
  }
  if (extras) *extras = ex;
  return model;
}

}  // namespace hcg
