#include "hcg/synth.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "hcg/error.hpp"
#include "hcg/rng.hpp"

namespace hcg {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& s, const std::string& key) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key + ": expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string item =
        trim(s.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    out.push_back(parse_double(item, key));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

SynthConfig load_synth_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  SynthConfig cfg;
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
    if (key == "num_classes") cfg.num_classes = parse_u64(val, key);
    else if (key == "sensors") cfg.sensors = parse_u64(val, key);
    else if (key == "window") cfg.window = parse_u64(val, key);
    else if (key == "samples_per_class") cfg.samples_per_class = parse_u64(val, key);
    else if (key == "base_freqs") cfg.base_freqs = parse_list(val, key);
    else if (key == "amplitudes") cfg.amplitudes = parse_list(val, key);
    else if (key == "freq_class_step") cfg.freq_class_step = parse_double(val, key);
    else if (key == "amp_class_step") cfg.amp_class_step = parse_double(val, key);
    else if (key == "spatial_weights") cfg.spatial_weights = parse_list(val, key);
    else if (key == "noise_std") cfg.noise_std = parse_double(val, key);
    else if (key == "sample_rate_hz") cfg.sample_rate_hz = parse_double(val, key);
    else if (key == "seed") cfg.seed = parse_u64(val, key);
    else throw ConfigError(path + ": unknown key '" + key + "' at line " + std::to_string(row));
  }
  return cfg;
}

static void validate(const SynthConfig& cfg) {
  if (cfg.num_classes < 1) throw ConfigError("num_classes must be >= 1");
  if (cfg.sensors < 1) throw ConfigError("sensors must be >= 1");
  if (cfg.window < 1) throw ConfigError("window must be >= 1");
  if (cfg.samples_per_class < 1) throw ConfigError("samples_per_class must be >= 1");
  if (cfg.base_freqs.empty()) throw ConfigError("base_freqs must list at least one mode");
  if (cfg.base_freqs.size() != cfg.amplitudes.size()) {
    throw ConfigError("amplitudes must match base_freqs length");
  }
  if (!cfg.spatial_weights.empty() && cfg.spatial_weights.size() != cfg.sensors) {
    throw ConfigError("spatial_weights must list one weight per sensor");
  }
  if (cfg.sample_rate_hz <= 0.0) throw ConfigError("sample_rate_hz must be positive");
  if (cfg.noise_std < 0.0) throw ConfigError("noise_std must be >= 0");
  for (std::size_t c = 0; c < cfg.num_classes; ++c) {
    for (std::size_t m = 0; m < cfg.base_freqs.size(); ++m) {
      const double f = synth_frequency(cfg, c, m);
      if (f <= 0.0) {
        throw ConfigError("class " + std::to_string(c) + " mode " + std::to_string(m) +
                          " frequency " + std::to_string(f) + " Hz is not positive");
      }
      if (f >= cfg.sample_rate_hz / 2.0) {
        throw ConfigError("class " + std::to_string(c) + " mode " + std::to_string(m) +
                          " frequency " + std::to_string(f) + " Hz breaks the Nyquist limit " +
                          std::to_string(cfg.sample_rate_hz / 2.0) + " Hz");
      }
    }
  }
}

double synth_frequency(const SynthConfig& cfg, std::size_t cls, std::size_t mode) {
  return cfg.base_freqs[mode] * (1.0 - cfg.freq_class_step * static_cast<double>(cls));
}

double synth_amplitude(const SynthConfig& cfg, std::size_t cls, std::size_t mode) {
  return cfg.amplitudes[mode] * (1.0 + cfg.amp_class_step * static_cast<double>(cls));
}

double synth_spatial_weight(const SynthConfig& cfg, std::size_t mode, std::size_t sensor) {
  if (!cfg.spatial_weights.empty()) return cfg.spatial_weights[sensor];
  // Beam-like mode shape, kept positive so every sensor sees every mode.
  const double pos = static_cast<double>(sensor + 1) / static_cast<double>(cfg.sensors + 1);
  return 1.0 + 0.5 * std::sin(3.14159265358979323846 * static_cast<double>(mode + 1) * pos);
}

LabeledDataset synth_generate(const SynthConfig& cfg) {
  validate(cfg);
  LabeledDataset ds;
  ds.num_classes = cfg.num_classes;
  ds.sample_rate_hz = cfg.sample_rate_hz;
  const std::size_t modes = cfg.base_freqs.size();
  Rng rng(cfg.seed);
  std::vector<double> phase(modes);
  for (std::size_t c = 0; c < cfg.num_classes; ++c) {
    for (std::size_t s = 0; s < cfg.samples_per_class; ++s) {
      for (std::size_t m = 0; m < modes; ++m) phase[m] = rng.uniform(0.0, kTwoPi);
      Matrix w(cfg.window, cfg.sensors);
      for (std::size_t i = 0; i < cfg.sensors; ++i) {
        for (std::size_t t = 0; t < cfg.window; ++t) {
          double v = 0.0;
          for (std::size_t m = 0; m < modes; ++m) {
            const double f = synth_frequency(cfg, c, m);
            v += synth_amplitude(cfg, c, m) * synth_spatial_weight(cfg, m, i) *
                 std::sin(kTwoPi * f * static_cast<double>(t) / cfg.sample_rate_hz + phase[m]);
          }
          if (cfg.noise_std > 0.0) v += cfg.noise_std * rng.normal();
          w(t, i) = v;
        }
      }
      ds.windows.push_back(std::move(w));
      ds.labels.push_back(c);
    }
  }
  ds.split.assign(ds.size(), Split::Train);
  return ds;
}

void write_synth_dataset(const LabeledDataset& ds, const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
  std::vector<std::pair<std::string, std::size_t>> entries;
  entries.reserve(ds.size());
  std::vector<std::size_t> counter(ds.num_classes, 0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::size_t label = ds.labels[i];
    const std::string name =
        "class" + std::to_string(label) + "_sample" + std::to_string(counter[label]++) + ".csv";
    write_recording(out_dir + "/" + name, ds.windows[i]);
    entries.emplace_back(name, label);
  }
  write_manifest(out_dir, entries);
}

}  // namespace hcg
