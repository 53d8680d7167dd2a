#include "fbpstream/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string_view>

#include "fbpstream/errors.hpp"

namespace fbpstream {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::optional<double> parse_double(std::string_view field) {
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

}  // namespace

BatchReader::BatchReader(std::istream& in, const IngestConfig& cfg) : in_(in), cfg_(cfg) {
  if (cfg_.window_size < 2) {
    throw ConfigError("window size must be at least 2, got " + std::to_string(cfg_.window_size));
  }
  if (cfg_.header) {
    std::string skipped;
    next_line(skipped);
  }
}

void BatchReader::fail(const std::string& msg) const {
  throw DataError("line " + std::to_string(line_no_) + ": " + msg);
}

bool BatchReader::next_line(std::string& line) {
  while (std::getline(in_, line)) {
    ++line_no_;
    if (!trim(line).empty()) return true;
  }
  return false;
}

bool BatchReader::read_wide(std::vector<double>& row) {
  std::string line;
  if (!next_line(line)) return false;
  const auto fields = split(line, cfg_.delimiter);
  if (n_streams_ == 0) n_streams_ = fields.size();
  if (fields.size() != n_streams_) {
    fail("expected " + std::to_string(n_streams_) + " values, found " +
         std::to_string(fields.size()));
  }
  row.resize(n_streams_);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].empty()) fail("missing value in column " + std::to_string(i + 1));
    const auto v = parse_double(fields[i]);
    if (!v) fail("non-numeric value '" + std::string(fields[i]) + "' in column " + std::to_string(i + 1));
    row[i] = *v;
  }
  return true;
}

bool BatchReader::read_long(std::vector<double>& row) {
  std::string line;
  if (pending_line_) {
    line = std::move(*pending_line_);
    pending_line_.reset();
  } else if (!next_line(line)) {
    return false;
  }

  const bool first_step = series_ids_.empty();
  std::map<std::string, double, std::less<>> values;
  std::string time;
  while (true) {
    const auto fields = split(line, cfg_.delimiter);
    if (fields.size() != 3) fail("expected time, series_id, value");
    if (fields[2].empty()) fail("missing value for series '" + std::string(fields[1]) + "'");
    const auto v = parse_double(fields[2]);
    if (!v) fail("non-numeric value '" + std::string(fields[2]) + "'");
    if (time.empty()) time = std::string(fields[0]);
    if (fields[0] != time) {
      pending_line_ = std::move(line);
      break;
    }
    const std::string id(fields[1]);
    if (!values.emplace(id, *v).second) fail("series '" + id + "' repeated at time " + time);
    if (first_step) series_ids_.push_back(id);
    if (!next_line(line)) break;
  }

  if (first_step) n_streams_ = series_ids_.size();
  if (values.size() != n_streams_) {
    fail("time " + time + " has " + std::to_string(values.size()) + " series, expected " +
         std::to_string(n_streams_));
  }
  row.resize(n_streams_);
  for (std::size_t i = 0; i < n_streams_; ++i) {
    const auto it = values.find(series_ids_[i]);
    if (it == values.end()) fail("series '" + series_ids_[i] + "' missing at time " + time);
    row[i] = it->second;
  }
  return true;
}

bool BatchReader::read_time_step(std::vector<double>& row) {
  return cfg_.layout == Layout::wide ? read_wide(row) : read_long(row);
}

std::optional<StreamBatch> BatchReader::next() {
  const std::size_t w = cfg_.window_size;
  std::vector<std::vector<double>> steps;
  steps.reserve(w);
  std::vector<double> row;
  while (steps.size() < w && read_time_step(row)) steps.push_back(row);
  if (steps.size() < w) {
    dropped_ = steps.size();
    return std::nullopt;
  }

  StreamBatch batch;
  batch.window = Window::at(window_index_++, w);
  batch.raw.assign(n_streams_, std::vector<double>(w));
  for (std::size_t t = 0; t < w; ++t) {
    for (std::size_t i = 0; i < n_streams_; ++i) batch.raw[i][t] = steps[t][i];
  }
  return batch;
}

std::size_t for_each_batch(const IngestConfig& cfg,
                           const std::function<void(const StreamBatch&)>& sink) {
  const bool use_stdin = cfg.path.empty() || cfg.path == "-";
  if (use_stdin && cfg.layout != Layout::wide) {
    throw ConfigError("standard input accepts the wide layout only");
  }
  std::ifstream file;
  if (!use_stdin) {
    file.open(cfg.path, std::ios::binary);
    if (!file) throw DataError("cannot open input file " + cfg.path);
  }
  BatchReader reader(use_stdin ? std::cin : file, cfg);
  std::size_t count = 0;
  while (auto batch = reader.next()) {
    sink(*batch);
    ++count;
  }
  return count;
}

std::vector<StreamBatch> read_batches(const IngestConfig& cfg) {
  std::vector<StreamBatch> out;
  for_each_batch(cfg, [&](const StreamBatch& b) { out.push_back(b); });
  return out;
}

namespace {

std::size_t window_count(const SynthSpec& spec) {
  return (spec.total_length + spec.window_size - 1) / spec.window_size;
}

void validate(const SynthSpec& spec) {
  if (spec.n_streams == 0) throw ConfigError("synthetic stream needs at least one series");
  if (spec.window_size < 2) throw ConfigError("synthetic window size must be at least 2");
  std::size_t expected = 0;
  for (const auto& r : spec.regimes) {
    if (r.end_window <= r.start_window) throw ConfigError("empty synthetic regime");
    if (r.start_window < expected) throw ConfigError("synthetic regimes overlap");
    if (r.start_window > expected) throw ConfigError("synthetic regimes leave a gap");
    if (r.noise_sd < 0.0) throw ConfigError("noise sd must be nonnegative");
    expected = r.end_window;
  }
  if (expected != window_count(spec)) {
    throw ConfigError("synthetic regimes cover " + std::to_string(expected) + " windows, stream has " +
                      std::to_string(window_count(spec)));
  }
}

}  // namespace

std::vector<std::size_t> planted_regimes(const SynthSpec& spec) {
  validate(spec);
  std::vector<std::size_t> out(window_count(spec));
  for (std::size_t r = 0; r < spec.regimes.size(); ++r) {
    for (std::size_t j = spec.regimes[r].start_window; j < spec.regimes[r].end_window; ++j) {
      out[j] = spec.regimes[r].label;
    }
  }
  return out;
}

void generate_synth(const SynthSpec& spec, std::ostream& out) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr double kPi = 3.14159265358979323846;

  const double n = static_cast<double>(spec.n_streams);
  std::string line;
  char buf[64];
  std::size_t regime = 0;
  for (std::size_t t = 0; t < spec.total_length; ++t) {
    const std::size_t window = t / spec.window_size;
    while (spec.regimes[regime].end_window <= window) ++regime;
    const Regime& r = spec.regimes[regime];
    line.clear();
    for (std::size_t i = 0; i < spec.n_streams; ++i) {
      const double offset =
          spec.n_streams > 1 ? r.spread * (static_cast<double>(i) / (n - 1.0) - 0.5) : 0.0;
      double v = r.level + offset;
      switch (r.kind) {
        case GeneratorKind::constant:
          break;
        case GeneratorKind::sine:
          v += r.amplitude * std::sin(2.0 * kPi * static_cast<double>(t) / r.period);
          break;
        case GeneratorKind::spike_mixture:
          if (unit(rng) < r.spike_prob) v += r.spike_height * (0.5 + unit(rng));
          break;
      }
      if (r.noise_sd > 0.0) v += r.noise_sd * gauss(rng);
      if (i > 0) line.push_back(',');
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      line.append(buf, res.ptr);
    }
    line.push_back('\n');
    out << line;
  }
}

SynthSpec four_regime_spec(std::size_t n_streams, std::size_t total_length,
                           std::size_t window_size, std::size_t block_windows,
                           std::uint64_t seed) {
  if (block_windows == 0) throw ConfigError("regime block length must be positive");
  SynthSpec spec;
  spec.n_streams = n_streams;
  spec.total_length = total_length;
  spec.window_size = window_size;
  spec.seed = seed;

  std::array<Regime, 4> palette;
  palette[0].kind = GeneratorKind::constant;
  palette[0].level = 0.0;
  palette[0].spread = 2.0;
  palette[0].noise_sd = 0.5;

  palette[1].kind = GeneratorKind::sine;
  palette[1].level = 12.0;
  palette[1].amplitude = 5.0;
  palette[1].period = static_cast<double>(window_size);
  palette[1].spread = 2.0;
  palette[1].noise_sd = 0.5;

  palette[2].kind = GeneratorKind::spike_mixture;
  palette[2].level = 5.0;
  palette[2].spike_prob = 0.05;
  palette[2].spike_height = 20.0;
  palette[2].spread = 1.0;
  palette[2].noise_sd = 0.5;

  palette[3].kind = GeneratorKind::constant;
  palette[3].level = 30.0;
  palette[3].spread = 4.0;
  palette[3].noise_sd = 1.0;

  const std::size_t windows = window_size == 0 ? 0 : (total_length + window_size - 1) / window_size;
  for (std::size_t start = 0, block = 0; start < windows; start += block_windows, ++block) {
    Regime r = palette[block % palette.size()];
    r.label = block % palette.size();
    r.start_window = start;
    r.end_window = std::min(windows, start + block_windows);
    spec.regimes.push_back(r);
  }
  return spec;
}

}  // namespace fbpstream
