#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fbpstream/core.hpp"

namespace fbpstream {

enum class Layout {
  wide,  // one row per time step, one column per series
  long_,  // rows of time,series_id,value grouped by time
};

struct IngestConfig {
  // Empty path or "-" reads standard input (wide layout only).
  std::string path;
  Layout layout = Layout::wide;
  std::size_t window_size = 30;
  char delimiter = ',';
  // Skip the first line.
  bool header = false;
};

// Pulls complete windows from a text source. Holds at most one window of
// samples; a trailing partial window is dropped.
class BatchReader {
 public:
  BatchReader(std::istream& in, const IngestConfig& cfg);

  std::optional<StreamBatch> next();

  std::size_t n_streams() const noexcept { return n_streams_; }
  // Time steps left over after the last complete window (valid once next()
  // has returned nullopt).
  std::size_t dropped_samples() const noexcept { return dropped_; }

 private:
  bool read_time_step(std::vector<double>& row);
  bool read_wide(std::vector<double>& row);
  bool read_long(std::vector<double>& row);
  bool next_line(std::string& line);
  [[noreturn]] void fail(const std::string& msg) const;

  std::istream& in_;
  IngestConfig cfg_;
  std::size_t line_no_ = 0;
  std::size_t n_streams_ = 0;
  std::size_t window_index_ = 0;
  std::size_t dropped_ = 0;
  // Long layout state.
  std::vector<std::string> series_ids_;
  std::optional<std::string> pending_line_;
};

// Streams every complete window of the configured source through `sink`.
// Returns the number of windows delivered.
std::size_t for_each_batch(const IngestConfig& cfg,
                           const std::function<void(const StreamBatch&)>& sink);

std::vector<StreamBatch> read_batches(const IngestConfig& cfg);

enum class GeneratorKind { constant, sine, spike_mixture };

// Signal of one regime. Stream i of n receives an extra fixed offset
// spread * (i / (n - 1) - 1/2).
struct Regime {
  std::size_t start_window = 0;
  std::size_t end_window = 0;  // exclusive
  GeneratorKind kind = GeneratorKind::constant;
  double level = 0.0;
  double amplitude = 0.0;     // sine
  double period = 30.0;       // sine, in samples
  double spike_prob = 0.0;    // spike_mixture
  double spike_height = 0.0;  // spike_mixture: spikes ~ Uniform(0.5, 1.5) * height
  double spread = 0.0;
  double noise_sd = 0.0;
  // Ground-truth class of the regime.
  std::size_t label = 0;
};

struct SynthSpec {
  std::size_t n_streams = 1;
  std::size_t total_length = 0;  // samples per stream
  std::size_t window_size = 30;
  // Must tile windows [0, ceil(total_length / window_size)) in order.
  std::vector<Regime> regimes;
  std::uint64_t seed = 0;
};

// Writes the stream in wide layout (no header, comma separated). Throws
// ConfigError when the regimes overlap or leave gaps.
void generate_synth(const SynthSpec& spec, std::ostream& out);

// Regime label of every window of the spec.
std::vector<std::size_t> planted_regimes(const SynthSpec& spec);

// Four well-separated regimes (low constant, sine, spike mixture, high
// constant) repeated in blocks of `block_windows` windows.
SynthSpec four_regime_spec(std::size_t n_streams, std::size_t total_length,
                           std::size_t window_size, std::size_t block_windows,
                           std::uint64_t seed);

}  // namespace fbpstream
